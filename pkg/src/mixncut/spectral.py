"""Transition operators and eigenpair extraction.

P = D^-1 W is the random-walk transition matrix of a weighted graph; the
mixed operator (1-lam) P1 x + lam P2 x is the walk that follows graph 1
with probability (1-lam) and graph 2 with probability lam.  Its second
(and third) largest eigenvectors carry the partition structure.

The mixed operator is genuinely non-symmetric (a sum of row-normalized
matrices has no shared symmetrizing similarity), so the general route is
restarted Arnoldi (ARPACK).  A single-graph operator is similar to the
symmetric D^(1/2) P D^(-1/2), where the cheaper symmetric Lanczos route
applies.  Residuals are always recomputed from the operator itself, never
trusted from the solver.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from threadpoolctl import threadpool_limits

from .core import substream, vector_to_gray, save_image


class SolverConvergenceError(RuntimeError):
    """Eigensolver failed to converge; carries the best residual reached."""

    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class TransitionOperator:
    """Row-stochastic operator P = D^-1 W of an undirected SparseGraph."""

    def __init__(self, matrix, degrees):
        self.matrix = matrix
        self.degrees = degrees

    @property
    def n(self):
        return self.matrix.shape[0]

    def apply(self, x):
        x = np.asarray(x)
        if x.shape[0] != self.n:
            raise ValueError(f"vector length {x.shape[0]} != operator size {self.n}")
        return self.matrix @ x


@dataclass(frozen=True)
class MixedOperator:
    """x -> (1 - lam) * P1 x + lam * P2 x; row-stochastic for lam in [0, 1]."""

    op1: TransitionOperator
    op2: TransitionOperator
    lam: float

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1]")
        if self.op1.n != self.op2.n:
            raise ValueError("operators act on different vertex sets")

    @property
    def n(self):
        return self.op1.n

    def apply(self, x):
        if self.lam == 0.0:
            return self.op1.apply(x)
        if self.lam == 1.0:
            return self.op2.apply(x)
        return (1.0 - self.lam) * self.op1.apply(x) + self.lam * self.op2.apply(x)


@dataclass(frozen=True)
class EigenPair:
    """One (eigenvalue, eigenvector, residual) triple.

    For a complex-conjugate eigenvalue pair the value is the (shared) real
    part, the vector is the normalized real or imaginary component of the
    complex eigenvector, is_complex_pair is set, and the residual is that
    of the underlying complex pair ||P v - lambda v||_2.
    """

    value: float
    vector: np.ndarray
    residual: float
    is_complex_pair: bool = False


def build_transition(g):
    """Row-normalize a SparseGraph; degree-0 vertices become absorbing."""
    n = g.n
    loop = g.ei == g.ej
    rows = np.concatenate([g.ei, g.ej[~loop]])
    cols = np.concatenate([g.ej, g.ei[~loop]])
    data = np.concatenate([g.w, g.w[~loop]])
    degrees = g.degrees.copy()
    isolated = np.flatnonzero(degrees == 0)
    if isolated.size:
        rows = np.concatenate([rows, isolated])
        cols = np.concatenate([cols, isolated])
        data = np.concatenate([data, np.ones(isolated.size)])
        degrees[isolated] = 1.0
    w = sp.coo_array((data, (rows, cols)), shape=(n, n)).tocsr()
    p = w.copy()
    p.data = p.data / degrees[np.repeat(np.arange(n), np.diff(p.indptr))]
    return TransitionOperator(p, degrees)


def top_eigenpairs(op, count, tol=1e-8, max_applications=5000, seed=0, restart_dim=30):
    """Largest-real-part eigenpairs of a transition or mixed operator.

    Returns `count` EigenPairs sorted by descending real eigenvalue; the
    first is always (about 1, about constant) for a connected chain.  The
    start vector is seeded and orthogonalized against the ones vector so
    the Krylov space is biased toward the sub-dominant structure.  Raises
    SolverConvergenceError on non-convergence; a duplicate eigenvalue at 1
    with a non-constant vector (disconnected chain) only warns.
    """
    n = op.n
    if count < 1:
        raise ValueError("count must be at least 1")
    if count > n:
        raise ValueError(f"cannot extract {count} eigenpairs from an {n}-vertex operator")

    single = _as_single_transition(op)
    if n < count + 3 or n < 6:
        vals, vecs = np.linalg.eig(_dense_matrix(op))
    elif single is not None:
        vals, vecs = _solve_symmetric(single, count, tol, max_applications, seed, restart_dim)
    else:
        vals, vecs = _solve_arnoldi(op, count, tol, max_applications, seed, restart_dim)

    pairs = _package_pairs(op, vals, vecs, count)
    bad = [p.residual for p in pairs if not p.residual <= max(tol, 1e-7)]
    if bad:
        raise SolverConvergenceError(
            f"eigensolver residual {max(bad):.3e} exceeds tolerance {tol:.1e}",
            best_residual=float(max(bad)),
        )
    if len(pairs) >= 2 and abs(pairs[1].value - 1.0) <= 1e-8:
        v = pairs[1].vector
        if np.std(v) > 1e-6:
            warnings.warn(
                "duplicate eigenvalue 1 with non-constant eigenvector: "
                "the chain appears disconnected",
                stacklevel=2,
            )
    return pairs


def _as_single_transition(op):
    """The TransitionOperator equivalent to `op`, or None if truly mixed."""
    if isinstance(op, TransitionOperator):
        return op
    if isinstance(op, MixedOperator):
        if op.lam == 0.0 or op.op1 is op.op2:
            return op.op1
        if op.lam == 1.0:
            return op.op2
    return None


def _dense_matrix(op):
    if isinstance(op, TransitionOperator):
        return op.matrix.toarray()
    if isinstance(op, MixedOperator):
        return (1.0 - op.lam) * _dense_matrix(op.op1) + op.lam * _dense_matrix(op.op2)
    return op.apply(np.eye(op.n))


def _start_vector(n, seed):
    rng = substream(seed, 0x5EED)
    v0 = rng.standard_normal(n)
    v0 -= v0.mean()  # deflate the known (1, constant) eigenpair
    norm = np.linalg.norm(v0)
    if norm == 0.0:
        v0 = np.zeros(n)
        v0[0], v0[-1] = 1.0, -1.0
        norm = np.linalg.norm(v0)
    return v0 / norm


def _solve_symmetric(single, count, tol, max_applications, seed, restart_dim):
    """Lanczos on the similar symmetric matrix D^(1/2) P D^(-1/2)."""
    sqrt_deg = np.sqrt(single.degrees)
    s = single.matrix.copy()
    rows = np.repeat(np.arange(single.n), np.diff(s.indptr))
    s.data = s.data * sqrt_deg[rows] / sqrt_deg[s.indices]
    k = min(count + 1, single.n - 1)
    ncv = min(single.n, max(restart_dim, 2 * k + 1))
    maxiter = max(2, max_applications // max(1, ncv - k))
    v0 = _start_vector(single.n, seed)
    try:
        with threadpool_limits(limits=1):
            vals, vecs = spla.eigsh(s, k=k, which="LA", v0=v0, tol=tol, maxiter=maxiter)
    except spla.ArpackNoConvergence as exc:
        if len(getattr(exc, "eigenvalues", [])):
            # partial Ritz vectors are eigenvectors of S; map back to P's basis
            exc.eigenvectors = exc.eigenvectors / sqrt_deg[:, None]
        raise _convergence_error(single, exc, v0) from exc
    vecs = vecs / sqrt_deg[:, None]  # map eigenvectors of S back to eigenvectors of P
    return vals.astype(complex), vecs.astype(complex)


def _solve_arnoldi(op, count, tol, max_applications, seed, restart_dim):
    """Implicitly restarted Arnoldi on the non-symmetric mixed operator.

    Requests exactly `count` pairs: on mixed operators the eigenvalues below
    the informative ones form a dense near-degenerate band (the spatial
    continuum), and placing the convergence boundary inside that band stalls
    the iteration, while the boundary after pair `count` usually sits in a
    genuine gap.
    """
    k = min(count, op.n - 2)
    ncv = min(op.n, max(restart_dim, 2 * k + 2))
    maxiter = max(2, max_applications // max(1, ncv - k))
    linop = spla.LinearOperator((op.n, op.n), matvec=op.apply, dtype=np.float64)
    v0 = _start_vector(op.n, seed)
    try:
        with threadpool_limits(limits=1):
            vals, vecs = spla.eigs(linop, k=k, which="LR", v0=v0, tol=tol, maxiter=maxiter)
    except spla.ArpackNoConvergence as exc:
        raise _convergence_error(op, exc, v0) from exc
    return vals, vecs


def _convergence_error(op, exc, v0):
    if len(getattr(exc, "eigenvalues", [])):
        best = float(min(
            _pair_residual(op, lam, vec)
            for lam, vec in zip(exc.eigenvalues, exc.eigenvectors.T)
        ))
    else:
        # no Ritz pair converged: report the Rayleigh-quotient residual of
        # the start vector so the message always carries a residual figure
        av = op.apply(v0)
        lam = float(v0 @ av)
        best = float(np.linalg.norm(av - lam * v0))
    return SolverConvergenceError(
        f"eigensolver did not converge ({exc}); best residual {best:.3e}",
        best_residual=best,
    )


def _pair_residual(op, lam, vec):
    """|| P v - lambda v ||_2 for a possibly complex pair, via real applies."""
    vr, vi = np.ascontiguousarray(vec.real), np.ascontiguousarray(vec.imag)
    a, b = lam.real, lam.imag
    res_r = op.apply(vr) - (a * vr - b * vi)
    if np.any(vi) or b != 0.0:
        res_i = op.apply(vi) - (b * vr + a * vi)
        num = np.sqrt(np.linalg.norm(res_r) ** 2 + np.linalg.norm(res_i) ** 2)
        den = np.sqrt(np.linalg.norm(vr) ** 2 + np.linalg.norm(vi) ** 2)
    else:
        num, den = np.linalg.norm(res_r), np.linalg.norm(vr)
    return float(num / den) if den > 0 else np.inf


def _canonical_sign(v):
    big = np.flatnonzero(np.abs(v) > 1e-8 * max(np.abs(v).max(), 1e-300))
    if big.size and v[big[0]] < 0:
        return -v
    return v


def _package_pairs(op, vals, vecs, count):
    """Sort, reduce complex-conjugate pairs to real vectors, trim, canonicalize."""
    vals = np.asarray(vals, dtype=complex)
    order = np.lexsort((-vals.imag, -vals.real))
    imag_tol = 1e-10 * max(1.0, float(np.abs(vals).max(initial=0.0)))
    out = []
    skip = set()
    for pos, o in enumerate(order):
        if len(out) >= count:
            break
        if o in skip:
            continue
        lam, vec = vals[o], vecs[:, o]
        if abs(lam.imag) <= imag_tol:
            residual = _pair_residual(op, complex(lam.real, 0.0), vec.real.astype(np.float64))
            out.append(_make_pair(lam.real, vec.real, residual, False))
            continue
        # conjugate pair: locate the twin so it is not emitted separately
        for o2 in order[pos + 1 :]:
            if o2 not in skip and abs(vals[o2] - np.conj(lam)) <= 1e-8 * max(1.0, abs(lam)):
                skip.add(o2)
                break
        residual = _pair_residual(op, lam, vec)
        components = sorted((vec.real, vec.imag), key=np.linalg.norm, reverse=True)
        for comp in components:
            if len(out) >= count:
                break
            if np.linalg.norm(comp) > 1e-12:
                out.append(_make_pair(lam.real, comp, residual, True))
    return out[:count]


def _make_pair(value, vector, residual, is_complex):
    v = np.asarray(vector, dtype=np.float64)
    v = _canonical_sign(v / np.linalg.norm(v))
    return EigenPair(float(value), v, float(residual), is_complex)


def save_eigenvector_png(vector, width, height, path):
    """Debug dump: linear min-max rescale of an eigenvector to a grayscale PNG."""
    save_image(vector_to_gray(vector, width, height), path)
