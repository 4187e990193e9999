"""Graph construction and cut/ncut evaluation.

Two families of graphs appear throughout:

* the 4-neighbor unit-weight grid graph, whose cut counts boundary length;
* the implicit dense appearance graph with weights
  w(i,j) = exp(-||I(i)-I(j)||^2 / (2 sigma^2)) and w(i,i) = 1, which is never
  materialized at scale but evaluated either by brute force (small instances)
  or in closed form through Gaussian kernel-density inner products.

The closed forms rest on two identities.  With g_S the Gaussian KDE of the
appearance values in S (per-point kernel exp(-||I-c||^2/sigma^2), i.e.
variance sigma^2/2 per component):

    cut(A,B)  = (2 pi sigma^2)^(d/2) |A||B| <g_A, g_B>
    ncut(A,B) = <g_V,g_V> <g_A,g_B> / (<g_A,g_V> <g_B,g_V>)

where volumes include the i=j self terms (w(i,i)=1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AppearanceImage, Bipartition, SparseGraph


@dataclass(frozen=True)
class DenseGraphSpec:
    """Implicit dense appearance graph: image plus bandwidth sigma."""

    image: AppearanceImage
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


def build_grid_graph(width, height):
    """4-neighbor unit-weight grid graph on width*height pixels."""
    if width < 1 or height < 1:
        raise ValueError("grid dimensions must be positive")
    n = width * height
    idx = np.arange(n, dtype=np.int64).reshape(height, width)
    right_i = idx[:, :-1].ravel()
    right_j = idx[:, 1:].ravel()
    down_i = idx[:-1, :].ravel()
    down_j = idx[1:, :].ravel()
    ei = np.concatenate([right_i, down_i])
    ej = np.concatenate([right_j, down_j])
    return SparseGraph(n, ei, ej, np.ones(ei.size))


def cut_weight(g, p):
    """Total weight of edges crossing the bipartition; self-loops never cross."""
    if p.n != g.n:
        raise ValueError("partition size does not match graph")
    crossing = p.side[g.ei] != p.side[g.ej]
    return float(g.w[crossing].sum())


def volume(g, side_mask):
    """vol(S) = sum of degree(i) over i in S (equals sum_{i in S, j in V} w(i,j))."""
    mask = np.asarray(side_mask, dtype=bool).ravel()
    if mask.size != g.n:
        raise ValueError("mask size does not match graph")
    return float(g.degrees[mask].sum())


class UndefinedNcutError(ValueError):
    """Raised when a side is empty or has zero volume."""


def ncut_weight(g, p):
    """cut/vol(A) + cut/vol(B); requires both sides non-empty with positive volume."""
    if p.a_count == 0 or p.b_count == 0:
        raise UndefinedNcutError("both sides of the partition must be non-empty")
    vol_a = volume(g, ~p.side)
    vol_b = volume(g, p.side)
    if vol_a <= 0 or vol_b <= 0:
        raise UndefinedNcutError("both sides must have positive volume")
    c = cut_weight(g, p)
    return c / vol_a + c / vol_b


def _pairwise_sq_dists(x, y, chunk=512):
    """Squared Euclidean distances between rows of x (a,d) and y (b,d).

    Chunked broadcasting, no BLAS: identical results regardless of the
    process's thread configuration.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    out = np.empty((x.shape[0], y.shape[0]))
    for start in range(0, x.shape[0], chunk):
        stop = min(start + chunk, x.shape[0])
        diff = x[start:stop, None, :] - y[None, :, :]
        out[start:stop] = np.sum(diff * diff, axis=2)
    return out


def dense_cut_bruteforce(spec, p):
    """sum_{i in A, j in B} exp(-||I(i)-I(j)||^2 / (2 sigma^2)), the definition.

    A and B come from the bipartition; intended for small instances.  Pairs
    with i = j (possible only if the two index sets overlap, as in volume
    computations) contribute w(i,i) = 1.
    """
    values = spec.image.flat
    return _dense_cut_sets(values[~p.side], values[p.side], spec.sigma)


def _dense_cut_sets(values_a, values_b, sigma):
    if len(values_a) == 0 or len(values_b) == 0:
        return 0.0
    d2 = _pairwise_sq_dists(values_a, values_b)
    return float(np.exp(-d2 / (2.0 * sigma * sigma)).sum())


def dense_volume_bruteforce(spec, side_mask):
    """Brute-force vol(S) on the dense graph, i=j self terms included."""
    mask = np.asarray(side_mask, dtype=bool).ravel()
    values = spec.image.flat
    return _dense_cut_sets(values[mask], values, spec.sigma)


def kde_inner_product(values_s, values_t, sigma):
    """<g_S, g_T> for Gaussian KDEs with per-component variance sigma^2 / 2.

    Evaluated analytically: the convolution of two such kernels is a Gaussian
    of variance sigma^2, so the inner product is the mean pairwise Gaussian
    affinity scaled by the (2 pi sigma^2)^(-d/2) normalizer.
    """
    values_s = np.atleast_2d(values_s)
    values_t = np.atleast_2d(values_t)
    d = values_s.shape[1]
    norm = (2.0 * np.pi * sigma * sigma) ** (-0.5 * d)
    d2 = _pairwise_sq_dists(values_s, values_t)
    mean_aff = np.exp(-d2 / (2.0 * sigma * sigma)).mean()
    return float(norm * mean_aff)


def kde_cut_closed_form(spec, p, mode="analytic", quad_points=4096):
    """Dense cut via the KDE identity (2 pi sigma^2)^(d/2) |A||B| <g_A, g_B>.

    mode="analytic" evaluates the inner product exactly and reproduces
    dense_cut_bruteforce to rounding error.  mode="quadrature" (d=1 only)
    integrates g_A * g_B numerically with the trapezoid rule over
    [min I - 5 sigma, max I + 5 sigma], a deliberately independent route
    used for validation.
    """
    sigma = spec.sigma
    values = spec.image.flat
    va, vb = values[~p.side], values[p.side]
    if len(va) == 0 or len(vb) == 0:
        return 0.0
    d = values.shape[1]
    scale = (2.0 * np.pi * sigma * sigma) ** (0.5 * d)
    if mode == "analytic":
        ip = kde_inner_product(va, vb, sigma)
    elif mode == "quadrature":
        if d != 1:
            raise ValueError("quadrature mode supports d=1 only")
        ip = _kde_inner_product_quadrature(va[:, 0], vb[:, 0], sigma, quad_points)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return float(scale * len(va) * len(vb) * ip)


def _kde_inner_product_quadrature(a, b, sigma, min_points):
    lo = min(a.min(), b.min()) - 5.0 * sigma
    hi = max(a.max(), b.max()) + 5.0 * sigma
    span = hi - lo
    npts = max(int(min_points), int(np.ceil(8.0 * span / sigma)) + 1)
    grid = np.linspace(lo, hi, npts)
    ga = _kde_values_1d(a, grid, sigma)
    gb = _kde_values_1d(b, grid, sigma)
    return float(np.trapezoid(ga * gb, grid))


def _kde_values_1d(samples, grid, sigma, chunk=1 << 16):
    """Evaluate the d=1 Gaussian KDE (variance sigma^2/2) on a grid."""
    norm = 1.0 / (np.sqrt(np.pi) * sigma)
    out = np.empty(grid.size)
    inv = 1.0 / (sigma * sigma)
    for start in range(0, grid.size, chunk):
        stop = min(start + chunk, grid.size)
        diff = grid[start:stop, None] - samples[None, :]
        out[start:stop] = np.exp(-(diff * diff) * inv).mean(axis=1)
    return out * norm


def dense_ncut(spec, p):
    """ncut on the dense appearance graph via KDE inner products.

    Equals cut/vol(A) + cut/vol(B) with self-looped volumes; the closed form
    is <g_V,g_V> <g_A,g_B> / (<g_A,g_V> <g_B,g_V>).
    """
    if p.a_count == 0 or p.b_count == 0:
        raise UndefinedNcutError("both sides of the partition must be non-empty")
    values = spec.image.flat
    va, vb = values[~p.side], values[p.side]
    sigma = spec.sigma
    ip_ab = kde_inner_product(va, vb, sigma)
    ip_av = kde_inner_product(va, values, sigma)
    ip_bv = kde_inner_product(vb, values, sigma)
    ip_vv = kde_inner_product(values, values, sigma)
    return float(ip_vv * ip_ab / (ip_av * ip_bv))


def grid_ncut_approximation(p, width, height):
    """Short-boundary approximation (|V|/4) * boundary_length / (|A| |B|).

    boundary_length is the grid cut count: the number of 4-neighbor pixel
    pairs whose labels differ.
    """
    if p.a_count == 0 or p.b_count == 0:
        raise UndefinedNcutError("both sides of the partition must be non-empty")
    n = width * height
    if p.n != n:
        raise ValueError("partition size does not match image dimensions")
    boundary = cut_weight(build_grid_graph(width, height), p)
    return float(n / 4.0 * boundary / (p.a_count * p.b_count))


def mixncut_objective(grid, spec, p, lam):
    """(1 - lam) * dense_ncut + lam * grid ncut; lam in [0, 1]."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lam must lie in [0, 1]")
    return float((1.0 - lam) * dense_ncut(spec, p) + lam * ncut_weight(grid, p))


def minimize_mixncut_exhaustive(grid, spec, lam):
    """Exact minimum of the mixed objective by enumerating all bipartitions.

    Only feasible for tiny instances (n <= ~16: 2^(n-1) - 1 candidates).
    Evaluates the dense term from an explicit affinity matrix, a route
    independent of the KDE closed form used elsewhere.  Returns
    (best_value, best_partition).
    """
    n = grid.n
    if n > 20:
        raise ValueError("exhaustive search is limited to n <= 20")
    values = spec.image.flat
    kernel = np.exp(-_pairwise_sq_dists(values, values) / (2.0 * spec.sigma ** 2))
    dense_deg = kernel.sum(axis=1)
    grid_deg = grid.degrees
    best_val, best_part = np.inf, None
    bits = np.arange(n)
    # fix vertex 0 on side A to halve the search space (ncut is A/B symmetric)
    for code in range(1, 1 << (n - 1)):
        side = ((code << 1) >> bits & 1).astype(bool)
        dcut = kernel[~side][:, side].sum()
        dva, dvb = dense_deg[~side].sum(), dense_deg[side].sum()
        gcut = grid.w[side[grid.ei] != side[grid.ej]].sum()
        gva, gvb = grid_deg[~side].sum(), grid_deg[side].sum()
        val = (1.0 - lam) * (dcut / dva + dcut / dvb) + lam * (gcut / gva + gcut / gvb)
        if val < best_val:
            best_val, best_part = val, Bipartition(side)
    return float(best_val), best_part
