"""Randomized sparsification of the dense appearance graph.

The dense graph has n^2 implicit edges; we keep cuts approximately intact
with m sampled, reweighted edges.  Sampling is guided by a low-variance
pixel clustering: pairs of clusters (a, b) are proposed proportionally to

    q(a, b) = |S_a| |S_b| exp(-||m_a - m_b||^2 / (2 sigma^2)),

then a uniform pixel from each side, and the edge weight is reweighted by
|S_a||S_b| w(i,j) / q(a,b) so every edge's expected sampled weight is
proportional to its true weight.  A second sampler draws spatially local
edges for the classical single-graph baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SparseGraph, substream
from .cluster import kmeans
from .graph import _pairwise_sq_dists

_ZERO_SSE = 1e-9  # clusters with total squared deviation below this are "constant"


@dataclass(frozen=True)
class PixelClustering:
    """Partition of pixels into appearance clusters.

    assignments : (n,) cluster id per pixel, ids in [0, L).
    sizes       : (L,) member counts, all positive.
    means       : (L, d) per-cluster appearance means.
    sse         : (L,) per-cluster sums of squared deviations from the mean.
    """

    assignments: np.ndarray
    sizes: np.ndarray
    means: np.ndarray
    sse: np.ndarray

    @property
    def num_clusters(self):
        return self.sizes.size

    @property
    def n(self):
        return self.assignments.size


def _cluster_stats(values, idx):
    vals = values[idx]
    mean = vals.mean(axis=0)
    diff = vals - mean
    return mean, float((diff * diff).sum())


def variance_split_partition(image, num_clusters, seed):
    """Split pixels into at most num_clusters appearance clusters.

    Starts from one cluster and repeatedly splits the cluster with the
    largest total appearance variance (ties to the lowest id) using 2-means
    on the appearance vectors.  Stops early when every remaining cluster is
    constant (or unsplittable), so the realized cluster count may be smaller
    than requested.
    """
    if num_clusters < 1:
        raise ValueError("num_clusters must be at least 1")
    values = image.flat
    n = values.shape[0]
    target = min(num_clusters, n)
    rng = seed if isinstance(seed, np.random.Generator) else substream(seed)

    members = [np.arange(n, dtype=np.int64)]
    stats = [_cluster_stats(values, members[0])]
    splittable = [True]
    while len(members) < target:
        best, best_sse = -1, _ZERO_SSE
        for cid, (_, sse) in enumerate(stats):
            if splittable[cid] and sse > best_sse:
                best, best_sse = cid, sse
        if best < 0:
            break
        idx = members[best]
        labels, _, _ = kmeans(values[idx], 2, rng)
        left, right = idx[labels == 0], idx[labels == 1]
        if left.size == 0 or right.size == 0:
            splittable[best] = False
            continue
        members[best] = left
        stats[best] = _cluster_stats(values, left)
        members.append(right)
        stats.append(_cluster_stats(values, right))
        splittable.append(True)

    assignments = np.empty(n, dtype=np.int64)
    for cid, idx in enumerate(members):
        assignments[idx] = cid
    return PixelClustering(
        assignments=assignments,
        sizes=np.array([idx.size for idx in members], dtype=np.int64),
        means=np.vstack([m for m, _ in stats]),
        sse=np.array([s for _, s in stats]),
    )


@dataclass(frozen=True)
class PairWeightTable:
    """Sampling table over unordered cluster pairs {a, b}, a <= b.

    q holds q(a,b) per pair (q(a,a) = |S_a|^2 on the diagonal).  The
    sampling weight doubles off-diagonal entries, which makes drawing an
    unordered pair here equivalent to drawing an ordered pair (a, b)
    proportionally to q(a, b) over all L^2 ordered pairs.

    With full redraw of i=j rejections, each accepted draw contributes
    expected weight w(i,j) * 2/(q_ordered_total - n) to every pixel pair
    {i, j}, i != j, so an m-draw graph G' satisfies
    E[cut(A,B|G')] * q_total / m = cut(A,B|G_data) with
    q_total = (q_ordered_total - n)/2.
    """

    pair_a: np.ndarray
    pair_b: np.ndarray
    q: np.ndarray
    mean_sq_dists: np.ndarray
    sampling_weights: np.ndarray
    cum_weights: np.ndarray
    n: int

    @property
    def q_ordered_total(self):
        return float(self.cum_weights[-1])

    @property
    def q_total(self):
        """Normalizer of the cut estimator: cut_hat = cut(G') * q_total / m."""
        return (self.q_ordered_total - self.n) / 2.0


def cluster_pair_weights(clustering, sigma):
    """Build the q(a,b) proposal table for a clustering and bandwidth."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    sizes = clustering.sizes.astype(np.float64)
    d2 = _pairwise_sq_dists(clustering.means, clustering.means)
    q_full = np.outer(sizes, sizes) * np.exp(-d2 / (2.0 * sigma * sigma))
    iu_a, iu_b = np.triu_indices(sizes.size)
    q = q_full[iu_a, iu_b]
    sampling = np.where(iu_a == iu_b, q, 2.0 * q)
    return PairWeightTable(
        pair_a=iu_a.astype(np.int64),
        pair_b=iu_b.astype(np.int64),
        q=q,
        mean_sq_dists=d2[iu_a, iu_b],
        sampling_weights=sampling,
        cum_weights=np.cumsum(sampling),
        n=int(clustering.sizes.sum()),
    )


def sample_data_edges(image, clustering, sigma, m, seed):
    """Draw m reweighted edges from the dense appearance graph.

    Per draw: pick a cluster pair proportionally to q, then one uniform
    pixel from each side; i = j draws are rejected and fully redrawn.  The
    reweighted edge weight |S_a||S_b| w(i,j)/q(a,b) simplifies to
    exp((||m_a - m_b||^2 - ||I(i) - I(j)||^2) / (2 sigma^2)), which is the
    form computed here (stable even when q underflows).  Repeated edges
    accumulate weight; the result has no self-loops.
    """
    m = int(m)
    if m < 0:
        raise ValueError("m must be nonnegative")
    values = image.flat
    n = values.shape[0]
    if m == 0 or n < 2:
        return SparseGraph(n, [], [], [])
    rng = seed if isinstance(seed, np.random.Generator) else substream(seed)
    table = cluster_pair_weights(clustering, sigma)
    accept_mass = table.q_ordered_total - table.n  # rejected i=j mass is exactly n
    if accept_mass <= 1e-12 * table.q_ordered_total:
        # proposal has (numerically) no mass on valid i != j pairs; nothing to sample
        return SparseGraph(n, [], [], [])

    order = np.argsort(clustering.assignments, kind="stable")
    starts = np.concatenate([[0], np.cumsum(clustering.sizes)])
    sizes = clustering.sizes
    inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma)

    got_i, got_j, got_w = [], [], []
    pending = m
    while pending > 0:
        u = rng.random(pending) * table.q_ordered_total
        p = np.minimum(
            np.searchsorted(table.cum_weights, u, side="right"),
            table.cum_weights.size - 1,
        )
        a, b = table.pair_a[p], table.pair_b[p]
        pick_i = np.minimum((rng.random(pending) * sizes[a]).astype(np.int64), sizes[a] - 1)
        pick_j = np.minimum((rng.random(pending) * sizes[b]).astype(np.int64), sizes[b] - 1)
        i = order[starts[a] + pick_i]
        j = order[starts[b] + pick_j]
        ok = i != j
        if ok.any():
            diff = values[i[ok]] - values[j[ok]]
            dij_sq = np.sum(diff * diff, axis=1)
            got_i.append(i[ok])
            got_j.append(j[ok])
            got_w.append(np.exp((table.mean_sq_dists[p[ok]] - dij_sq) * inv_two_sigma_sq))
        pending = int((~ok).sum())
    return SparseGraph(n, np.concatenate(got_i), np.concatenate(got_j), np.concatenate(got_w))


def sample_baseline_edges(image, sigma_i, sigma_x, m, seed, chunk=1 << 17):
    """Draw m spatially local edges for the classical single-graph baseline.

    Per draw: a uniform pixel i, a location x ~ Normal(X(i), sigma_x^2 I)
    in (row, col) coordinates, and j the pixel nearest to x (coordinates
    rounded then clamped to the image bounds).  i = j draws are rejected
    and fully redrawn.  The edge weight is the appearance affinity
    exp(-||I(i)-I(j)||^2 / (2 sigma_i^2)); the spatial factor lives in the
    proposal, not the weight.  Repeated edges accumulate.
    """
    m = int(m)
    if m < 0:
        raise ValueError("m must be nonnegative")
    if sigma_i <= 0 or sigma_x <= 0:
        raise ValueError("sigma_i and sigma_x must be positive")
    values = image.flat
    n = values.shape[0]
    if m == 0 or n < 2:
        return SparseGraph(n, [], [], [])
    rng = seed if isinstance(seed, np.random.Generator) else substream(seed)
    width, height = image.width, image.height
    inv_two_sigma_sq = 1.0 / (2.0 * sigma_i * sigma_i)

    got_i, got_j, got_w = [], [], []
    pending = m
    while pending > 0:
        count = min(pending, chunk)
        i = rng.integers(0, n, count)
        offsets = rng.normal(0.0, sigma_x, (count, 2))
        jr = np.clip(np.rint(i // width + offsets[:, 0]), 0, height - 1).astype(np.int64)
        jc = np.clip(np.rint(i % width + offsets[:, 1]), 0, width - 1).astype(np.int64)
        j = jr * width + jc
        ok = i != j
        if ok.any():
            diff = values[i[ok]] - values[j[ok]]
            dij_sq = np.sum(diff * diff, axis=1)
            got_i.append(i[ok])
            got_j.append(j[ok])
            got_w.append(np.exp(-dij_sq * inv_two_sigma_sq))
        pending -= int(ok.sum())
    return SparseGraph(n, np.concatenate(got_i), np.concatenate(got_j), np.concatenate(got_w))
