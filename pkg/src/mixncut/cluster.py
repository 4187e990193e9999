"""k-means clustering, used on appearance vectors and on spectral embeddings."""

from __future__ import annotations

import numpy as np

from .core import Labeling, substream
from .graph import _pairwise_sq_dists


def kmeans(points, k, seed, max_iter=100):
    """Lloyd's algorithm with k-means++ seeding.

    Parameters
    ----------
    points : (n, d) array of observations.
    k : number of clusters, 1 <= k <= n.
    seed : integer seed, or a numpy Generator to draw from directly.
    max_iter : iteration cap (assignments usually stabilize much earlier).

    Returns
    -------
    labels : (n,) int array of cluster ids in [0, k).
    centers : (k, d) array of final cluster centers.
    objective : final sum of squared distances to assigned centers.

    Empty clusters are re-seeded from the point farthest from its assigned
    center.  The objective is non-increasing over iterations (asserted).
    Ties in the assignment step go to the lowest cluster id, so the result
    is a pure function of (points, k, seed).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.ndim != 2:
        raise ValueError("points must be a 2-D array")
    n = pts.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = seed if isinstance(seed, np.random.Generator) else substream(seed)

    centers = _plusplus_seed(pts, k, rng)
    labels = np.zeros(n, dtype=np.int64)
    prev_objective = np.inf
    for _ in range(max_iter):
        d2 = _pairwise_sq_dists(pts, centers)
        new_labels = np.argmin(d2, axis=1)
        objective = float(d2[np.arange(n), new_labels].sum())
        # Lloyd monotonicity: assignment against the centers that produced
        # the previous objective can only improve it (tiny slack for rounding)
        assert objective <= prev_objective * (1 + 1e-12) + 1e-12
        if np.array_equal(new_labels, labels) and prev_objective < np.inf:
            labels = new_labels
            break
        labels = new_labels
        prev_objective = objective
        counts = np.bincount(labels, minlength=k)
        for c in range(k):
            if counts[c] > 0:
                centers[c] = pts[labels == c].mean(axis=0)
        empty = np.flatnonzero(counts == 0)
        if empty.size:
            dist_to_own = d2[np.arange(n), labels]
            for c in empty:
                far = int(np.argmax(dist_to_own))
                centers[c] = pts[far]
                dist_to_own[far] = -1.0  # don't hand the same point to two clusters
    d2 = _pairwise_sq_dists(pts, centers)
    labels = np.argmin(d2, axis=1)
    objective = float(d2[np.arange(n), labels].sum())
    return labels, centers, objective


def _plusplus_seed(pts, k, rng):
    """k-means++ style probabilistic farthest-point seeding."""
    n = pts.shape[0]
    centers = np.empty((k, pts.shape[1]))
    first = int(rng.integers(n))
    centers[0] = pts[first]
    if k == 1:
        return centers
    closest = _pairwise_sq_dists(pts, centers[:1])[:, 0]
    for c in range(1, k):
        total = closest.sum()
        if total <= 0:
            pick = int(rng.integers(n))  # all points coincide with a center
        else:
            pick = int(rng.choice(n, p=closest / total))
        centers[c] = pts[pick]
        d_new = _pairwise_sq_dists(pts, centers[c : c + 1])[:, 0]
        np.minimum(closest, d_new, out=closest)
    return centers


def embed_and_label(eigenpairs, k, seed):
    """Cluster pixels on the eigenvectors of ranks 2..k into k regions.

    The embedding of each pixel is (v_2[i], ..., v_k[i]) — k-1 coordinates,
    skipping the constant leading eigenvector.  Labels are renumbered by
    first pixel occurrence so identical segmentations always get identical
    label ids.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if len(eigenpairs) < k:
        raise ValueError(f"need at least {k} eigenpairs, got {len(eigenpairs)}")
    embedding = np.column_stack([eigenpairs[r].vector for r in range(1, k)])
    labels, _, _ = kmeans(embedding, k, seed)
    return Labeling(labels, k).canonicalized()
