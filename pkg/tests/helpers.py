"""Shared generators for the test suite."""

import numpy as np

from mixncut.core import AppearanceImage, Bipartition, SparseGraph


def random_image(rng, max_pixels=64, dims=(1, 3)):
    """Random small image with at most max_pixels pixels and d drawn from dims."""
    height = int(rng.integers(1, 9))
    width = int(rng.integers(1, max_pixels // height + 1))
    d = int(rng.choice(dims))
    return AppearanceImage(rng.uniform(0.0, 255.0, (height, width, d)))


def random_bipartition(rng, n):
    """Random bipartition with both sides non-empty (needs n >= 2)."""
    side = rng.random(n) < 0.5
    if not side.any():
        side[int(rng.integers(n))] = True
    if side.all():
        side[int(rng.integers(n))] = False
    return Bipartition(side)


def random_connected_graph(n, rng):
    """Random connected weighted graph: a spanning path plus extra edges."""
    perm = rng.permutation(n)
    ei = list(perm[:-1])
    ej = list(perm[1:])
    extra = max(2, n)
    ei += list(rng.integers(0, n, extra))
    ej += list(rng.integers(0, n, extra))
    w = rng.random(len(ei)) + 0.05
    g = SparseGraph(n, ei, ej, w)
    loops = g.ei == g.ej
    if loops.any():
        keep = ~loops
        g = SparseGraph(n, g.ei[keep], g.ej[keep], g.w[keep])
    return g


def dense_weight_matrix(g):
    """Symmetric dense weight matrix implied by a SparseGraph (loops once)."""
    w = np.zeros((g.n, g.n))
    for i, j, wt in zip(g.ei, g.ej, g.w):
        w[i, j] += wt
        if i != j:
            w[j, i] += wt
    return w


def flat_halves(width, height, lo=64.0, hi=192.0):
    """Flat two-intensity image: left half lo, right half hi."""
    data = np.full((height, width), lo)
    data[:, width // 2 :] = hi
    return AppearanceImage(data)
