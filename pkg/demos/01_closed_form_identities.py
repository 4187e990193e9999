"""Why the dense appearance graph never needs to be materialized.

The appearance graph connects every pixel pair with weight
exp(-||I_i - I_j||^2 / (2 sigma^2)).  Storing it costs O(n^2) -- hopeless for
real images.  But its cut and normalized-cut values equal inner products of
kernel density estimates of the two regions' intensity distributions, which
cost O(n^2) arithmetic with O(n) memory and, more importantly, admit unbiased
sampling (see demo 02).  This script checks the identities numerically on an
image small enough to brute-force.
"""

import numpy as np

from mixncut import (
    AppearanceImage,
    Bipartition,
    DenseGraphSpec,
    SparseGraph,
    dense_cut_bruteforce,
    dense_ncut,
    kde_cut_closed_form,
    ncut_weight,
)
from mixncut.core import substream

rng = substream(2024)
image = AppearanceImage(rng.uniform(0.0, 255.0, (6, 8, 3)))
part = Bipartition(rng.random(image.n) < 0.4)
sigma = 30.0
spec = DenseGraphSpec(image, sigma)

# --- identity 1: the cut as a density inner product -----------------------
brute = dense_cut_bruteforce(spec, part)            # O(n^2) pair loop
closed = kde_cut_closed_form(spec, part)            # density inner product
print(f"cut     brute force = {brute:.12f}")
print(f"cut     closed form = {closed:.12f}")
print(f"        rel diff    = {abs(brute - closed) / brute:.2e}")

# the same identity holds under numerical integration of the densities
gray = AppearanceImage(image.data.mean(axis=2))     # quadrature is 1-D only
gray_spec = DenseGraphSpec(gray, sigma)
analytic = kde_cut_closed_form(gray_spec, part)
quad = kde_cut_closed_form(gray_spec, part, mode="quadrature")
print(f"cut     quadrature  = {quad:.12f} (analytic {analytic:.12f})")

# --- identity 2: ncut without the graph -----------------------------------
# materialize the dense self-looped graph once, just to show they agree
n = image.n
values = image.flat
d2 = ((values[:, None, :] - values[None, :, :]) ** 2).sum(axis=2)
w = np.exp(-d2 / (2.0 * sigma * sigma))
iu, ju = np.triu_indices(n, k=1)
graph = SparseGraph(
    n,
    np.concatenate([iu, np.arange(n)]),
    np.concatenate([ju, np.arange(n)]),
    np.concatenate([w[iu, ju], np.ones(n)]),
)
explicit = ncut_weight(graph, part)
implicit = dense_ncut(spec, part)
print(f"ncut    explicit    = {explicit:.12f}")
print(f"ncut    closed form = {implicit:.12f}")
print(f"        rel diff    = {abs(explicit - implicit) / explicit:.2e}")
