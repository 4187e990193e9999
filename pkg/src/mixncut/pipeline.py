"""End-to-end segmentation pipelines.

Two methods share the same spectral back end:

* ``segment_mixncut`` — sampled appearance graph mixed with the pixel grid
  through ``(1 - lam) P_data + lam P_grid``; the mixing is what lets a near-1
  lam supply spatial coherence while the appearance term picks the split.
* ``segment_ncut`` — the classical single-graph baseline whose edges combine
  intensity and proximity in one weight, optionally on Gabor features.

Both return ``(Labeling, diagnostics)`` where diagnostics carry eigenvalues,
independently recomputed residuals, per-stage wall-clock timings, a rendered
second eigenvector, and (for two-region mixncut) the achieved objective value.
"""

from __future__ import annotations

import time

import numpy as np

from .cluster import embed_and_label
from .core import AppearanceImage, Bipartition, substream, vector_to_gray
from .features import gabor_features
from .graph import (
    DenseGraphSpec,
    UndefinedNcutError,
    build_grid_graph,
    dense_ncut,
    ncut_weight,
)
from .sparsify import sample_baseline_edges, sample_data_edges, variance_split_partition
from .spectral import MixedOperator, build_transition, top_eigenpairs

_EXACT_OBJECTIVE_LIMIT = 4096
_OBJECTIVE_SUBSAMPLE = 2048

# stable branch ids for per-stage RNG substreams
_BRANCH_PARTITION = 1
_BRANCH_SAMPLE = 2
_BRANCH_SOLVER = 3
_BRANCH_KMEANS = 4
_BRANCH_OBJECTIVE = 5


def segment_mixncut(image, cfg):
    """Segment an image by the mixed-transition spectral method.

    Stages: variance-split pixel clustering -> importance-sampled appearance
    graph -> transition operators for the sampled graph and the 4-neighbor
    grid -> mixed operator -> top-k eigenpairs -> k-means on eigenvectors
    2..k.  Deterministic given (image, cfg): each stage draws from its own
    substream of ``cfg.seed``.
    """
    diagnostics = {"method": "mixncut", "timings": {}}
    t_start = time.perf_counter()

    clustering = _timed(diagnostics, "partition", lambda: variance_split_partition(
        image, min(cfg.num_clusters, image.n), substream(cfg.seed, _BRANCH_PARTITION)))
    diagnostics["clusters_realized"] = clustering.num_clusters

    m = int(round(cfg.edges_per_pixel * image.n))
    data_graph = _timed(diagnostics, "sample", lambda: sample_data_edges(
        image, clustering, cfg.sigma, m, substream(cfg.seed, _BRANCH_SAMPLE)))
    diagnostics["edges_sampled"] = int(data_graph.ei.size)

    grid_graph = build_grid_graph(image.width, image.height)
    op = _timed(diagnostics, "transition", lambda: MixedOperator(
        build_transition(data_graph), build_transition(grid_graph), cfg.lam))

    pairs = _timed(diagnostics, "eigensolve", lambda: top_eigenpairs(
        op, cfg.regions, tol=cfg.tol, max_applications=cfg.max_applications,
        seed=cfg.seed + _BRANCH_SOLVER, restart_dim=cfg.restart_dim))
    _record_eigen(diagnostics, pairs, image)

    labeling = _timed(diagnostics, "cluster", lambda: embed_and_label(
        pairs, cfg.regions, substream(cfg.seed, _BRANCH_KMEANS)))

    if cfg.regions == 2:
        diagnostics["mixncut_objective"], diagnostics["objective_exact"] = _timed(
            diagnostics, "objective", lambda: _bipartition_objective(
                image, grid_graph, labeling.as_bipartition(), cfg.sigma, cfg.lam,
                substream(cfg.seed, _BRANCH_OBJECTIVE)))

    diagnostics["timings"]["total"] = time.perf_counter() - t_start
    return labeling, diagnostics


def segment_ncut(image, cfg):
    """Segment an image by the classical single-graph spectral baseline.

    Edge weights combine an intensity term (sigma_i) with spatial proximity
    (sigma_x, which also drives where edges are sampled).  With
    ``cfg.use_gabor`` the intensity term runs on 12-channel Gabor responses
    instead of raw values.
    """
    diagnostics = {"method": "ncut-gabor" if cfg.use_gabor else "ncut", "timings": {}}
    t_start = time.perf_counter()

    working = image
    if cfg.use_gabor:
        working = _timed(diagnostics, "features", lambda: gabor_features(image))

    m = int(round(cfg.edges_per_pixel * image.n))
    graph = _timed(diagnostics, "sample", lambda: sample_baseline_edges(
        working, cfg.sigma_i, cfg.sigma_x, m, substream(cfg.seed, _BRANCH_SAMPLE)))
    diagnostics["edges_sampled"] = int(graph.ei.size)

    op = _timed(diagnostics, "transition", lambda: build_transition(graph))
    pairs = _timed(diagnostics, "eigensolve", lambda: top_eigenpairs(
        op, cfg.regions, tol=cfg.tol, max_applications=cfg.max_applications,
        seed=cfg.seed + _BRANCH_SOLVER, restart_dim=cfg.restart_dim))
    _record_eigen(diagnostics, pairs, image)

    labeling = _timed(diagnostics, "cluster", lambda: embed_and_label(
        pairs, cfg.regions, substream(cfg.seed, _BRANCH_KMEANS)))

    diagnostics["timings"]["total"] = time.perf_counter() - t_start
    return labeling, diagnostics


def _timed(diagnostics, stage, fn):
    t0 = time.perf_counter()
    result = fn()
    diagnostics["timings"][stage] = time.perf_counter() - t0
    return result


def _record_eigen(diagnostics, pairs, image):
    diagnostics["eigenvalues"] = [p.value for p in pairs]
    diagnostics["residuals"] = [p.residual for p in pairs]
    diagnostics["complex_pairs"] = [p.is_complex_pair for p in pairs]
    second = pairs[1].vector if len(pairs) > 1 else pairs[0].vector
    diagnostics["eig2"] = vector_to_gray(second, image.width, image.height)


def _bipartition_objective(image, grid_graph, p, sigma, lam, rng):
    """(objective, exact?) for a two-region result.

    Exact when the image is small enough for the full pairwise appearance
    term; otherwise the appearance term is estimated on a stratified pixel
    subsample (the grid term stays exact either way).  Returns (None, True)
    when one side is empty, where the objective is undefined.
    """
    side = p.side
    try:
        grid_term = ncut_weight(grid_graph, p)
    except UndefinedNcutError:
        return None, True
    if image.n <= _EXACT_OBJECTIVE_LIMIT:
        dense_term = dense_ncut(DenseGraphSpec(image, sigma), p)
        return (1.0 - lam) * dense_term + lam * grid_term, True
    idx = _stratified_subsample(side, _OBJECTIVE_SUBSAMPLE, rng)
    sub_image = AppearanceImage(image.flat[idx].reshape(idx.size, 1, image.dim))
    dense_term = dense_ncut(DenseGraphSpec(sub_image, sigma), Bipartition(side[idx]))
    return (1.0 - lam) * dense_term + lam * grid_term, False


def _stratified_subsample(side, size, rng):
    """Pick about `size` pixel indices keeping both sides represented."""
    n = side.size
    if n <= size:
        return np.arange(n)
    idx_b = np.flatnonzero(side)
    idx_a = np.flatnonzero(~side)
    take_b = min(idx_b.size, max(1, int(round(size * idx_b.size / n))))
    take_a = min(idx_a.size, size - take_b)
    picks = [
        part[rng.permutation(part.size)[:take]]
        for part, take in ((idx_a, take_a), (idx_b, take_b))
    ]
    out = np.concatenate(picks)
    out.sort()
    return out
