"""End-to-end tests for both segmentation pipelines."""

import numpy as np
import pytest

from helpers import flat_halves

from mixncut.bench import (
    compose,
    default_palette,
    ground_truth_pattern,
    jaccard_accuracy,
    synth_texture,
)
from mixncut.core import AppearanceImage, MixConfig, NcutConfig, substream
from mixncut.graph import (
    DenseGraphSpec,
    build_grid_graph,
    minimize_mixncut_exhaustive,
    mixncut_objective,
)
from mixncut.pipeline import segment_mixncut, segment_ncut

_TIMING_STAGES = {"partition", "sample", "transition", "eigensolve", "cluster", "total"}


def _halves_gt(width, height):
    return ground_truth_pattern("vertical-halves", height, width).mask


def test_mixncut_recovers_flat_halves():
    image = flat_halves(32, 32)
    cfg = MixConfig(lam=0.995, sigma=30.0, seed=0)
    labeling, diag = segment_mixncut(image, cfg)

    assert jaccard_accuracy(labeling.as_bipartition(), _halves_gt(32, 32)) == 1.0

    assert diag["method"] == "mixncut"
    assert _TIMING_STAGES | {"objective"} <= set(diag["timings"])
    assert diag["clusters_realized"] >= 2
    assert diag["edges_sampled"] > 0
    assert len(diag["eigenvalues"]) == 2
    assert diag["eigenvalues"][0] == pytest.approx(1.0, abs=1e-8)
    assert all(r <= 1e-7 for r in diag["residuals"])
    assert diag["complex_pairs"] == [False, False]
    assert diag["eig2"].shape == (32, 32) and diag["eig2"].dtype == np.uint8

    # the reported objective must equal an independent recomputation
    assert diag["objective_exact"] is True
    expected = mixncut_objective(
        build_grid_graph(32, 32), DenseGraphSpec(image, 30.0),
        labeling.as_bipartition(), 0.995,
    )
    assert diag["mixncut_objective"] == pytest.approx(expected, abs=1e-10)


def test_mixncut_deterministic():
    image = flat_halves(32, 32)
    cfg = MixConfig(lam=0.995, sigma=30.0, seed=4)
    lab_a, diag_a = segment_mixncut(image, cfg)
    lab_b, diag_b = segment_mixncut(image, cfg)
    np.testing.assert_array_equal(lab_a.labels, lab_b.labels)
    assert diag_a["eigenvalues"] == diag_b["eigenvalues"]
    np.testing.assert_array_equal(diag_a["eig2"], diag_b["eig2"])
    assert diag_a["mixncut_objective"] == diag_b["mixncut_objective"]


def test_two_region_split_is_a_threshold_of_the_second_eigenvector():
    image = flat_halves(32, 32)
    labeling, diag = segment_mixncut(image, MixConfig(lam=0.995, sigma=30.0, seed=2))
    side = labeling.as_bipartition().side
    render = diag["eig2"].reshape(-1).astype(int)
    a, b = render[~side], render[side]
    assert a.max() <= b.min() or b.max() <= a.min()


def test_ncut_recovers_flat_halves():
    image = flat_halves(32, 32)
    cfg = NcutConfig(sigma_i=40.0, sigma_x=50.0, seed=0)
    labeling, diag = segment_ncut(image, cfg)
    assert diag["method"] == "ncut"
    assert jaccard_accuracy(labeling.as_bipartition(), _halves_gt(32, 32)) >= 0.99

    lab_b, _ = segment_ncut(image, cfg)
    np.testing.assert_array_equal(labeling.labels, lab_b.labels)


def test_gabor_features_rescue_equal_intensity_textures():
    # same wavelength, same mean, same contrast -- orientation is the only cue
    gt = ground_truth_pattern("centered-disk", 96, 96)
    g1 = synth_texture("grating", {"wavelength": 4.0, "orientation": 0.0,
                                   "mid": 128.0, "contrast": 64.0}, 96)
    g2 = synth_texture("grating", {"wavelength": 4.0, "orientation": np.pi / 2,
                                   "mid": 128.0, "contrast": 64.0}, 96)
    comp, mask = compose(g1, g2, gt)

    scores = {}
    for use_gabor in (False, True):
        cfg = NcutConfig(sigma_i=60.0, sigma_x=20.0, use_gabor=use_gabor, seed=5)
        labeling, diag = segment_ncut(comp, cfg)
        assert diag["method"] == ("ncut-gabor" if use_gabor else "ncut")
        scores[use_gabor] = jaccard_accuracy(labeling.as_bipartition(), mask)

    assert scores[True] >= 0.9
    assert scores[True] > scores[False]


def test_achieved_objective_bounded_by_exhaustive_minimum():
    rng = substream(21)
    image = AppearanceImage(rng.uniform(0.0, 255.0, (3, 4)))
    cfg = MixConfig(lam=0.7, sigma=30.0, edges_per_pixel=8.0, num_clusters=8, seed=1)
    labeling, diag = segment_mixncut(image, cfg)

    grid = build_grid_graph(image.width, image.height)
    spec = DenseGraphSpec(image, 30.0)
    best_val, best_part = minimize_mixncut_exhaustive(grid, spec, 0.7)
    assert best_part.n == image.n
    assert diag["mixncut_objective"] >= best_val - 1e-10


def test_pure_grid_mixture_splits_along_the_long_axis():
    rng = substream(22)
    image = AppearanceImage(rng.uniform(0.0, 255.0, (24, 40)))
    cfg = MixConfig(lam=1.0, sigma=30.0, num_clusters=16, seed=0)
    labeling, _ = segment_mixncut(image, cfg)
    # at lam=1 only the grid matters: the split is the centered vertical cut
    assert jaccard_accuracy(labeling.as_bipartition(), _halves_gt(40, 24)) == 1.0


def test_three_region_bands_recovered_exactly():
    band = np.zeros((24, 24))
    band[:, 8:16] = 128.0
    band[:, 16:] = 255.0
    image = AppearanceImage(band)
    cfg = MixConfig(lam=0.9, sigma=10.0, num_clusters=16, regions=3, seed=0)
    labeling, diag = segment_mixncut(image, cfg)

    expected = np.zeros((24, 24), dtype=np.int64)
    expected[:, 8:16] = 1
    expected[:, 16:] = 2
    np.testing.assert_array_equal(labeling.labels.reshape(24, 24), expected)
    assert len(diag["eigenvalues"]) == 3
    assert "mixncut_objective" not in diag  # only reported for two regions


def test_large_image_objective_uses_subsample():
    palette = default_palette(72)
    pattern = ground_truth_pattern("vertical-halves", 72, 72)
    comp, mask = compose(palette["vert-stripes"], palette["horiz-stripes"], pattern)
    labeling, diag = segment_mixncut(comp, MixConfig(lam=0.995, sigma=1.0, seed=0))
    assert diag["objective_exact"] is False
    assert np.isfinite(diag["mixncut_objective"])
    assert diag["mixncut_objective"] >= 0.0
    assert jaccard_accuracy(labeling.as_bipartition(), mask) >= 0.9
