"""Tests for the oriented band-pass texture feature bank."""

import numpy as np
import pytest

from mixncut.core import AppearanceImage
from mixncut.features import ORIENTATIONS, WAVELENGTHS, gabor_bank, gabor_features


def test_bank_shape_and_zero_mean():
    kernels = gabor_bank()
    assert len(kernels) == len(WAVELENGTHS) * len(ORIENTATIONS) == 12
    for k in kernels:
        h, w = k.shape
        assert h == w and h % 2 == 1
        assert abs(k.sum()) <= 1e-10 * np.abs(k).sum()


def test_constant_image_gives_zero_features():
    img = AppearanceImage(np.full((10, 14), 137.0))
    feats = gabor_features(img).data
    assert feats.shape == (10, 14, 12)
    np.testing.assert_allclose(feats, 0.0, atol=1e-9)


def _grating(wavelength, theta, size=48):
    yy, xx = np.mgrid[0:size, 0:size]
    phase = 2.0 * np.pi * (np.cos(theta) * xx + np.sin(theta) * yy) / wavelength
    return 128.0 + 64.0 * np.sin(phase)


def test_matched_channel_responds_strongest():
    # wavelength-8 vertical grating: channel index 4 is (wavelength 8, angle 0)
    feats = gabor_features(AppearanceImage(_grating(8, 0.0))).data
    means = feats.reshape(-1, 12).mean(axis=0)
    assert int(np.argmax(means)) == 4

    # rotate by 90 degrees: the matched channel moves to (wavelength 8, pi/2)
    feats = gabor_features(AppearanceImage(_grating(8, np.pi / 2))).data
    means = feats.reshape(-1, 12).mean(axis=0)
    assert int(np.argmax(means)) == 6


def test_feature_separates_equal_intensity_textures():
    size = 48
    left = _grating(4, 0.0, size)
    right = _grating(4, np.pi / 2, size)
    data = np.where(np.arange(size)[None, :] < size // 2, left, right)
    feats = gabor_features(AppearanceImage(data)).data

    interior = feats[8:-8, :, :]
    half = size // 2
    a = interior[:, 8:half - 8, :].reshape(-1, 12)
    b = interior[:, half + 8:-8, :].reshape(-1, 12)
    gap = np.abs(a.mean(axis=0) - b.mean(axis=0))
    pooled = 0.5 * (a.std(axis=0) + b.std(axis=0)) + 1e-9
    # at least one channel separates the two textures by a wide margin
    assert np.max(gap / pooled) >= 5.0


def test_color_input_collapses_to_gray():
    rng = np.random.default_rng(31)
    gray = rng.uniform(0, 255, (12, 9))
    color = np.repeat(gray[:, :, None], 3, axis=2)
    f_gray = gabor_features(AppearanceImage(gray)).data
    f_color = gabor_features(AppearanceImage(color)).data
    np.testing.assert_allclose(f_color, f_gray, atol=1e-9)


def test_translation_equivariance_in_interior():
    size = 128

    def blob_image(r0, c0):
        data = np.full((size, size), 40.0)
        data[r0:r0 + 20, c0:c0 + 20] = 220.0
        return AppearanceImage(data)

    f0 = gabor_features(blob_image(54, 54)).data
    f1 = gabor_features(blob_image(58, 60)).data
    # shifting the blob by (4, 6) shifts the features by (4, 6) away from
    # the image border; the interior crops must agree
    np.testing.assert_allclose(
        f0[40:88, 40:88, :], f1[44:92, 46:94, :], atol=1e-9
    )


def test_rejects_bad_bank_parameters():
    with pytest.raises(ValueError):
        gabor_bank(wavelengths=())
    with pytest.raises(ValueError):
        gabor_bank(wavelengths=(0,))
