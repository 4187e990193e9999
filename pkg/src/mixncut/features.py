"""Gabor texture features.

A bank of 12 complex Gabor filters (wavelengths 4, 8, 16 pixels x
orientations 0, 45, 90, 135 degrees) turns a grayscale or color image
into a 12-channel response-magnitude image.  Each channel is rescaled to
[0, 255] so the feature image plugs into the same affinity machinery as
raw intensities.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import fftconvolve

from .core import AppearanceImage

WAVELENGTHS = (4.0, 8.0, 16.0)
ORIENTATIONS = (0.0, np.pi / 4, np.pi / 2, 3 * np.pi / 4)


def gabor_bank(wavelengths=WAVELENGTHS, orientations=ORIENTATIONS):
    """Complex Gabor kernels, one per (wavelength, orientation) combination.

    Each kernel is a Gaussian envelope (std = half the wavelength,
    truncated at three stds) times a complex sinusoid along the
    orientation axis.  The even (real) part is corrected to zero DC so a
    constant image produces zero response; the odd part is DC-free by
    symmetry.
    """
    if not wavelengths or not orientations:
        raise ValueError("need at least one wavelength and one orientation")
    if any(wl <= 0 for wl in wavelengths):
        raise ValueError("wavelengths must be positive")
    kernels = []
    for wl in wavelengths:
        sigma = 0.5 * wl
        radius = int(np.ceil(3.0 * sigma))
        coords = np.arange(-radius, radius + 1, dtype=np.float64)
        x = coords[None, :]  # column offset
        y = coords[:, None]  # row offset
        envelope = np.exp(-(x * x + y * y) / (2.0 * sigma * sigma))
        for theta in orientations:
            proj = x * np.cos(theta) + y * np.sin(theta)
            phase = 2.0 * np.pi * proj / wl
            real = envelope * np.cos(phase)
            real -= envelope * (real.sum() / envelope.sum())
            imag = envelope * np.sin(phase)
            kernels.append(real + 1j * imag)
    return kernels


def gabor_features(image):
    """12-channel Gabor response magnitudes of an image, per-channel in [0, 255].

    Color images are first collapsed to the channel mean; borders are
    reflect-padded so response magnitudes stay comparable near edges.
    """
    gray = image.data[:, :, 0] if image.dim == 1 else image.data.mean(axis=2)
    channels = []
    for kern in gabor_bank():
        radius = kern.shape[0] // 2
        padded = np.pad(gray, radius, mode="reflect")
        resp_r = fftconvolve(padded, kern.real, mode="valid")
        resp_i = fftconvolve(padded, kern.imag, mode="valid")
        mag = np.sqrt(resp_r * resp_r + resp_i * resp_i)
        lo, hi = mag.min(), mag.max()
        # the kernels are zero-DC, so a response at round-off scale relative
        # to the input is zero, not structure to be stretched to [0, 255]
        floor = 1e-8 * max(1.0, float(np.abs(gray).max()))
        if hi > lo and hi > floor:
            mag = (mag - lo) * (255.0 / (hi - lo))
        else:
            mag = np.zeros_like(mag)
        channels.append(mag)
    return AppearanceImage(np.stack(channels, axis=2))
