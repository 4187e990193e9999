"""Shared domain types, RNG derivation, and image I/O.

Pixel indexing is row-major everywhere: pixel j of a WxH image sits at
(row, col) = (j // W, j % W).  Appearance channels are kept on the raw
[0, 255] scale (not normalized), so bandwidth parameters are meaningful
in intensity units.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field

import numpy as np
from PIL import Image, UnidentifiedImageError


class ImageFormatError(ValueError):
    """Input file is not one of the supported raster formats (PGM/PPM/PNG)."""


class ImageSizeError(ValueError):
    """Raster has zero width or height."""


def substream(seed, *branch):
    """Derive an independent Generator from a base seed and a branch key.

    Every stochastic stage of the library draws from its own substream so
    results are a pure function of (inputs, seed) no matter how stages are
    reordered internally or how many threads run them.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(b) for b in branch]
    return np.random.default_rng(np.random.SeedSequence(entropy))


@dataclass(frozen=True)
class AppearanceImage:
    """A WxH raster of d-dimensional appearance vectors.

    data has shape (height, width, dim) as float64.  d=1 for grayscale,
    d=3 for color, d=12 for filter-bank features.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3:
            raise ValueError(f"expected 2-D or 3-D pixel data, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1 or arr.shape[2] < 1:
            raise ImageSizeError(f"degenerate image shape {arr.shape}")
        object.__setattr__(self, "data", arr)

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def dim(self):
        return self.data.shape[2]

    @property
    def n(self):
        """Pixel count |V|."""
        return self.data.shape[0] * self.data.shape[1]

    @property
    def flat(self):
        """(n, dim) view of the pixel values in row-major pixel order."""
        return self.data.reshape(-1, self.data.shape[2])

    def locations(self):
        """(n, 2) array of (row, col) coordinates in pixel order."""
        rows, cols = np.divmod(np.arange(self.n), self.width)
        return np.column_stack([rows, cols]).astype(np.float64)


def index_to_location(j, image):
    """Map flat pixel index j to its (row, col); inverse of location_to_index."""
    j = int(j)
    if not 0 <= j < image.n:
        raise IndexError(f"pixel index {j} out of range for {image.width}x{image.height}")
    return j // image.width, j % image.width


def location_to_index(row, col, image):
    row, col = int(row), int(col)
    if not (0 <= row < image.height and 0 <= col < image.width):
        raise IndexError(f"location ({row}, {col}) out of range")
    return row * image.width + col


class SparseGraph:
    """Undirected weighted graph with vertices 0..n-1.

    Edges are stored once per unordered pair in canonical order (i <= j,
    sorted lexicographically, duplicates merged).  Self-loops are allowed;
    a self-loop contributes its weight once to its vertex degree, matching
    degree(i) = sum_j w(i, j) of the implied symmetric weight matrix.
    """

    def __init__(self, n, ei, ej, w):
        self.n = int(n)
        ei = np.asarray(ei, dtype=np.int64)
        ej = np.asarray(ej, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        if not (ei.shape == ej.shape == w.shape):
            raise ValueError("edge arrays must have identical length")
        if ei.size and (ei.min() < 0 or ej.min() < 0 or max(ei.max(), ej.max()) >= self.n):
            raise ValueError("edge endpoint out of range")
        if np.any(w < 0):
            raise ValueError("negative edge weight")
        lo = np.minimum(ei, ej)
        hi = np.maximum(ei, ej)
        key = lo * self.n + hi
        uniq, inverse = np.unique(key, return_inverse=True)
        merged = np.bincount(inverse, weights=w, minlength=uniq.size)
        self.ei = (uniq // self.n).astype(np.int64)
        self.ej = (uniq % self.n).astype(np.int64)
        self.w = merged
        self._degrees = None

    @property
    def num_edges(self):
        return self.ei.size

    @property
    def degrees(self):
        """Per-vertex total incident weight (self-loops counted once)."""
        if self._degrees is None:
            d = np.bincount(self.ei, weights=self.w, minlength=self.n)
            d += np.bincount(self.ej, weights=self.w, minlength=self.n)
            loop = self.ei == self.ej
            if loop.any():
                d -= np.bincount(self.ei[loop], weights=self.w[loop], minlength=self.n)
            self._degrees = d
        return self._degrees


@dataclass(frozen=True)
class Bipartition:
    """Two-way split of n vertices: side=False is A, side=True is B."""

    side: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "side", np.asarray(self.side, dtype=bool).ravel())

    @property
    def n(self):
        return self.side.size

    @property
    def a_count(self):
        return int(self.n - self.side.sum())

    @property
    def b_count(self):
        return int(self.side.sum())

    def swapped(self):
        return Bipartition(~self.side)


@dataclass(frozen=True)
class Labeling:
    """k-way per-pixel region assignment with labels in {0, ..., k-1}."""

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).ravel()
        object.__setattr__(self, "labels", labels)
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if labels.size and (labels.min() < 0 or labels.max() >= self.k):
            raise ValueError("label out of range")

    def canonicalized(self):
        """Renumber labels by first pixel occurrence (0 appears first, etc.)."""
        mapping = np.full(self.k, -1, dtype=np.int64)
        nxt = 0
        for lab in self.labels:
            if mapping[lab] < 0:
                mapping[lab] = nxt
                nxt += 1
                if nxt == self.k:
                    break
        # unseen labels keep consecutive numbers after the seen ones
        for lab in range(self.k):
            if mapping[lab] < 0:
                mapping[lab] = nxt
                nxt += 1
        return Labeling(mapping[self.labels], self.k)

    def as_bipartition(self):
        if self.k != 2:
            raise ValueError("only a 2-labeling converts to a Bipartition")
        return Bipartition(self.labels.astype(bool))


@dataclass(frozen=True)
class MixConfig:
    """Parameters for the mixed-graph segmentation.

    lam weights the grid term of the objective and the grid operator in the
    mixed chain; sigma is the appearance bandwidth of the dense data graph;
    m = round(edges_per_pixel * n) edges are sampled for the data graph.
    """

    lam: float
    sigma: float
    edges_per_pixel: float = 2.0
    num_clusters: int = 1000
    regions: int = 2
    seed: int = 0
    tol: float = 1e-8
    max_applications: int = 5000
    restart_dim: int = 30

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1]")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.edges_per_pixel < 0:
            raise ValueError("edges_per_pixel must be nonnegative")
        if self.num_clusters < 1:
            raise ValueError("num_clusters must be at least 1")
        if self.regions < 2:
            raise ValueError("regions must be at least 2")


@dataclass(frozen=True)
class NcutConfig:
    """Parameters for the classical single-graph baseline (optional Gabor front end)."""

    sigma_i: float
    sigma_x: float
    edges_per_pixel: float = 100.0
    use_gabor: bool = False
    regions: int = 2
    seed: int = 0
    tol: float = 1e-8
    max_applications: int = 5000
    restart_dim: int = 30

    def __post_init__(self):
        if self.sigma_i <= 0 or self.sigma_x <= 0:
            raise ValueError("sigma_i and sigma_x must be positive")
        if self.edges_per_pixel < 0:
            raise ValueError("edges_per_pixel must be nonnegative")
        if self.regions < 2:
            raise ValueError("regions must be at least 2")


# ---------------------------------------------------------------------------
# image I/O
# ---------------------------------------------------------------------------

_SUPPORTED_FORMATS = {"PNG", "PPM"}  # Pillow reports PGM/PPM/PBM all as "PPM"


def load_image(path):
    """Load a PGM/PPM/PNG raster into an AppearanceImage.

    Grayscale inputs become d=1, color inputs d=3 with raw RGB channels in
    [0, 255].  Raises FileNotFoundError/OSError for unreadable files,
    ImageFormatError for anything that is not a supported raster, and
    ImageSizeError for zero-size rasters.
    """
    try:
        with Image.open(path) as im:
            if im.format not in _SUPPORTED_FORMATS:
                raise ImageFormatError(f"unsupported raster format {im.format!r} for {path}")
            if im.width == 0 or im.height == 0:
                raise ImageSizeError(f"zero-size image {path}")
            if im.mode in ("1", "L", "I", "I;16", "F"):
                arr = np.asarray(im.convert("L"), dtype=np.float64)[:, :, None]
            else:
                arr = np.asarray(im.convert("RGB"), dtype=np.float64)
    except UnidentifiedImageError as exc:
        raise ImageFormatError(f"cannot decode {path} as PGM/PPM/PNG") from exc
    return AppearanceImage(arr)


def _atomic_write(path, write_fn):
    """Write a file via temp-then-rename so failures leave no partial output."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.splitext(path)[1])
    os.close(fd)
    try:
        write_fn(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_image(image, path):
    """Save an AppearanceImage or uint8-compatible array as PNG/PGM/PPM."""
    if isinstance(image, AppearanceImage):
        arr = image.data
    else:
        arr = np.asarray(image)
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.ndim == 3 and arr.shape[2] != 3:
        raise ValueError(f"cannot save image with {arr.shape[2]} channels")
    out = np.clip(np.rint(arr), 0, 255).astype(np.uint8)
    pil = Image.fromarray(out)
    _atomic_write(path, lambda tmp: pil.save(tmp, format=_format_for(path)))


def _format_for(path):
    ext = os.path.splitext(path)[1].lower()
    if ext in (".pgm", ".ppm"):
        return "PPM"
    return "PNG"


# ---------------------------------------------------------------------------
# rendering helpers for labelings and eigenvectors
# ---------------------------------------------------------------------------

def labels_to_gray(labeling, width, height):
    """Render a Labeling as a (H, W) uint8 map with evenly spaced gray levels."""
    levels = np.rint(np.linspace(0, 255, labeling.k)).astype(np.uint8)
    return levels[labeling.labels].reshape(height, width)


def vector_to_gray(vec, width, height):
    """Min-max rescale a length-n vector to a (H, W) uint8 image."""
    v = np.asarray(vec, dtype=np.float64).reshape(height, width)
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.zeros((height, width), dtype=np.uint8)
    return np.rint((v - lo) / (hi - lo) * 255.0).astype(np.uint8)


def boundary_mask(labels2d):
    """Boolean mask of pixels with a 4-neighbor of a different label."""
    b = np.zeros(labels2d.shape, dtype=bool)
    diff_v = labels2d[1:, :] != labels2d[:-1, :]
    diff_h = labels2d[:, 1:] != labels2d[:, :-1]
    b[1:, :] |= diff_v
    b[:-1, :] |= diff_v
    b[:, 1:] |= diff_h
    b[:, :-1] |= diff_h
    return b


def overlay_boundaries(image, labeling, color=(255, 0, 0)):
    """Paint label boundaries onto the image; returns (H, W, 3) uint8."""
    base = image.data
    if base.shape[2] == 1:
        rgb = np.repeat(base, 3, axis=2)
    elif base.shape[2] == 3:
        rgb = base.copy()
    else:  # feature images: show the mean channel
        rgb = np.repeat(base.mean(axis=2, keepdims=True), 3, axis=2)
        lo, hi = rgb.min(), rgb.max()
        if hi > lo:
            rgb = (rgb - lo) / (hi - lo) * 255.0
    out = np.clip(np.rint(rgb), 0, 255).astype(np.uint8)
    labels2d = labeling.labels.reshape(image.height, image.width)
    out[boundary_mask(labels2d)] = np.asarray(color, dtype=np.uint8)
    return out
