"""Synthetic texture benchmark: ground-truth patterns, textures, Jaccard, sweeps.

The harness composes pairs of procedural textures under one of three
ground-truth masks, segments the composite with each requested method over a
parameter grid, and reports the grid point with the best mean Jaccard
accuracy per (method, pattern) — the "best mean accuracy" protocol.

The five built-in textures have overlapping value ranges and close means but
pairwise-disjoint discrete value sets, so no single intensity threshold or
brightness cue separates a pair — only the value *distribution* does.  That
is the regime the benchmark is meant to probe.
"""

from __future__ import annotations

import csv
import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .core import AppearanceImage, Bipartition, MixConfig, NcutConfig, _atomic_write, substream
from .pipeline import segment_mixncut, segment_ncut

PATTERN_IDS = ("vertical-halves", "centered-disk", "two-corners-diagonal")
METHOD_IDS = ("ncut", "ncut+gabor", "mixncut")

# default parameter grids for the sweep
MIX_SIGMA_GRID = (0.1, 1.0, 10.0, 30.0)
MIX_LAMBDA_GRID = (0.990, 0.995, 0.997)
NCUT_SIGMA_GRID = tuple(float(v) for v in range(20, 101, 10))

CSV_COLUMNS = (
    "method", "pattern", "texture_a", "texture_b", "sigma", "sigma_i", "sigma_x",
    "lambda", "m_per_pixel", "L", "seed", "jac", "seconds",
)


@dataclass(frozen=True)
class GroundTruthPattern:
    pattern_id: str
    mask: Bipartition


def ground_truth_pattern(pattern_id, height, width):
    """One of the three benchmark masks at the requested resolution.

    vertical-halves: right half on side B.  centered-disk: disk of radius
    0.3 * min(height, width) on side B.  two-corners-diagonal: the NW and SE
    corner triangles cut off at 45 degrees (leg 0.45 * min dimension) on
    side B.
    """
    rows = np.arange(height)[:, None]
    cols = np.arange(width)[None, :]
    s = min(height, width)
    if pattern_id == "vertical-halves":
        side2d = np.broadcast_to(cols >= width // 2, (height, width))
    elif pattern_id == "centered-disk":
        radius = 0.3 * s
        cy, cx = (height - 1) / 2.0, (width - 1) / 2.0
        side2d = (rows - cy) ** 2 + (cols - cx) ** 2 <= radius * radius
    elif pattern_id == "two-corners-diagonal":
        t = 0.45 * s
        side2d = (rows + cols < t) | (rows + cols > (height - 1) + (width - 1) - t)
    else:
        raise ValueError(f"unknown pattern {pattern_id!r}; expected one of {PATTERN_IDS}")
    return GroundTruthPattern(pattern_id, Bipartition(side2d.reshape(-1).copy()))


# ---------------------------------------------------------------------------
# procedural textures
# ---------------------------------------------------------------------------

def synth_texture(kind, params, size, seed=0):
    """A grayscale procedural texture as an AppearanceImage.

    Kinds and their params (all optional unless noted):
      grating:        wavelength (required, > 0), orientation, mid, contrast
      checker:        cell (required, >= 1), lo, hi
      blue-noise:     scale, lo, hi — white noise minus its local mean
      filtered-noise: orientation, bandwidth, f_lo, f_hi, lo, hi — noise
                      band-passed to an oriented frequency wedge
    Defaults give values spanning at least [64, 192].  Noise kinds draw from
    ``seed``; grating and checker are seed-independent.
    """
    height, width = (size, size) if np.isscalar(size) else size
    if height < 1 or width < 1:
        raise ValueError("size must be positive")
    params = dict(params)
    if kind == "grating":
        data = _grating(params, height, width)
    elif kind == "checker":
        data = _checker(params, height, width)
    elif kind == "blue-noise":
        data = _blue_noise(params, height, width, substream(seed, 11))
    elif kind == "filtered-noise":
        data = _filtered_noise(params, height, width, substream(seed, 12))
    else:
        raise ValueError(f"unknown texture kind {kind!r}")
    if params:
        raise ValueError(f"unrecognized {kind} params: {sorted(params)}")
    return AppearanceImage(data[:, :, None])


def _grating(params, height, width):
    wavelength = float(params.pop("wavelength"))
    orientation = float(params.pop("orientation", 0.0))
    mid = float(params.pop("mid", 128.0))
    contrast = float(params.pop("contrast", 80.0))
    if wavelength <= 0:
        raise ValueError("grating wavelength must be positive")
    rows = np.arange(height)[:, None]
    cols = np.arange(width)[None, :]
    proj = cols * np.cos(orientation) + rows * np.sin(orientation)
    return mid + contrast * np.cos(2.0 * np.pi * proj / wavelength)


def _checker(params, height, width):
    cell = int(params.pop("cell", 4))
    lo = float(params.pop("lo", 64.0))
    hi = float(params.pop("hi", 192.0))
    if cell < 1:
        raise ValueError("checker cell must be at least 1")
    rows = np.arange(height)[:, None]
    cols = np.arange(width)[None, :]
    parity = (rows // cell + cols // cell) % 2
    return np.where(parity == 0, lo, hi).astype(np.float64)


def _rescale(data, lo, hi):
    dmin, dmax = data.min(), data.max()
    if dmax == dmin:
        raise ValueError("degenerate texture: constant output")
    return lo + (data - dmin) * ((hi - lo) / (dmax - dmin))


def _blue_noise(params, height, width, rng):
    scale = float(params.pop("scale", 2.0))
    lo = float(params.pop("lo", 48.0))
    hi = float(params.pop("hi", 208.0))
    if scale <= 0:
        raise ValueError("blue-noise scale must be positive")
    noise = rng.standard_normal((height, width))
    return _rescale(noise - gaussian_filter(noise, scale), lo, hi)


def _filtered_noise(params, height, width, rng):
    orientation = float(params.pop("orientation", 0.0))
    bandwidth = float(params.pop("bandwidth", np.pi / 6))
    f_lo = float(params.pop("f_lo", 0.05))
    f_hi = float(params.pop("f_hi", 0.25))
    lo = float(params.pop("lo", 48.0))
    hi = float(params.pop("hi", 208.0))
    if not 0 < bandwidth <= np.pi / 2 or not 0 <= f_lo < f_hi:
        raise ValueError("invalid filtered-noise band")
    noise = rng.standard_normal((height, width))
    fy = np.fft.fftfreq(height)[:, None]
    fx = np.fft.fftfreq(width)[None, :]
    radius = np.hypot(fy, fx)
    angle = np.arctan2(fy, fx)
    # angular distance to the target orientation, modulo pi (fft symmetry)
    d = np.abs((angle - orientation + np.pi / 2) % np.pi - np.pi / 2)
    mask = (d <= bandwidth) & (radius >= f_lo) & (radius <= f_hi)
    if not mask.any():
        raise ValueError("filtered-noise band selects no frequencies")
    out = np.real(np.fft.ifft2(np.fft.fft2(noise) * mask))
    return _rescale(out, lo, hi)


# Built-in palette: five high-contrast textures whose value ranges overlap
# and whose means are close (so no intensity bandwidth separates them by
# brightness), but whose discrete value sets are pairwise disjoint with gaps
# of at least 8 gray levels (so value distributions still identify the
# texture).  Phase-locked gratings (wavelength dividing the pixel lattice
# step along their orientation) and checkers take exactly the listed values:
#   vert-stripes  {16, 128, 240}   horiz-stripes {64, 208}
#   diag-stripes  {56, 152, 248}   checker-wide  {32, 224}
#   checker-fine  {88, 184}
_PALETTE_SPECS = (
    ("checker-wide", "checker", {"cell": 5, "lo": 32.0, "hi": 224.0}, 101),
    ("vert-stripes", "grating",
     {"wavelength": 4.0, "orientation": 0.0, "mid": 128.0, "contrast": 112.0}, 102),
    ("horiz-stripes", "grating",
     {"wavelength": 3.0, "orientation": np.pi / 2, "mid": 112.0, "contrast": 96.0}, 103),
    ("diag-stripes", "grating",
     {"wavelength": 2.0 * np.sqrt(2.0), "orientation": np.pi / 4,
      "mid": 152.0, "contrast": 96.0}, 104),
    ("checker-fine", "checker", {"cell": 3, "lo": 88.0, "hi": 184.0}, 105),
)


def default_palette(size):
    """The five built-in benchmark textures at the given size, by name."""
    return {
        name: synth_texture(kind, params, size, seed)
        for name, kind, params, seed in _PALETTE_SPECS
    }


def compose(texture_a, texture_b, pattern, resize_to=None):
    """Composite two textures under a ground-truth mask.

    Side-A pixels (mask False) take texture_a's values, side-B texture_b's.
    Both textures must match the mask resolution.  With ``resize_to`` the
    composite and mask are nearest-neighbor resized to that square size.
    """
    mask = pattern.mask.side
    if texture_a.data.shape != texture_b.data.shape:
        raise ValueError("textures differ in shape")
    if texture_a.n != mask.size:
        raise ValueError("textures do not match the pattern resolution")
    side2d = mask.reshape(texture_a.height, texture_a.width)
    data = np.where(side2d[:, :, None], texture_b.data, texture_a.data)
    if resize_to is not None:
        rows = _nearest_index(texture_a.height, resize_to)
        cols = _nearest_index(texture_a.width, resize_to)
        data = data[rows][:, cols]
        side2d = side2d[rows][:, cols]
    return AppearanceImage(data), Bipartition(side2d.reshape(-1).copy())


def _nearest_index(src, dst):
    return np.minimum(((np.arange(dst) + 0.5) * src / dst).astype(np.int64), src - 1)


# ---------------------------------------------------------------------------
# accuracy metric
# ---------------------------------------------------------------------------

def jaccard_accuracy(pred, gt):
    """Symmetric two-region Jaccard accuracy in [0, 1].

    J(S, Q) = |S and Q| / |S or Q| with J(empty, empty) = 1 and
    J(empty, X) = 0; the score is the better of the two label pairings of
    mean(J(side A), J(side B)).
    """
    ps, gs = pred.side, gt.side
    if ps.size != gs.size:
        raise ValueError("prediction and ground truth differ in pixel count")
    direct = (_jac(~ps, ~gs) + _jac(ps, gs)) / 2.0
    swapped = (_jac(ps, ~gs) + _jac(~ps, gs)) / 2.0
    return max(direct, swapped)


def _jac(s, q):
    union = np.count_nonzero(s | q)
    if union == 0:
        return 1.0
    return np.count_nonzero(s & q) / union


# ---------------------------------------------------------------------------
# parameter sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepResult:
    """Per-run rows (CSV_COLUMNS order) plus per-(method, pattern) summary."""

    rows: tuple
    summary: tuple


def run_sweep(methods, patterns, size=160, seed=0, textures=None, texture_pairs=None,
              mix_sigmas=MIX_SIGMA_GRID, mix_lambdas=MIX_LAMBDA_GRID,
              ncut_sigmas_i=NCUT_SIGMA_GRID, ncut_sigmas_x=NCUT_SIGMA_GRID,
              mix_edges_per_pixel=2.0, ncut_edges_per_pixel=100.0,
              num_clusters=1000, workers=1):
    """Run every (method, pattern, texture pair, grid point) combination.

    Each run derives its RNG seed from (sweep seed, run index), so results
    are independent of execution order and worker count; rows come back in
    canonical enumeration order.  A failed run is recorded with jac = 0 and
    an ``error`` field.  The summary reports, per method and pattern, the
    grid point with the highest mean jac over texture pairs.
    """
    for method in methods:
        if method not in METHOD_IDS:
            raise ValueError(f"unknown method {method!r}; expected subset of {METHOD_IDS}")
    if textures is None:
        textures = default_palette(size)
    if texture_pairs is None:
        texture_pairs = list(itertools.combinations(textures, 2))
    if not texture_pairs:
        raise ValueError("no texture pairs to run")

    masks = {p: ground_truth_pattern(p, size, size) for p in patterns}
    composites = {}
    for pattern in patterns:
        for pair in texture_pairs:
            a, b = pair
            composites[(pattern, pair)] = compose(textures[a], textures[b], masks[pattern])

    grids = {
        "mixncut": [{"sigma": s, "lambda": l} for s in mix_sigmas for l in mix_lambdas],
        "ncut": [{"sigma_i": si, "sigma_x": sx} for si in ncut_sigmas_i for sx in ncut_sigmas_x],
    }
    grids["ncut+gabor"] = grids["ncut"]
    for method in methods:
        if not grids[method]:
            raise ValueError(f"empty parameter grid for {method}")

    tasks = []
    for method in methods:
        for pattern in patterns:
            for pair in texture_pairs:
                for point in grids[method]:
                    run_seed = int(substream(seed, 7, len(tasks)).integers(0, 2**31 - 1))
                    tasks.append((method, pattern, pair, point, run_seed))

    def execute(task):
        method, pattern, pair, point, run_seed = task
        image, gt = composites[(pattern, pair)]
        row = {
            "method": method, "pattern": pattern,
            "texture_a": pair[0], "texture_b": pair[1],
            "sigma": point.get("sigma", ""), "sigma_i": point.get("sigma_i", ""),
            "sigma_x": point.get("sigma_x", ""), "lambda": point.get("lambda", ""),
            "m_per_pixel": mix_edges_per_pixel if method == "mixncut" else ncut_edges_per_pixel,
            "L": num_clusters if method == "mixncut" else "",
            "seed": run_seed,
        }
        t0 = time.perf_counter()
        try:
            if method == "mixncut":
                cfg = MixConfig(lam=point["lambda"], sigma=point["sigma"],
                                edges_per_pixel=mix_edges_per_pixel,
                                num_clusters=num_clusters, seed=run_seed)
                labeling, _ = segment_mixncut(image, cfg)
            else:
                cfg = NcutConfig(sigma_i=point["sigma_i"], sigma_x=point["sigma_x"],
                                 edges_per_pixel=ncut_edges_per_pixel,
                                 use_gabor=(method == "ncut+gabor"), seed=run_seed)
                labeling, _ = segment_ncut(image, cfg)
            row["jac"] = jaccard_accuracy(labeling.as_bipartition(), gt)
        except Exception as exc:  # failed runs score 0 and stay in the table
            row["jac"] = 0.0
            row["error"] = f"{type(exc).__name__}: {exc}"
        row["seconds"] = time.perf_counter() - t0
        return row

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(execute, tasks))
    else:
        rows = [execute(t) for t in tasks]

    return SweepResult(rows=tuple(rows), summary=tuple(_summarize(rows)))


def _summarize(rows):
    """Best grid point per (method, pattern) by mean jac over texture pairs."""
    grid_keys = ("sigma", "sigma_i", "sigma_x", "lambda")
    grouped = {}
    order = []
    for row in rows:
        key = (row["method"], row["pattern"], tuple(row[k] for k in grid_keys))
        if key not in grouped:
            grouped[key] = []
            order.append(key)
        grouped[key].append(row)
    best = {}
    for key in order:
        method, pattern, point = key
        members = grouped[key]
        mean_jac = float(np.mean([r["jac"] for r in members]))
        current = best.get((method, pattern))
        if current is None or mean_jac > current["mean_jac"]:
            entry = {"method": method, "pattern": pattern, "mean_jac": mean_jac,
                     "mean_seconds": float(np.mean([r["seconds"] for r in members])),
                     "runs": len(members), "failed": sum("error" in r for r in members)}
            entry.update(dict(zip(grid_keys, point)))
            best[(method, pattern)] = entry
    return [best[k] for k in dict.fromkeys((r["method"], r["pattern"]) for r in rows)]


def _format_cell(value):
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def write_csv(rows, path):
    """Write per-run rows to CSV (columns in CSV_COLUMNS order) atomically."""
    def emit(tmp):
        with open(tmp, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for row in rows:
                writer.writerow([_format_cell(row[c]) for c in CSV_COLUMNS])
    _atomic_write(path, emit)


def summary_csv(summary, path):
    """Write the per-(method, pattern) summary table to CSV atomically."""
    columns = ("method", "pattern", "sigma", "sigma_i", "sigma_x", "lambda",
               "mean_jac", "mean_seconds", "runs", "failed")
    def emit(tmp):
        with open(tmp, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for entry in summary:
                writer.writerow([_format_cell(entry[c]) for c in columns])
    _atomic_write(path, emit)


def format_summary(summary):
    """Aligned text table of best-grid results, one row per method x pattern."""
    header = ("method", "pattern", "best grid point", "mean jac", "mean s", "failed")
    lines = [header]
    for entry in summary:
        grid_bits = []
        for key in ("sigma", "sigma_i", "sigma_x", "lambda"):
            if entry[key] != "":
                grid_bits.append(f"{key}={_format_cell(entry[key])}")
        lines.append((entry["method"], entry["pattern"], " ".join(grid_bits),
                      format(entry["mean_jac"], ".4f"),
                      format(entry["mean_seconds"], ".2f"), str(entry["failed"])))
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    return "\n".join(
        "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(line)).rstrip()
        for line in lines
    )
