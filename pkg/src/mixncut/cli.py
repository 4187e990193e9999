"""Command-line interface: segment single images and run benchmark sweeps.

Exit codes: 0 success, 1 bad arguments, 2 I/O failure, 3 eigensolver
non-convergence (the message includes the best residual reached).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .bench import (
    METHOD_IDS,
    MIX_LAMBDA_GRID,
    MIX_SIGMA_GRID,
    NCUT_SIGMA_GRID,
    PATTERN_IDS,
    format_summary,
    run_sweep,
    summary_csv,
    write_csv,
)
from .core import (
    ImageFormatError,
    MixConfig,
    NcutConfig,
    labels_to_gray,
    load_image,
    overlay_boundaries,
    save_image,
)
from .spectral import SolverConvergenceError


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad flags, 0 on --help
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except SolverConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ImageFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mixncut",
        description="Spectral image segmentation via mixed data/grid random walks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    seg = sub.add_parser("segment", help="segment one image and write label/overlay PNGs")
    seg.add_argument("--input", required=True, help="input image (PNG/PGM/PPM)")
    seg.add_argument("--method", choices=("mixncut", "ncut", "ncut-gabor"), default="mixncut")
    seg.add_argument("--lambda", dest="lam", type=float, default=0.995,
                     help="grid weight in the mixed chain (mixncut)")
    seg.add_argument("--sigma", type=float, default=30.0,
                     help="appearance bandwidth of the data graph (mixncut)")
    seg.add_argument("--sigma-i", type=float, default=40.0,
                     help="intensity bandwidth (ncut/ncut-gabor)")
    seg.add_argument("--sigma-x", type=float, default=50.0,
                     help="spatial sampling bandwidth in pixels (ncut/ncut-gabor)")
    seg.add_argument("--edges-per-pixel", type=float, default=None,
                     help="sampled edges per pixel (default: 2 mixncut, 100 ncut)")
    seg.add_argument("--clusters", type=int, default=1000,
                     help="pixel clusters for the sampling proposal (mixncut)")
    seg.add_argument("--regions", type=int, default=2, help="number of output regions")
    seg.add_argument("--seed", type=int, default=0)
    seg.add_argument("--solver-max-applications", type=int, default=5000,
                     help="operator-application budget for the eigensolver")
    seg.add_argument("--out-prefix", required=True,
                     help="writes <prefix>_labels.png, <prefix>_overlay.png, <prefix>_eig2.png")
    seg.set_defaults(func=cmd_segment)

    bench = sub.add_parser("bench", help="run the synthetic texture benchmark sweep")
    bench.add_argument("--methods", nargs="+", default=list(METHOD_IDS),
                       choices=list(METHOD_IDS) + ["ncut-gabor"],
                       help="methods to sweep (default: all)")
    bench.add_argument("--patterns", nargs="+", default=list(PATTERN_IDS),
                       choices=PATTERN_IDS, help="ground-truth patterns (default: all)")
    bench.add_argument("--size", type=int, default=320, help="composite edge length")
    bench.add_argument("--texture-dir", default=None,
                       help="directory of texture images; default: built-in palette")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", default="bench.csv", help="per-run CSV output path")
    bench.add_argument("--threads", type=int, default=1, help="parallel run workers")
    bench.add_argument("--mix-sigmas", type=float, nargs="+", default=list(MIX_SIGMA_GRID))
    bench.add_argument("--mix-lambdas", type=float, nargs="+", default=list(MIX_LAMBDA_GRID))
    bench.add_argument("--ncut-sigmas-i", type=float, nargs="+", default=list(NCUT_SIGMA_GRID))
    bench.add_argument("--ncut-sigmas-x", type=float, nargs="+", default=list(NCUT_SIGMA_GRID))
    bench.add_argument("--mix-edges-per-pixel", type=float, default=2.0)
    bench.add_argument("--ncut-edges-per-pixel", type=float, default=100.0)
    bench.add_argument("--num-clusters", type=int, default=1000)
    bench.set_defaults(func=cmd_bench)
    return parser


def cmd_segment(args):
    # import here so `bench` stays importable even if pipeline deps change
    from .pipeline import segment_mixncut, segment_ncut

    image = load_image(args.input)
    if args.method == "mixncut":
        epp = 2.0 if args.edges_per_pixel is None else args.edges_per_pixel
        cfg = MixConfig(lam=args.lam, sigma=args.sigma, edges_per_pixel=epp,
                        num_clusters=args.clusters, regions=args.regions,
                        seed=args.seed, max_applications=args.solver_max_applications)
        labeling, diag = segment_mixncut(image, cfg)
    else:
        epp = 100.0 if args.edges_per_pixel is None else args.edges_per_pixel
        cfg = NcutConfig(sigma_i=args.sigma_i, sigma_x=args.sigma_x, edges_per_pixel=epp,
                         use_gabor=(args.method == "ncut-gabor"), regions=args.regions,
                         seed=args.seed, max_applications=args.solver_max_applications)
        labeling, diag = segment_ncut(image, cfg)

    prefix = args.out_prefix
    save_image(labels_to_gray(labeling, image.width, image.height), f"{prefix}_labels.png")
    save_image(overlay_boundaries(image, labeling), f"{prefix}_overlay.png")
    save_image(diag["eig2"], f"{prefix}_eig2.png")

    timings = " ".join(f"{k}={v:.3f}" for k, v in diag["timings"].items())
    print(f"stage timings (s): {timings}")
    print("eigenvalues: " + ", ".join(f"{v:.9f}" for v in diag["eigenvalues"]))
    print("residuals: " + ", ".join(f"{v:.2e}" for v in diag["residuals"]))
    if any(diag["complex_pairs"]):
        print("note: complex eigenvalue pair reduced to real components")
    if "clusters_realized" in diag:
        print(f"clusters realized: {diag['clusters_realized']}")
    if diag.get("mixncut_objective") is not None:
        kind = "exact" if diag["objective_exact"] else "subsampled"
        print(f"objective: {diag['mixncut_objective']:.6g} ({kind})")
    print(f"wrote {prefix}_labels.png {prefix}_overlay.png {prefix}_eig2.png")
    return 0


def cmd_bench(args):
    methods = ["ncut+gabor" if m == "ncut-gabor" else m for m in args.methods]
    methods = list(dict.fromkeys(methods))
    textures = None
    if args.texture_dir is not None:
        textures = _load_texture_dir(args.texture_dir, args.size)

    result = run_sweep(
        methods, args.patterns, size=args.size, seed=args.seed, textures=textures,
        mix_sigmas=args.mix_sigmas, mix_lambdas=args.mix_lambdas,
        ncut_sigmas_i=args.ncut_sigmas_i, ncut_sigmas_x=args.ncut_sigmas_x,
        mix_edges_per_pixel=args.mix_edges_per_pixel,
        ncut_edges_per_pixel=args.ncut_edges_per_pixel,
        num_clusters=args.num_clusters, workers=args.threads,
    )
    write_csv(result.rows, args.out)
    base, ext = os.path.splitext(args.out)
    summary_path = f"{base}.summary{ext or '.csv'}"
    summary_csv(result.summary, summary_path)
    print(format_summary(result.summary))
    failed = sum("error" in r for r in result.rows)
    if failed:
        print(f"warning: {failed} run(s) failed and scored jac=0", file=sys.stderr)
    print(f"wrote {args.out} and {summary_path}")
    return 0


def _load_texture_dir(directory, size):
    """Load every image in a directory as a texture, nearest-resized to size."""
    names = sorted(
        f for f in os.listdir(directory)
        if os.path.splitext(f)[1].lower() in (".png", ".pgm", ".ppm")
    )
    if len(names) < 2:
        raise ValueError(f"need at least two texture images in {directory}")
    textures = {}
    for fname in names:
        img = load_image(os.path.join(directory, fname))
        rows = np.minimum(((np.arange(size) + 0.5) * img.height / size).astype(np.int64),
                          img.height - 1)
        cols = np.minimum(((np.arange(size) + 0.5) * img.width / size).astype(np.int64),
                          img.width - 1)
        textures[os.path.splitext(fname)[0]] = type(img)(img.data[rows][:, cols])
    return textures


if __name__ == "__main__":
    sys.exit(main())
