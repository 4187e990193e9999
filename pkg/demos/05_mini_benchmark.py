"""A scaled-down run of the synthetic texture benchmark.

The full benchmark sweeps three methods over three boundary patterns, all
unordered pairs of a five-texture palette, and a parameter grid per method.
This demo shrinks every axis -- 64 px composites, two patterns, a couple of
grid points -- so it finishes in under a minute while still producing the
same artifacts: a per-run CSV, a best-grid-point summary CSV, and the
aligned summary table.

Usage: python demos/05_mini_benchmark.py [size]
"""

import sys
import time
from pathlib import Path

from mixncut import format_summary, run_sweep, write_csv
from mixncut.bench import summary_csv

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

size = int(sys.argv[1]) if len(sys.argv) > 1 else 64
t0 = time.perf_counter()
result = run_sweep(
    methods=("mixncut", "ncut"),
    patterns=("vertical-halves", "centered-disk"),
    size=size,
    seed=0,
    texture_pairs=[
        ("vert-stripes", "horiz-stripes"),
        ("checker-wide", "diag-stripes"),
        ("checker-fine", "vert-stripes"),
    ],
    mix_sigmas=(1.0, 10.0),
    mix_lambdas=(0.995,),
    ncut_sigmas_i=(40.0, 80.0),
    ncut_sigmas_x=(50.0,),
)
elapsed = time.perf_counter() - t0

write_csv(result.rows, out / "mini_bench.csv")
summary_csv(result.summary, out / "mini_bench.summary.csv")

failed = sum(1 for row in result.rows if row.get("error"))
print(f"{len(result.rows)} runs in {elapsed:.1f} s ({failed} failed)\n")
print(format_summary(result.summary))
print(f"\nper-run rows: {out / 'mini_bench.csv'}")
print(f"summary:      {out / 'mini_bench.summary.csv'}")
