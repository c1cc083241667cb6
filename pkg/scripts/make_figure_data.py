#!/usr/bin/env python3
"""Regenerate the standard figure datasets with the built-in defaults.

Produces, under --out (default out/figures):
  phase_portrait/   classical trajectories and fixed points, lambda in {1, 4}
  fidelity/         overlap decay, N=100, phase-state start, lambda in {1, 4}
  jz_series/        population imbalance, N=100, one-well start, lambda in {2/3, 3}
  qfi_map_phase/    maximal mean QFI map, N=500, phase-state start, slices kt=6, 24
  qfi_map_one_well/ maximal mean QFI map, N=500, one-well start, slices kt=6, 25

The whole suite is a desk-scale run (a few minutes); pass --workers to use
more threads on the quantum maps.
"""

import argparse
import sys
import time
from pathlib import Path

from doublewell_qfi import build_config, run_experiment


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="out/figures", help="output root directory")
    parser.add_argument("--workers", type=int, default=4, help="worker threads")
    args = parser.parse_args(argv)
    root = Path(args.out)

    runs = [
        ("phase-portrait", "phase_portrait", {}),
        ("fidelity", "fidelity", {}),
        ("jz-series", "jz_series", {}),
        ("qfi-map", "qfi_map_phase", {}),
        (
            "qfi-map",
            "qfi_map_one_well",
            {"initial_state": {"theta": 0.0, "phi": 0.0}, "slices": [6.0, 25.0]},
        ),
    ]

    started = time.perf_counter()
    for experiment, subdir, overrides in runs:
        values = {"output": str(root / subdir), "workers": args.workers, **overrides}
        config = build_config(experiment, None, values)
        t0 = time.perf_counter()
        files = run_experiment(config)
        print(f"{subdir}: {len(files)} files in {time.perf_counter() - t0:.1f}s")
    print(f"total {time.perf_counter() - started:.1f}s -> {root}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
