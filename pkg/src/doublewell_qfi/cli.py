"""Command line entry point: ``doublewell-qfi <experiment> [flags]``.

Flags override config-file values, which override built-in defaults. Values
for --lambda (and --theta/--phi in sweeps) are either a number or an
inclusive grid written LO:HI:COUNT.
"""

from __future__ import annotations

import argparse
import sys

from .config import EXPERIMENTS, SWEEP_METRICS, build_config, load_config_file
from .experiments import run_experiment


def _value_spec(text: str):
    """Parse "1.5" into a scalar or "0.2:4:60" into a min/max/count table."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"expected LO:HI:COUNT, got {text!r}")
        try:
            return {"min": float(parts[0]), "max": float(parts[1]), "count": int(parts[2])}
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from None
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or LO:HI:COUNT, got {text!r}") from None


def _float_list(text: str):
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="doublewell-qfi",
        description=(
            "Double-well condensate experiments: classical phase portraits, "
            "exact quantum fidelity and population dynamics, and maximal mean "
            "QFI maps, written as deterministic CSV."
        ),
    )
    subparsers = parser.add_subparsers(dest="experiment", required=True)
    for experiment in EXPERIMENTS:
        sub = subparsers.add_parser(experiment, help=f"run the {experiment} experiment")
        sub.add_argument("--config", help="TOML config file; flags override its values")
        sub.add_argument("--out", help="output directory")
        sub.add_argument("--workers", type=int, help="concurrency degree")
        sub.add_argument(
            "--lambda",
            dest="lam",
            type=_value_spec,
            help="lambda value or grid LO:HI:COUNT",
        )
        sub.add_argument("--n", dest="n_particles", type=int, help="particle number N")
        sub.add_argument("--tmax", type=float, help="largest sampled kappa*t")
        sub.add_argument("--samples", type=int, help="number of time samples")
        sub.add_argument("--theta", type=_value_spec, help="initial-state polar angle")
        sub.add_argument("--phi", type=_value_spec, help="initial-state azimuthal angle")
        sub.add_argument("--seed", type=int, help="seed recorded in the run metadata")
        sub.add_argument(
            "--matrix", action="store_true", default=None, help="also write wide-format files"
        )
        if experiment == "qfi-map":
            sub.add_argument("--slices", type=_float_list, help="comma-separated slice times")
        if experiment == "sweep":
            sub.add_argument("--metric", choices=SWEEP_METRICS, help="scalar output to sweep")
    return parser


def _overrides_from_args(args: argparse.Namespace) -> dict:
    overrides: dict = {}
    if args.n_particles is not None:
        overrides["n_particles"] = args.n_particles
    if args.lam is not None:
        overrides["lambda"] = args.lam
    time_spec = {}
    if args.tmax is not None:
        time_spec["max"] = args.tmax
    if args.samples is not None:
        time_spec["samples"] = args.samples
    if time_spec:
        overrides["time"] = time_spec
    state_spec = {}
    if args.theta is not None:
        state_spec["theta"] = args.theta
    if args.phi is not None:
        state_spec["phi"] = args.phi
    if state_spec:
        overrides["initial_state"] = state_spec
    if args.out is not None:
        overrides["output"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.matrix is not None:
        overrides["matrix"] = args.matrix
    if getattr(args, "slices", None) is not None:
        overrides["slices"] = args.slices
    if getattr(args, "metric", None) is not None:
        overrides["metric"] = args.metric
    return overrides


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_values = load_config_file(args.config) if args.config else None
        config = build_config(args.experiment, file_values, _overrides_from_args(args))
        files = run_experiment(config)
    except Exception as exc:
        print(f"doublewell-qfi: error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(files)} files to {config.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
