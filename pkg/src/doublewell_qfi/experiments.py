"""Experiment runners: regenerate figure-style datasets as deterministic CSV.

Every runner consumes an ExperimentConfig, writes UTF-8 CSV files with a
``#``-prefixed metadata header, and finishes with a manifest.json listing a
sha256 checksum for each data file. Floats are written in their shortest
round-trip decimal form, so identical configs produce byte-identical data
files regardless of the worker count.
"""

from __future__ import annotations

import hashlib
import json
import math
import time as _time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, GridSpec, config_to_dict, value_grid
from .dynamics import (
    ModelParams,
    Propagator,
    build_hamiltonian,
    evolve,
    fidelity,
    observable_series,
)
from .meanfield import (
    ClassicalParams,
    PhaseState,
    PoleSingularityError,
    find_fixed_points,
    integrate_trajectory,
    self_trapping_critical_omega,
)
from .qfi import max_mean_qfi, pure_qfi_matrix
from .spin import SpinQuantumNumber, build_operators, spin_coherent_state

__all__ = [
    "run_phase_portrait",
    "run_fidelity",
    "run_qfi_map",
    "run_jz_series",
    "run_sweep",
    "run_experiment",
]

UNITS_NOTE = "time in units of 1/kappa; lambda = Omega/kappa_r"
FLOAT_NOTE = "floats: shortest round-trip decimal (Python repr)"

# initial-condition lattice of the phase portrait
LATTICE_P_POINTS = 12
LATTICE_PHI_POINTS = 12
LATTICE_P_MAX = 0.95


def _fmt(x: float) -> str:
    return repr(float(x))


def config_hash(config: ExperimentConfig) -> str:
    """Hash of the physics-determining fields.

    Execution details (output directory, worker count) are excluded so that
    reruns of the same physics produce byte-identical data files.
    """
    payload = config_to_dict(config)
    payload.pop("output")
    payload.pop("workers")
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    ).hexdigest()


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _meta_lines(config: ExperimentConfig, extra: tuple[str, ...] = ()) -> list[str]:
    return [
        f"doublewell-qfi {__version__} experiment={config.experiment}",
        f"config_hash: {config_hash(config)}",
        f"seed: {config.seed}",
        f"units: {UNITS_NOTE}",
        FLOAT_NOTE,
        *extra,
    ]


def _write_csv(path: Path, meta: list[str], columns: list[str], rows) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in meta:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    return path


def _prepare_outdir(config: ExperimentConfig) -> Path:
    outdir = Path(config.output)
    outdir.mkdir(parents=True, exist_ok=True)
    return outdir


def _write_manifest(
    config: ExperimentConfig, outdir: Path, files: list[Path], started: float
) -> Path:
    payload = {
        "experiment": config.experiment,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "wall_time_s": round(_time.perf_counter() - started, 3),
        "config": config_to_dict(config),
        "config_hash": config_hash(config),
        "files": [{"name": f.name, "sha256": _sha256(f)} for f in files],
    }
    path = outdir / "manifest.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _ordered_map(fn, items, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _require(config: ExperimentConfig, experiment: str) -> None:
    if config.experiment != experiment:
        raise ValueError(f"config is for {config.experiment!r}, runner expects {experiment!r}")


def _scalar_initial_state(config: ExperimentConfig) -> tuple[float, float]:
    theta, phi = config.initial_state.theta, config.initial_state.phi
    if isinstance(theta, GridSpec) or isinstance(phi, GridSpec):
        raise ValueError("this experiment needs a scalar initial state")
    return float(theta), float(phi)


def run_phase_portrait(config: ExperimentConfig) -> list[Path]:
    """Integrate a lattice of classical trajectories per lambda.

    One CSV per lambda value (columns trajectory, t, p, phi, energy, status;
    classical time in units of 1/kappa_r) plus fixed_points.csv with the
    fixed-point locations, stability, and regime. Trajectories that hit a
    pole are recorded truncated with status pole_truncated.
    """
    _require(config, "phase-portrait")
    started = _time.perf_counter()
    outdir = _prepare_outdir(config)
    lams = value_grid(config.lam)
    t_max = config.time.t_max
    samples = config.time.samples

    p_starts = np.linspace(-LATTICE_P_MAX, LATTICE_P_MAX, LATTICE_P_POINTS)
    phi_starts = np.linspace(0.0, 2.0 * math.pi, LATTICE_PHI_POINTS, endpoint=False)
    lattice = [(p, phi) for p in p_starts for phi in phi_starts]

    def portrait(lam: float):
        params = ClassicalParams(lam)
        rows = []
        for index, (p0, phi0) in enumerate(lattice):
            try:
                traj = integrate_trajectory(PhaseState(float(p0), float(phi0)), params, t_max)
                status = traj.status
            except PoleSingularityError as exc:
                traj = exc.trajectory
                status = "pole_truncated"
            n = traj.t.shape[0]
            picks = np.unique(np.round(np.linspace(0, n - 1, min(samples, n))).astype(int))
            for k in picks:
                rows.append(
                    [
                        str(index),
                        _fmt(traj.t[k]),
                        _fmt(traj.p[k]),
                        _fmt(traj.phi[k]),
                        _fmt(traj.energy[k]),
                        status,
                    ]
                )
        return rows

    per_lambda = _ordered_map(portrait, list(lams), config.workers)

    files = []
    for i, (lam, rows) in enumerate(zip(lams, per_lambda)):
        meta = _meta_lines(
            config,
            extra=(f"lambda: {_fmt(lam)}", "classical time in units of 1/kappa_r"),
        )
        files.append(
            _write_csv(
                outdir / f"phase_portrait_{i:03d}.csv",
                meta,
                ["trajectory", "t", "p", "phi", "energy", "status"],
                rows,
            )
        )

    fp_rows = []
    for lam in lams:
        for report in find_fixed_points(ClassicalParams(float(lam))):
            fp_rows.append(
                [
                    _fmt(lam),
                    _fmt(report.location.p),
                    _fmt(report.location.phi),
                    _fmt(report.theta_equivalent),
                    _fmt(report.eigenvalue_squared),
                    report.stability.value,
                    report.regime.value,
                ]
            )
    files.append(
        _write_csv(
            outdir / "fixed_points.csv",
            _meta_lines(config, extra=("classical time in units of 1/kappa_r",)),
            ["lambda", "p", "phi", "theta", "eigenvalue_squared", "stability", "regime"],
            fp_rows,
        )
    )

    files.append(_write_manifest(config, outdir, files, started))
    return files


def run_fidelity(config: ExperimentConfig) -> list[Path]:
    """Overlap of the evolved state with its initial spin coherent state."""
    _require(config, "fidelity")
    started = _time.perf_counter()
    outdir = _prepare_outdir(config)
    lams = value_grid(config.lam)
    times = config.time.values()
    theta, phi = _scalar_initial_state(config)
    j = SpinQuantumNumber(config.n_particles)
    psi0 = spin_coherent_state(j, theta, phi)

    def curve(lam: float):
        prop = Propagator.from_hamiltonian(
            build_hamiltonian(ModelParams(config.n_particles, float(lam)))
        )
        return [fidelity(psi0, evolve(prop, psi0, float(s))) for s in times]

    curves = _ordered_map(curve, list(lams), config.workers)

    rows = []
    for lam, values in zip(lams, curves):
        for s, value in zip(times, values):
            rows.append([_fmt(lam), _fmt(s), _fmt(value)])
    files = [
        _write_csv(outdir / "fidelity.csv", _meta_lines(config), ["lambda", "kappa_t", "fidelity"], rows)
    ]
    if config.matrix:
        columns = ["kappa_t"] + [f"lambda={_fmt(lam)}" for lam in lams]
        matrix_rows = [
            [_fmt(s)] + [_fmt(curves[c][r]) for c in range(len(lams))]
            for r, s in enumerate(times)
        ]
        files.append(
            _write_csv(outdir / "fidelity_matrix.csv", _meta_lines(config), columns, matrix_rows)
        )
    files.append(_write_manifest(config, outdir, files, started))
    return files


def run_jz_series(config: ExperimentConfig) -> list[Path]:
    """Time series of <jz> for each lambda."""
    _require(config, "jz-series")
    started = _time.perf_counter()
    outdir = _prepare_outdir(config)
    lams = value_grid(config.lam)
    times = config.time.values()
    theta, phi = _scalar_initial_state(config)
    j = SpinQuantumNumber(config.n_particles)
    ops = build_operators(j)
    psi0 = spin_coherent_state(j, theta, phi)

    def series(lam: float):
        prop = Propagator.from_hamiltonian(
            build_hamiltonian(ModelParams(config.n_particles, float(lam)))
        )
        return observable_series(prop, psi0, ops, times).jz

    curves = _ordered_map(series, list(lams), config.workers)

    rows = []
    for lam, values in zip(lams, curves):
        for s, value in zip(times, values):
            rows.append([_fmt(lam), _fmt(s), _fmt(value)])
    files = [
        _write_csv(
            outdir / "jz_series.csv",
            _meta_lines(config),
            ["lambda", "kappa_t", "jz_expectation"],
            rows,
        )
    ]
    if config.matrix:
        columns = ["kappa_t"] + [f"lambda={_fmt(lam)}" for lam in lams]
        matrix_rows = [
            [_fmt(s)] + [_fmt(curves[c][r]) for c in range(len(lams))]
            for r, s in enumerate(times)
        ]
        files.append(
            _write_csv(outdir / "jz_series_matrix.csv", _meta_lines(config), columns, matrix_rows)
        )
    files.append(_write_manifest(config, outdir, files, started))
    return files


def run_qfi_map(config: ExperimentConfig) -> list[Path]:
    """Maximal mean QFI over the (lambda, time) grid, plus slice files.

    Slice times are evaluated exactly (extra propagations), not snapped to
    the time grid.
    """
    _require(config, "qfi-map")
    started = _time.perf_counter()
    outdir = _prepare_outdir(config)
    lams = value_grid(config.lam)
    times = config.time.values()
    theta, phi = _scalar_initial_state(config)
    n = config.n_particles
    j = SpinQuantumNumber(n)
    ops = build_operators(j)
    psi0 = spin_coherent_state(j, theta, phi)
    slices = config.slices

    def sheet(lam: float):
        prop = Propagator.from_hamiltonian(build_hamiltonian(ModelParams(n, float(lam))))

        def point(s: float) -> float:
            try:
                return max_mean_qfi(pure_qfi_matrix(evolve(prop, psi0, s), ops), n)
            except Exception as exc:
                raise RuntimeError(
                    f"qfi-map failed at lambda={lam!r}, kappa_t={s!r}: {exc}"
                ) from exc

        return [point(float(s)) for s in times], [point(float(s)) for s in slices]

    sheets = _ordered_map(sheet, list(lams), config.workers)

    rows = []
    for lam, (values, _) in zip(lams, sheets):
        for s, value in zip(times, values):
            rows.append([_fmt(lam), _fmt(s), _fmt(value)])
    files = [
        _write_csv(outdir / "qfi_map.csv", _meta_lines(config), ["lambda", "kappa_t", "f_bar_max"], rows)
    ]

    for k, slice_time in enumerate(slices):
        slice_rows = [
            [_fmt(lam), _fmt(slice_time), _fmt(sheets[i][1][k])] for i, lam in enumerate(lams)
        ]
        files.append(
            _write_csv(
                outdir / f"qfi_map_slice_{k:02d}.csv",
                _meta_lines(config, extra=(f"kappa_t: {_fmt(slice_time)}",)),
                ["lambda", "kappa_t", "f_bar_max"],
                slice_rows,
            )
        )

    if config.matrix:
        columns = ["lambda"] + [_fmt(s) for s in times]
        matrix_rows = [
            [_fmt(lam)] + [_fmt(v) for v in values] for lam, (values, _) in zip(lams, sheets)
        ]
        files.append(
            _write_csv(outdir / "qfi_map_matrix.csv", _meta_lines(config), columns, matrix_rows)
        )
    files.append(_write_manifest(config, outdir, files, started))
    return files


def run_sweep(config: ExperimentConfig) -> list[Path]:
    """Generic grid runner over (lambda, theta, phi, time) for one scalar metric.

    Output ordering is lexicographic in the grid indices regardless of the
    worker count.
    """
    _require(config, "sweep")
    started = _time.perf_counter()
    outdir = _prepare_outdir(config)
    lams = value_grid(config.lam)
    thetas = value_grid(config.initial_state.theta)
    phis = value_grid(config.initial_state.phi)
    times = config.time.values()
    metric = config.metric
    n = config.n_particles
    j = SpinQuantumNumber(n)
    ops = build_operators(j) if metric in ("f_bar_max", "jz") else None

    points = [
        (float(lam), float(theta), float(phi))
        for lam in lams
        for theta in thetas
        for phi in phis
    ]

    def evaluate(point: tuple[float, float, float]):
        lam, theta, phi = point
        if metric == "lambda_c":
            value = self_trapping_critical_omega(theta, phi)
            return [value] * len(times)
        prop = Propagator.from_hamiltonian(build_hamiltonian(ModelParams(n, lam)))
        psi0 = spin_coherent_state(j, theta, phi)
        if metric == "fidelity":
            return [fidelity(psi0, evolve(prop, psi0, float(s))) for s in times]
        if metric == "jz":
            return list(observable_series(prop, psi0, ops, times).jz)
        if metric == "f_bar_max":
            return [
                max_mean_qfi(pure_qfi_matrix(evolve(prop, psi0, float(s)), ops), n)
                for s in times
            ]
        raise ValueError(f"unknown metric {metric!r}")

    values = _ordered_map(evaluate, points, config.workers)

    rows = []
    for (lam, theta, phi), series in zip(points, values):
        for s, value in zip(times, series):
            rows.append([_fmt(lam), _fmt(theta), _fmt(phi), _fmt(s), _fmt(value)])
    files = [
        _write_csv(
            outdir / "sweep.csv",
            _meta_lines(config, extra=(f"metric: {metric}",)),
            ["lambda", "theta", "phi", "kappa_t", "value"],
            rows,
        )
    ]
    files.append(_write_manifest(config, outdir, files, started))
    return files


_RUNNERS = {
    "phase-portrait": run_phase_portrait,
    "fidelity": run_fidelity,
    "qfi-map": run_qfi_map,
    "jz-series": run_jz_series,
    "sweep": run_sweep,
}


def run_experiment(config: ExperimentConfig) -> list[Path]:
    """Dispatch a config to its runner; returns the written files, manifest last."""
    return _RUNNERS[config.experiment](config)
