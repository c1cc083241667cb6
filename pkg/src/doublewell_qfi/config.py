"""Experiment configuration: dataclasses, defaults, and TOML loading.

A config file is a flat TOML document whose keys mirror ExperimentConfig
exactly; unknown keys are rejected so typos fail loudly. Scalar-or-grid
values ("lambda", and "theta"/"phi" for sweeps) are either a number or an
inline table {min, max, count}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Union

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

__all__ = [
    "EXPERIMENTS",
    "SWEEP_METRICS",
    "GridSpec",
    "TimeSpec",
    "InitialState",
    "ExperimentConfig",
    "default_config",
    "load_config_file",
    "build_config",
    "config_to_dict",
]

EXPERIMENTS = ("phase-portrait", "fidelity", "qfi-map", "jz-series", "sweep")
SWEEP_METRICS = ("f_bar_max", "fidelity", "jz", "lambda_c")

_TOP_LEVEL_KEYS = {
    "experiment",
    "n_particles",
    "lambda",
    "time",
    "initial_state",
    "output",
    "seed",
    "workers",
    "slices",
    "metric",
    "matrix",
}


@dataclass(frozen=True)
class GridSpec:
    """Inclusive linear grid from lo to hi with ``count`` points."""

    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("grid bounds must be finite")
        if self.hi < self.lo:
            raise ValueError(f"grid max {self.hi} below min {self.lo}")
        if self.count < 1:
            raise ValueError(f"grid count must be at least 1, got {self.count}")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)

    def to_dict(self) -> dict:
        return {"min": self.lo, "max": self.hi, "count": self.count}


ValueSpec = Union[float, GridSpec]


def value_grid(spec: ValueSpec) -> np.ndarray:
    """Materialize a scalar-or-grid spec as an array of floats."""
    if isinstance(spec, GridSpec):
        return spec.values()
    return np.array([float(spec)])


@dataclass(frozen=True)
class TimeSpec:
    """Sampling times: ``samples`` points over [0, t_max], or just [t_max] when samples == 1."""

    t_max: float
    samples: int

    def __post_init__(self):
        if not (math.isfinite(self.t_max) and self.t_max > 0.0):
            raise ValueError(f"time max must be positive, got {self.t_max}")
        if self.samples < 1:
            raise ValueError(f"sample count must be at least 1, got {self.samples}")

    def values(self) -> np.ndarray:
        if self.samples == 1:
            return np.array([self.t_max])
        return np.linspace(0.0, self.t_max, self.samples)

    def to_dict(self) -> dict:
        return {"max": self.t_max, "samples": self.samples}


@dataclass(frozen=True)
class InitialState:
    """Polar angles of the initial spin coherent state (grids allowed in sweeps)."""

    theta: ValueSpec = 0.0
    phi: ValueSpec = 0.0

    def to_dict(self) -> dict:
        return {"theta": _spec_to_dict(self.theta), "phi": _spec_to_dict(self.phi)}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n_particles: int
    lam: ValueSpec
    time: TimeSpec
    initial_state: InitialState
    output: str
    seed: int = 0
    workers: int = 1
    slices: tuple[float, ...] = ()
    metric: str | None = None
    matrix: bool = False

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(
                f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}"
            )
        if self.n_particles < 2:
            raise ValueError(f"n_particles must be at least 2, got {self.n_particles}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if self.experiment == "sweep":
            if self.metric is None:
                raise ValueError("sweep requires a metric")
            if self.metric not in SWEEP_METRICS:
                raise ValueError(
                    f"unknown metric {self.metric!r}; choose from {SWEEP_METRICS}"
                )
        elif self.metric is not None:
            raise ValueError("metric is only meaningful for the sweep experiment")
        if self.slices and self.experiment != "qfi-map":
            raise ValueError("slices are only meaningful for the qfi-map experiment")
        if self.experiment != "sweep":
            for name, spec in (("theta", self.initial_state.theta), ("phi", self.initial_state.phi)):
                if isinstance(spec, GridSpec):
                    raise ValueError(f"{name} grids are only allowed in sweeps")


def default_config(experiment: str, output: str | None = None) -> ExperimentConfig:
    """Built-in defaults for each experiment; every field can be overridden."""
    out = output if output is not None else f"out/{experiment}"
    if experiment == "phase-portrait":
        return ExperimentConfig(
            experiment=experiment,
            n_particles=100,
            lam=GridSpec(1.0, 4.0, 2),
            time=TimeSpec(20.0, 201),
            initial_state=InitialState(0.0, 0.0),
            output=out,
        )
    if experiment == "fidelity":
        return ExperimentConfig(
            experiment=experiment,
            n_particles=100,
            lam=GridSpec(1.0, 4.0, 2),
            time=TimeSpec(30.0, 600),
            initial_state=InitialState(math.pi / 2.0, 0.0),
            output=out,
        )
    if experiment == "qfi-map":
        return ExperimentConfig(
            experiment=experiment,
            n_particles=500,
            lam=GridSpec(0.2, 4.0, 60),
            time=TimeSpec(30.0, 240),
            initial_state=InitialState(math.pi / 2.0, 0.0),
            output=out,
            slices=(6.0, 24.0),
        )
    if experiment == "jz-series":
        return ExperimentConfig(
            experiment=experiment,
            n_particles=100,
            lam=GridSpec(2.0 / 3.0, 3.0, 2),
            time=TimeSpec(2.0, 400),
            initial_state=InitialState(0.0, 0.0),
            output=out,
        )
    if experiment == "sweep":
        return ExperimentConfig(
            experiment=experiment,
            n_particles=100,
            lam=1.0,
            time=TimeSpec(6.0, 1),
            initial_state=InitialState(0.0, 0.0),
            output=out,
            metric="f_bar_max",
        )
    raise ValueError(f"unknown experiment {experiment!r}; choose from {EXPERIMENTS}")


def _spec_to_dict(spec: ValueSpec):
    if isinstance(spec, GridSpec):
        return spec.to_dict()
    return float(spec)


def _spec_from_value(value, context: str) -> ValueSpec:
    if isinstance(value, bool):
        raise ValueError(f"{context}: expected a number or a min/max/count table")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, dict):
        unknown = set(value) - {"min", "max", "count"}
        if unknown:
            raise ValueError(f"{context}: unknown keys {sorted(unknown)}")
        missing = {"min", "max", "count"} - set(value)
        if missing:
            raise ValueError(f"{context}: missing keys {sorted(missing)}")
        return GridSpec(float(value["min"]), float(value["max"]), int(value["count"]))
    raise ValueError(f"{context}: expected a number or a min/max/count table")


def config_to_dict(config: ExperimentConfig) -> dict:
    """Plain-dict mirror of the config, matching the TOML schema."""
    out = {
        "experiment": config.experiment,
        "n_particles": config.n_particles,
        "lambda": _spec_to_dict(config.lam),
        "time": config.time.to_dict(),
        "initial_state": config.initial_state.to_dict(),
        "output": str(config.output),
        "seed": config.seed,
        "workers": config.workers,
        "matrix": config.matrix,
    }
    if config.slices:
        out["slices"] = list(config.slices)
    if config.metric is not None:
        out["metric"] = config.metric
    return out


def load_config_file(path: str | Path) -> dict:
    """Parse a TOML config file and reject unknown keys."""
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    unknown = set(raw) - _TOP_LEVEL_KEYS
    if unknown:
        raise ValueError(f"unknown config keys {sorted(unknown)} in {path}")
    if "time" in raw:
        extra = set(raw["time"]) - {"max", "samples"}
        if extra:
            raise ValueError(f"unknown time keys {sorted(extra)} in {path}")
    if "initial_state" in raw:
        extra = set(raw["initial_state"]) - {"theta", "phi"}
        if extra:
            raise ValueError(f"unknown initial_state keys {sorted(extra)} in {path}")
    return raw


def build_config(
    experiment: str,
    file_values: dict | None = None,
    overrides: dict | None = None,
) -> ExperimentConfig:
    """Assemble a config: defaults, then config-file values, then overrides."""
    config = default_config(experiment)
    for source, name in ((file_values, "config file"), (overrides, "overrides")):
        if not source:
            continue
        if "experiment" in source and source["experiment"] != experiment:
            raise ValueError(
                f"{name} names experiment {source['experiment']!r}, expected {experiment!r}"
            )
        config = _apply(config, source)
    return config


def _apply(config: ExperimentConfig, values: dict) -> ExperimentConfig:
    changes = {}
    if "n_particles" in values:
        changes["n_particles"] = int(values["n_particles"])
    if "lambda" in values:
        changes["lam"] = _spec_from_value(values["lambda"], "lambda")
    if "time" in values:
        spec = values["time"]
        changes["time"] = TimeSpec(
            float(spec.get("max", config.time.t_max)),
            int(spec.get("samples", config.time.samples)),
        )
    if "initial_state" in values:
        spec = values["initial_state"]
        theta = (
            _spec_from_value(spec["theta"], "theta")
            if "theta" in spec
            else config.initial_state.theta
        )
        phi = (
            _spec_from_value(spec["phi"], "phi")
            if "phi" in spec
            else config.initial_state.phi
        )
        changes["initial_state"] = InitialState(theta, phi)
    if "output" in values:
        changes["output"] = str(values["output"])
    if "seed" in values:
        changes["seed"] = int(values["seed"])
    if "workers" in values:
        changes["workers"] = int(values["workers"])
    if "slices" in values:
        changes["slices"] = tuple(float(x) for x in values["slices"])
    if "metric" in values:
        changes["metric"] = str(values["metric"])
    if "matrix" in values:
        changes["matrix"] = bool(values["matrix"])
    return replace(config, **changes)
