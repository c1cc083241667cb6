"""Configuration assembly, TOML loading, and the CLI surface."""

import math

import numpy as np
import pytest

from doublewell_qfi import GridSpec, TimeSpec, build_config, default_config, load_config_file
from doublewell_qfi.cli import build_parser, main


def test_defaults_mirror_figure_setups():
    fid = default_config("fidelity")
    assert fid.n_particles == 100
    np.testing.assert_allclose(fid.lam.values(), [1.0, 4.0])
    assert fid.time.t_max == 30.0 and fid.time.samples == 600
    assert fid.initial_state.theta == pytest.approx(math.pi / 2.0)

    qmap = default_config("qfi-map")
    assert qmap.n_particles == 500
    assert qmap.lam.count == 60 and (qmap.lam.lo, qmap.lam.hi) == (0.2, 4.0)
    assert qmap.time.samples == 240
    assert qmap.slices == (6.0, 24.0)

    jz = default_config("jz-series")
    assert jz.n_particles == 100
    np.testing.assert_allclose(jz.lam.values(), [2.0 / 3.0, 3.0])
    assert jz.time.t_max == 2.0 and jz.time.samples == 400
    assert jz.initial_state.theta == 0.0

    with pytest.raises(ValueError):
        default_config("frequency-comb")


def test_grid_spec():
    np.testing.assert_allclose(GridSpec(0.0, 1.0, 5).values(), [0, 0.25, 0.5, 0.75, 1.0])
    assert GridSpec(2.0, 2.0, 1).values().tolist() == [2.0]
    with pytest.raises(ValueError):
        GridSpec(1.0, 0.0, 3)
    with pytest.raises(ValueError):
        GridSpec(0.0, 1.0, 0)


def test_time_spec_single_sample_is_endpoint():
    assert TimeSpec(6.0, 1).values().tolist() == [6.0]
    values = TimeSpec(2.0, 5).values()
    np.testing.assert_allclose(values, [0.0, 0.5, 1.0, 1.5, 2.0])
    with pytest.raises(ValueError):
        TimeSpec(0.0, 10)
    with pytest.raises(ValueError):
        TimeSpec(1.0, 0)


def test_load_config_file_round_trip(tmp_path):
    path = tmp_path / "exp.toml"
    path.write_text(
        """
experiment = "fidelity"
n_particles = 24
lambda = { min = 1.0, max = 4.0, count = 3 }
time = { max = 5.0, samples = 11 }
initial_state = { theta = 0.5, phi = 0.25 }
workers = 3
"""
    )
    config = build_config("fidelity", load_config_file(path))
    assert config.n_particles == 24
    assert config.lam.count == 3
    assert config.time.samples == 11
    assert config.initial_state.phi == 0.25
    assert config.workers == 3


def test_load_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "typo.toml"
    path.write_text("n_partciles = 10\n")
    with pytest.raises(ValueError, match="unknown config keys"):
        load_config_file(path)
    path.write_text("time = { max = 1.0, smaples = 3 }\n")
    with pytest.raises(ValueError, match="unknown time keys"):
        load_config_file(path)


def test_build_config_rejects_experiment_mismatch():
    with pytest.raises(ValueError, match="names experiment"):
        build_config("fidelity", {"experiment": "sweep"})


def test_override_precedence():
    file_values = {"n_particles": 30, "time": {"max": 9.0}}
    overrides = {"n_particles": 40}
    config = build_config("fidelity", file_values, overrides)
    assert config.n_particles == 40
    assert config.time.t_max == 9.0
    assert config.time.samples == 600  # untouched default


def test_sweep_metric_validation():
    with pytest.raises(ValueError, match="metric"):
        build_config("sweep", None, {"metric": None})
    with pytest.raises(ValueError, match="unknown metric"):
        build_config("sweep", None, {"metric": "entropy"})
    with pytest.raises(ValueError, match="only meaningful"):
        build_config("fidelity", None, {"metric": "jz"})
    with pytest.raises(ValueError, match="only meaningful"):
        build_config("fidelity", None, {"slices": [1.0]})
    with pytest.raises(ValueError, match="only allowed in sweeps"):
        build_config("fidelity", None, {"initial_state": {"theta": {"min": 0, "max": 1, "count": 2}}})


def test_cli_parses_value_specs():
    parser = build_parser()
    args = parser.parse_args(["qfi-map", "--lambda", "0.2:4:60", "--n", "100"])
    assert args.lam == {"min": 0.2, "max": 4.0, "count": 60}
    args = parser.parse_args(["fidelity", "--lambda", "1.5"])
    assert args.lam == 1.5
    with pytest.raises(SystemExit):
        parser.parse_args(["fidelity", "--lambda", "a:b:c"])
    args = parser.parse_args(["qfi-map", "--slices", "6,24"])
    assert args.slices == [6.0, 24.0]


def test_cli_runs_and_reports_errors(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(
        ["jz-series", "--n", "8", "--tmax", "0.5", "--samples", "5", "--out", str(out)]
    )
    assert code == 0
    assert (out / "jz_series.csv").exists()
    assert (out / "manifest.json").exists()

    code = main(["fidelity", "--config", str(tmp_path / "missing.toml")])
    assert code == 1
    assert "error" in capsys.readouterr().err
