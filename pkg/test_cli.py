#!/usr/bin/env python3
"""
End-to-end tests of the command-line subcommands through dispatch().
"""

import json
import os

import numpy as np
import pytest

import app
import config
from app import EXIT_GUARD, EXIT_OK, EXIT_USAGE, dispatch

HARVESTING_CFG = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs", "harvesting.cfg")


def run(tmp_path, *argv, config=HARVESTING_CFG):
    return dispatch([argv[0], "--config", str(config), "--out", str(tmp_path), *argv[1:]])


def read_csv(path):
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().strip().split(",")
    return header, np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def manifest_lines(tmp_path):
    log_path = tmp_path / "runs.log"
    if not log_path.exists():
        return []
    return [json.loads(line) for line in log_path.read_text(encoding="utf-8").splitlines()]


def test_equilibrium_subcommand(tmp_path, capsys):
    assert run(tmp_path, "equilibrium") == EXIT_OK
    out = capsys.readouterr().out
    assert "zeta" in out and "open-loop eigenvalues" in out
    header, data = read_csv(tmp_path / "equilibrium.csv")
    assert header == ["a", "x1_star", "x2_star", "survival_1", "survival_2"]
    assert data.shape == (401, 5)
    assert data[0, 3] == 1.0
    entries = manifest_lines(tmp_path)
    assert len(entries) == 1
    assert entries[0]["subcommand"] == "equilibrium"
    assert len(entries[0]["config_hash"]) == 64
    assert entries[0]["outputs"] == [str(tmp_path / "equilibrium.csv")]


def test_transform_subcommand(tmp_path, capsys):
    assert run(tmp_path, "transform") == EXIT_OK
    assert "eta = (-0.2" in capsys.readouterr().out
    header, data = read_csv(tmp_path / "psi.csv")
    assert header == ["a", "psi1", "psi2"]
    assert np.all(data[:, 1:] > -1.0)


def test_simulate_from_profile_file(tmp_path):
    ages = np.linspace(0.0, 1.0, 11)
    table = tmp_path / "ic.csv"
    np.savetxt(table, np.column_stack([ages, 2.0 * np.exp(-ages), 4.0 * np.exp(-ages)]),
               delimiter=",", header="a,x1,x2", comments="")
    code = run(tmp_path, "simulate", "--solver", "odeide", "--ic", "file", "--ic-file", str(table),
               "--t-final", "1", "--snapshots", "0,1")
    assert code == EXIT_OK
    header, data = read_csv(tmp_path / "trajectory.csv")
    assert header == ["t", "eta1", "eta2", "u", "V", "G1", "G2", "psi_sup1", "psi_sup2"]
    assert data.shape[0] == 401
    assert data[-1, 0] == pytest.approx(1.0)
    assert (tmp_path / "profile_t0.csv").exists() and (tmp_path / "profile_t1.csv").exists()
    parameters = manifest_lines(tmp_path)[-1]["parameters"]
    assert parameters["solver"] == "odeide" and parameters["snapshots"] == [0.0, 1.0]


def test_open_loop_simulation_exits_with_guard_code(tmp_path, capsys):
    assert run(tmp_path, "simulate", "--solver", "odeide", "--open-loop") == EXIT_GUARD
    assert "❌ simulation: blow-up guard" in capsys.readouterr().err
    _, data = read_csv(tmp_path / "trajectory.csv")
    assert data[-1, 0] < 40.0
    assert manifest_lines(tmp_path) == []


def test_usage_errors(tmp_path, capsys):
    assert run(tmp_path, "simulate", "--solver", "euler") == EXIT_USAGE
    assert "❌ usage" in capsys.readouterr().err
    assert run(tmp_path, "simulate", "--ic", "file") == EXIT_USAGE
    assert "--ic-file" in capsys.readouterr().err
    assert dispatch(["frobnicate"]) == EXIT_USAGE


def test_help_exits_cleanly(capsys):
    assert dispatch(["--help"]) == EXIT_OK
    assert "reproduce-figures" in capsys.readouterr().out


def test_missing_config_file(tmp_path, capsys):
    assert run(tmp_path, "equilibrium", config=tmp_path / "absent.cfg") == EXIT_USAGE
    assert "❌ config: config file not found" in capsys.readouterr().err


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[model]\nmu_bar_3 = 1\n", encoding="utf-8")
    assert run(tmp_path, "equilibrium", config=cfg) == EXIT_USAGE
    assert "unknown key 'mu_bar_3'" in capsys.readouterr().err


def test_infeasible_equilibrium(tmp_path, capsys):
    cfg = tmp_path / "infeasible.cfg"
    cfg.write_text("[model]\nu_star = 5\n", encoding="utf-8")
    assert run(tmp_path, "equilibrium", config=cfg) == EXIT_USAGE
    assert "no positive equilibrium" in capsys.readouterr().err


def test_certify_writes_figure_data(tmp_path, capsys):
    assert run(tmp_path, "certify", "--resolution", "80") == EXIT_OK
    out = capsys.readouterr().out
    assert "c_star" in out and "B(1) = 1.188" in out
    header, bcurve = read_csv(tmp_path / "bcurve.csv")
    assert header == ["beta", "B"] and bcurve.shape == (401, 2)
    assert np.all(np.diff(bcurve[:, 1]) >= 0.0)
    header, roa = read_csv(tmp_path / "roa.csv")
    assert header == ["eta1", "eta2", "V3", "in_D", "u"]
    assert roa.shape == (80 * 80, 5)
    assert set(np.unique(roa[:, 3])) <= {0.0, 1.0}


def test_default_initial_condition_alias_and_repeatability(tmp_path):
    runs = {}
    for name, ic in (("first", "paper"), ("second", "paper"), ("alias", "underpopulated")):
        out = tmp_path / name
        assert run(out, "simulate", "--solver", "odeide", "--ic", ic, "--t-final", "2", "--snapshots", "0,2") == EXIT_OK
        runs[name] = out
    for csv_name in ("trajectory.csv", "profile_t0.csv", "profile_t2.csv"):
        reference = (runs["first"] / csv_name).read_bytes()
        assert (runs["second"] / csv_name).read_bytes() == reference
        assert (runs["alias"] / csv_name).read_bytes() == reference
    assert manifest_lines(runs["first"])[-1]["parameters"]["ic"] == "paper"


def test_certify_output_is_bit_identical(tmp_path):
    for name in ("a", "b"):
        assert run(tmp_path / name, "certify", "--resolution", "60") == EXIT_OK
    for csv_name in ("bcurve.csv", "roa.csv"):
        assert (tmp_path / "a" / csv_name).read_bytes() == (tmp_path / "b" / csv_name).read_bytes()


def test_numerical_failure_reported_without_traceback(tmp_path, capsys, monkeypatch):
    def failing(args, model, store):
        raise RuntimeError("Reduced ODE integration failed: excess work done")

    monkeypatch.setitem(app.COMMANDS, "equilibrium", failing)
    assert run(tmp_path, "equilibrium") == EXIT_USAGE
    assert "❌ RuntimeError: Reduced ODE integration failed" in capsys.readouterr().err
    assert manifest_lines(tmp_path) == []


def test_invalid_environment_setting_is_a_config_error(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("AGESTRUCT_THREADS", "many")
    config.get_settings.cache_clear()
    try:
        assert run(tmp_path, "equilibrium") == EXIT_USAGE
        assert "❌ config: environment AGESTRUCT_THREADS='many'" in capsys.readouterr().err
    finally:
        monkeypatch.delenv("AGESTRUCT_THREADS")
        config.get_settings.cache_clear()


@pytest.mark.slow
def test_reproduce_figures_writes_all_outputs(tmp_path):
    assert run(tmp_path, "reproduce-figures", "--resolution", "80") == EXIT_OK
    for csv_name in ("bcurve.csv", "roa.csv", "trajectory.csv", "profile_t0.csv", "profile_t40.csv"):
        assert (tmp_path / csv_name).exists(), csv_name
    _, trajectory = read_csv(tmp_path / "trajectory.csv")
    assert trajectory[-1, 0] == pytest.approx(40.0)
    assert np.linalg.norm(trajectory[-1, 1:3]) < 1e-3
    assert np.all(trajectory[:, 3] > 0.0)
    assert manifest_lines(tmp_path)[-1]["subcommand"] == "reproduce-figures"


@pytest.mark.slow
def test_check_battery_passes(tmp_path, capsys):
    assert run(tmp_path, "check", "--seed", "0") == EXIT_OK
    out = capsys.readouterr().out
    assert "❌" not in out
    for name in ("lotka-sharpe residual", "h series", "level-set invariance", "decay-rate certificate"):
        assert f"✅ {name}" in out
