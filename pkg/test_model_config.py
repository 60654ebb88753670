#!/usr/bin/env python3
"""
Tests for the run configuration: validation, the config file reader and table inputs.
"""

import os

import numpy as np
import pytest

from config import load_settings
from equilibrium import assemble_equilibrium
from ingest import load_config, load_profiles
from model import AgeGrid, ConfigError, EquilibriumError, harvesting_config

REPO_ROOT = os.path.dirname(os.path.abspath(__file__))
HARVESTING_CFG = os.path.join(REPO_ROOT, "configs", "harvesting.cfg")


def _write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_harvesting_config_file_loads():
    config = load_config(HARVESTING_CFG)
    assert config.A == 1.0
    assert (config.c1, config.c2, config.theta) == (1.0, 1.0, 1.0)
    assert config.N_a == 400
    assert config.T_final == 40.0
    assert config.mortality[0].params == (0.5,)
    assert config.birth[1].params == (3.0,)
    assert config.interaction[0].params == (0.4,)
    assert config.snapshots == (0.0, 5.0, 10.0, 20.0, 40.0)
    assert config.model_dump() == harvesting_config().model_dump()


def test_zero_gain_rejected(tmp_path):
    path = _write(tmp_path, "[control]\nc1 = 0\n")
    with pytest.raises(ConfigError, match="gain c1 must be positive"):
        load_config(path)


def test_u_star_at_zeta_2_rejected(tmp_path, harvest_eq):
    path = _write(tmp_path, f"[model]\nu_star = {harvest_eq.zeta_2:.17g}\n")
    with pytest.raises(EquilibriumError, match="no positive equilibrium"):
        load_config(path)


def test_unknown_key_rejected(tmp_path):
    path = _write(tmp_path, "[grid]\nN_a = 100\nspacing = 2\n")
    with pytest.raises(ConfigError, match="unknown key 'spacing'"):
        load_config(path)


def test_unknown_section_rejected(tmp_path):
    path = _write(tmp_path, "[plotting]\ncolor = red\n")
    with pytest.raises(ConfigError, match="unknown section"):
        load_config(path)


def test_non_numeric_value_rejected(tmp_path):
    path = _write(tmp_path, "[model]\nmu_bar_1 = half\n")
    with pytest.raises(ConfigError, match="not a number"):
        load_config(path)


def test_dt_policy_is_fixed(tmp_path):
    path = _write(tmp_path, "[grid]\ndt_policy = adaptive\n")
    with pytest.raises(ConfigError, match="dt_policy"):
        load_config(path)


def test_missing_file_is_config_error(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(str(tmp_path / "absent.cfg"))


def test_parabolic_interaction_needs_age_one(tmp_path):
    path = _write(tmp_path, "[model]\nA = 2\n")
    with pytest.raises(ConfigError, match="interaction kernel of species 1 must be non-negative"):
        load_config(path)


def test_tabulated_and_gaussian_kernels(tmp_path):
    ages = np.linspace(0.0, 1.0, 21)
    np.savetxt(tmp_path / "mu.csv", np.column_stack([ages, 0.5 * np.exp(ages)]), delimiter=",",
               header="a,mu", comments="")
    path = _write(tmp_path, "[model]\nmu_file_1 = mu.csv\nk_form_2 = gaussian\nk_bar_2 = 6\n"
                            "k_center_2 = 0.3\nk_width_2 = 0.15\n[grid]\nN_a = 200\n")
    config = load_config(path)
    assert config.mortality[0].form.value == "tabulated"
    assert config.birth[1].params == (6.0, 0.3, 0.15)
    sampled = config.species(1).mortality
    assert np.allclose(sampled, 0.5 * np.exp(config.grid.ages), rtol=2e-3)


def test_replace_revalidates(harvest_cfg):
    assert harvest_cfg.replace(N_a=200).grid.n_intervals == 200
    with pytest.raises(ValueError):
        harvest_cfg.replace(c2=-1.0)


def test_grid_geometry():
    grid = AgeGrid(1.0, 4)
    assert grid.step == 0.25
    assert grid.size == 5
    assert grid.integrate(np.ones(5)) == pytest.approx(1.0)
    assert grid.integrate(grid.ages) == pytest.approx(0.5)
    assert np.allclose(grid.tail(np.ones(5)), [1.0, 0.75, 0.5, 0.25, 0.0])
    with pytest.raises(ValueError):
        AgeGrid(1.0, 1)


def test_profile_table_on_grid_and_interpolated(tmp_path, harvest_eq):
    grid = harvest_eq.grid
    table = np.column_stack([grid.ages, harvest_eq.profile_1, harvest_eq.profile_2])
    np.savetxt(tmp_path / "ic.csv", table, delimiter=",", header="a,x1,x2", comments="")
    x1, x2 = load_profiles(str(tmp_path / "ic.csv"), grid)
    assert np.array_equal(x1, harvest_eq.profile_1)

    coarse = np.linspace(0.0, 1.0, 11)
    np.savetxt(tmp_path / "coarse.csv", np.column_stack([coarse, 1.0 + coarse, 2.0 + coarse]), delimiter=",")
    x1, x2 = load_profiles(str(tmp_path / "coarse.csv"), grid)
    assert np.allclose(x1, 1.0 + grid.ages)
    assert np.allclose(x2, 2.0 + grid.ages)


def test_non_positive_profile_table_rejected(tmp_path, harvest_eq):
    grid = harvest_eq.grid
    table = np.column_stack([grid.ages, np.zeros(grid.size), harvest_eq.profile_2])
    np.savetxt(tmp_path / "bad.csv", table, delimiter=",")
    with pytest.raises(ConfigError, match="strictly positive"):
        load_profiles(str(tmp_path / "bad.csv"), grid)


def test_equilibrium_default_u_star_is_half_zeta_2(harvest_cfg):
    eq = assemble_equilibrium(harvest_cfg)
    assert eq.u_star == pytest.approx(0.5 * eq.zeta_2, rel=0, abs=1e-15)


# environment settings

def test_settings_defaults_and_overrides():
    settings = load_settings({})
    assert settings.threads == 0 and settings.worker_count >= 1
    assert settings.config_path == "configs/harvesting.cfg"
    settings = load_settings({"AGESTRUCT_THREADS": "3", "AGESTRUCT_LOG_LEVEL": "info", "AGESTRUCT_OUTPUT_DIR": " "})
    assert settings.worker_count == 3
    assert settings.log_level == "INFO"
    assert settings.output_dir == "out"


@pytest.mark.parametrize("key,value", [
    ("AGESTRUCT_THREADS", "many"),
    ("AGESTRUCT_THREADS", "-2"),
    ("AGESTRUCT_LOG_LEVEL", "loud"),
])
def test_settings_reject_bad_environment(key, value):
    with pytest.raises(ConfigError, match=f"environment {key}="):
        load_settings({key: value})
