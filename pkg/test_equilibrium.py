#!/usr/bin/env python3
"""
Tests for the Lotka-Sharpe solver and the assembled steady state.
"""

from types import SimpleNamespace

import numpy as np
import pytest

from equilibrium import (
    assemble_equilibrium,
    interaction_residuals,
    lotka_sharpe_integral,
    lotka_sharpe_residuals,
    open_loop_eigenvalues,
    solve_lotka_sharpe,
    survival_profile,
)
from model import AgeGrid, EquilibriumError, SpeciesKernels, harvesting_config
from model.configuration import harvesting_kernels


def _species(grid, mortality, birth, interaction=None):
    ones = np.ones(grid.size)
    return SpeciesKernels(
        index=1,
        grid=grid,
        mortality=np.broadcast_to(mortality, (grid.size,)) * ones,
        birth=np.broadcast_to(birth, (grid.size,)) * ones,
        interaction=ones if interaction is None else interaction,
    )


def test_survival_profile_basic_values():
    grid = AgeGrid(1.0, 100)
    species = _species(grid, 0.0, 1.0)
    survival = survival_profile(species, 1.0)
    assert survival[0] == 1.0
    assert survival[-1] == pytest.approx(np.exp(-1.0), rel=1e-14)


def test_unit_birth_without_mortality_has_zero_zeta():
    grid = AgeGrid(1.0, 100)
    assert solve_lotka_sharpe(_species(grid, 0.0, 1.0)) == pytest.approx(0.0, abs=1e-12)


def test_constant_birth_matches_closed_form():
    # 2 (1 - e^-zeta) / zeta = 1
    grid = AgeGrid(1.0, 4000)
    zeta = solve_lotka_sharpe(_species(grid, 0.0, 2.0))
    assert 2.0 * (1.0 - np.exp(-zeta)) / zeta == pytest.approx(1.0, abs=1e-6)


def test_zero_birth_kernel_rejected():
    grid = AgeGrid(1.0, 50)
    with pytest.raises(EquilibriumError):
        solve_lotka_sharpe(_species(grid, 0.5, 0.0))


def test_harvesting_zeta_and_residuals(harvest_eq):
    assert 1.0 < harvest_eq.zeta_1 < 1.4
    assert max(map(abs, lotka_sharpe_residuals(harvest_eq))) < 1e-8
    assert harvest_eq.zeta_1 == pytest.approx(harvest_eq.zeta_2, abs=1e-12)


def test_harvesting_zeta_converges_under_refinement(harvest_eq):
    fine = assemble_equilibrium(harvesting_config(N_a=100000))
    assert max(map(abs, lotka_sharpe_residuals(fine))) < 1e-10
    assert harvest_eq.zeta_1 == pytest.approx(fine.zeta_1, abs=1e-4)


def test_equilibrium_construction_identities(harvest_eq):
    assert harvest_eq.u_star == pytest.approx(harvest_eq.zeta_2 - harvest_eq.lambda_1, abs=1e-15)
    assert harvest_eq.lambda_2 == harvest_eq.zeta_1
    assert harvest_eq.x0_1 > 0 and harvest_eq.x0_2 > 0
    assert max(map(abs, interaction_residuals(harvest_eq))) < 1e-8
    # symmetric species with u* = zeta / 2
    assert harvest_eq.x0_2 == pytest.approx(2.0 * harvest_eq.x0_1, rel=1e-12)
    assert harvest_eq.profile_1[0] == pytest.approx(harvest_eq.x0_1)
    assert 0.0 < harvest_eq.survival_1[-1] < 1.0


def test_u_star_outside_admissible_range(harvest_cfg, harvest_eq):
    with pytest.raises(EquilibriumError, match="no positive equilibrium"):
        assemble_equilibrium(harvest_cfg, u_star=harvest_eq.zeta_2)
    with pytest.raises(EquilibriumError, match="no positive equilibrium"):
        assemble_equilibrium(harvest_cfg, u_star=0.0)


def test_newborn_density_vanishes_as_u_star_approaches_zeta_2(harvest_cfg, harvest_eq):
    near = assemble_equilibrium(harvest_cfg, u_star=harvest_eq.zeta_2 * (1.0 - 1e-9))
    assert 0.0 < near.x0_1 < 1e-6 * harvest_eq.x0_1


def test_zeta_decreases_with_mortality():
    zetas = []
    for mu_bar in (0.25, 0.5, 1.0):
        mu, k, b = harvesting_kernels(mu_bar=mu_bar)
        config = harvesting_config(mortality=(mu, mu))
        zetas.append(solve_lotka_sharpe(config.species(1)))
    assert zetas[0] > zetas[1] > zetas[2]


def test_lotka_sharpe_integral_monotone(harvest_eq):
    species = harvest_eq.species_1
    values = [lotka_sharpe_integral(species, z) for z in (-2.0, 0.0, 1.0, 3.0)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_open_loop_eigenvalues():
    assert open_loop_eigenvalues(SimpleNamespace(lambda_1=1.0, lambda_2=1.0)) == (1.0, -1.0)
    assert open_loop_eigenvalues(SimpleNamespace(lambda_1=4.0, lambda_2=1.0)) == (2.0, -2.0)


def test_harvesting_open_loop_eigenvalue(harvest_eq):
    growth, decay = open_loop_eigenvalues(harvest_eq)
    assert growth == pytest.approx(np.sqrt(harvest_eq.zeta_1 * (harvest_eq.zeta_2 - harvest_eq.u_star)))
    assert decay == -growth


def test_fingerprint_tracks_kernels(harvest_eq, harvest_cfg):
    assert harvest_eq.fingerprint == assemble_equilibrium(harvest_cfg).fingerprint
    other = assemble_equilibrium(harvest_cfg.replace(N_a=200))
    assert other.fingerprint != harvest_eq.fingerprint
