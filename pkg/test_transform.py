#!/usr/bin/env python3
"""
Tests for the (eta, psi) change of variables and the lumped-output estimate.
"""

import numpy as np
import pytest

from certificates import G_functional
from model import TransformError
from simulation import underpopulated_profiles
from transform import (
    P_functional,
    TransformedState,
    adjoint_eigenfunction,
    boundary_residual,
    forward_transform,
    measure_output,
    output_feedback_pi,
    output_mismatch,
    pi_functional,
    reconstruct,
    species_transform,
    total_population_kernel,
    v_map,
)


@pytest.fixture
def perturbed(harvest_eq):
    ages = harvest_eq.grid.ages
    x1 = harvest_eq.profile_1 * (1.3 + 0.2 * np.cos(3.0 * ages))
    x2 = harvest_eq.profile_2 * (0.7 + 0.1 * np.sin(2.0 * ages))
    return x1, x2


def test_equilibrium_maps_to_origin(harvest_eq):
    for i in (1, 2):
        assert pi_functional(harvest_eq, i, harvest_eq.profile(i)) == pytest.approx(1.0, abs=1e-12)
    state = forward_transform(harvest_eq, harvest_eq.profile_1, harvest_eq.profile_2)
    assert abs(state.eta_1) < 1e-12 and abs(state.eta_2) < 1e-12
    assert np.max(np.abs(state.psi_1)) < 1e-12
    assert np.max(np.abs(state.psi_2)) < 1e-12


def test_scaled_equilibrium_shifts_eta_only(harvest_eq):
    state = forward_transform(harvest_eq, 2.0 * harvest_eq.profile_1, 0.5 * harvest_eq.profile_2)
    assert state.eta_1 == pytest.approx(np.log(2.0), abs=1e-12)
    assert state.eta_2 == pytest.approx(np.log(0.5), abs=1e-12)
    assert np.max(np.abs(state.psi_1)) < 1e-12


def test_reconstruct_inverts_forward(harvest_eq, perturbed):
    state = forward_transform(harvest_eq, *perturbed)
    x1, x2 = reconstruct(harvest_eq, state)
    np.testing.assert_allclose(x1, perturbed[0], rtol=1e-12)
    np.testing.assert_allclose(x2, perturbed[1], rtol=1e-12)


def test_transformed_history_is_admissible(harvest_eq, perturbed):
    state = forward_transform(harvest_eq, *perturbed)
    for i in (1, 2):
        assert abs(P_functional(harvest_eq, i, state.psi(i))) < 1e-12
        assert np.all(state.psi(i) > -1.0)


def test_harvesting_initial_condition_is_underpopulated(harvest_eq):
    state = forward_transform(harvest_eq, *underpopulated_profiles(harvest_eq))
    assert state.eta_1 < 0.0 and state.eta_2 < 0.0
    assert np.all(np.isfinite(state.psi_1)) and np.all(np.isfinite(state.psi_2))


def test_non_positive_profile_rejected(harvest_eq):
    x1 = harvest_eq.profile_1.copy()
    x1[10] = 0.0
    with pytest.raises(TransformError, match="strictly positive"):
        forward_transform(harvest_eq, x1, harvest_eq.profile_2)
    with pytest.raises(TransformError):
        forward_transform(harvest_eq, harvest_eq.profile_1[:-1], harvest_eq.profile_2)


def test_reconstruct_rejects_history_below_minus_one(harvest_eq):
    size = harvest_eq.grid.size
    psi = np.zeros(size)
    psi[5] = -1.0
    with pytest.raises(TransformError, match="above -1"):
        reconstruct(harvest_eq, TransformedState(0.0, 0.0, psi, np.zeros(size)))


def test_v_map_values(harvest_eq):
    size = harvest_eq.grid.size
    for i in (1, 2):
        assert v_map(harvest_eq, i, np.zeros(size)) == 0.0
        assert v_map(harvest_eq, i, np.full(size, 0.25)) == pytest.approx(np.log(1.25), abs=1e-12)
        st = species_transform(harvest_eq, i)
        assert harvest_eq.grid.integrate(st.interaction_normalized) == pytest.approx(1.0, abs=1e-12)


def test_boundary_residual_of_equilibrium(harvest_eq):
    size = harvest_eq.grid.size
    for i in (1, 2):
        assert boundary_residual(harvest_eq, i, np.zeros(size)) == 0.0
        assert P_functional(harvest_eq, i, np.zeros(size)) == 0.0


def test_adjoint_eigenfunction_shape(harvest_eq):
    pi0 = adjoint_eigenfunction(harvest_eq, 1)
    assert pi0.values[-1] == 0.0
    assert np.all(pi0.values[:-1] > 0.0)
    assert np.all(np.diff(pi0.values[:-1]) < 0.0)


def test_species_transforms_are_cached(harvest_eq):
    assert species_transform(harvest_eq, 1) is species_transform(harvest_eq, 1)
    assert species_transform(harvest_eq, 1) is not species_transform(harvest_eq, 2)
    with pytest.raises(ValueError):
        species_transform(harvest_eq, 3)


def test_output_estimate_offset(harvest_eq, perturbed):
    q = total_population_kernel(harvest_eq)
    state = forward_transform(harvest_eq, *perturbed)
    for i in (1, 2):
        y = measure_output(harvest_eq, i, perturbed[i - 1], q)
        estimate = output_feedback_pi(harvest_eq, i, y, q)
        offset = np.log(estimate) - state.eta[i - 1]
        assert offset == pytest.approx(np.log1p(output_mismatch(harvest_eq, i, state.psi(i), q)), abs=1e-12)


def test_output_estimate_exact_at_equilibrium(harvest_eq):
    q = total_population_kernel(harvest_eq)
    y = measure_output(harvest_eq, 1, harvest_eq.profile_1, q)
    assert output_feedback_pi(harvest_eq, 1, y, q) == pytest.approx(1.0, abs=1e-14)


def test_degenerate_output_kernel_rejected(harvest_eq):
    size = harvest_eq.grid.size
    with pytest.raises(ValueError, match="degenerate output kernel"):
        measure_output(harvest_eq, 1, harvest_eq.profile_1, -np.ones(size))
    with pytest.raises(ValueError, match="must be positive"):
        output_feedback_pi(harvest_eq, 1, 0.0, np.ones(size))


def _random_histories(harvest_eq, count, seed):
    rng = np.random.default_rng(seed)
    ages = harvest_eq.grid.ages
    for n in range(count):
        if n % 2:
            yield rng.uniform(-0.95, 3.0, size=ages.size)
        else:
            modes = sum(rng.normal(scale=0.5) * np.cos(k * np.pi * ages + rng.uniform(0.0, np.pi))
                        for k in range(4))
            yield np.expm1(modes)


def test_v_map_bounded_by_history_functional(harvest_eq, harvest_cert):
    for i in (1, 2):
        sigma = harvest_cert.sigma(i)
        for psi in _random_histories(harvest_eq, 200, seed=i):
            assert abs(v_map(harvest_eq, i, psi)) <= G_functional(psi, sigma, harvest_eq.grid) * (1.0 + 1e-8) + 1e-12


def test_output_estimate_error_bounded_by_history_functional(harvest_eq, harvest_cert):
    ages = harvest_eq.grid.ages
    kernels = [total_population_kernel(harvest_eq), ages.copy(), np.exp(-2.0 * ages)]
    for n, psi_1 in enumerate(_random_histories(harvest_eq, 60, seed=11)):
        x1 = harvest_eq.profile_1 * np.exp(0.3 * np.sin(n)) * (1.0 + psi_1)
        state = forward_transform(harvest_eq, x1, harvest_eq.profile_2)
        bound = G_functional(state.psi_1, harvest_cert.sigma_1, harvest_eq.grid)
        for q in kernels:
            estimate = output_feedback_pi(harvest_eq, 1, measure_output(harvest_eq, 1, x1, q), q)
            assert abs(np.log(estimate) - state.eta_1) <= bound + 1e-12
