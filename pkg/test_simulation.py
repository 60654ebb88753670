#!/usr/bin/env python3
"""
Tests for the closed-loop solvers, the run driver, trajectory diagnostics and
the invariance battery.
"""

import numpy as np
import pytest

from certificates import V_total, build_certificate, decay_rate_estimate
from equilibrium import assemble_equilibrium
from model import SimulationGuardError, harvesting_config
from simulation import (
    ClosedLoopSolver,
    HistoryBuffer,
    SimulationContext,
    SolverFactory,
    cross_solver_gap,
    fit_exponential,
    fit_growth_rate,
    fit_psi_decay,
    fit_state_decay,
    initial_state,
    run_closed_loop,
    run_invariance_battery,
    sample_invariance_states,
    step_ipde,
    step_ode_ide,
)
from transform import P_functional, TransformedState, boundary_residual, forward_transform


@pytest.fixture(scope="module")
def coarse_cfg():
    return harvesting_config(N_a=100)


@pytest.fixture(scope="module")
def coarse_eq(coarse_cfg):
    return assemble_equilibrium(coarse_cfg)


@pytest.fixture(scope="module")
def coarse_cert(coarse_cfg, coarse_eq):
    return build_certificate(coarse_eq, coarse_cfg.gains)


@pytest.fixture(scope="module")
def reference_run(harvest_cfg, harvest_eq, harvest_cert):
    return run_closed_loop(harvest_cfg, "underpopulated", solver="ipde", t_final=40.0, eq=harvest_eq, cert=harvest_cert)


def _perturbed_state(eq):
    ages = eq.grid.ages
    return forward_transform(eq, eq.profile_1 * (1.0 + 0.2 * np.cos(np.pi * ages)),
                             eq.profile_2 * (1.0 - 0.1 * np.sin(2.0 * np.pi * ages)))


# building blocks

def test_history_buffer_order():
    history = HistoryBuffer([0.0, 0.1, 0.2, 0.3])
    history.push(-0.5)
    np.testing.assert_array_equal(history.ordered(), [-0.5, 0.0, 0.1, 0.2])
    assert history.newest == -0.5
    assert len(history) == 4
    with pytest.raises(ValueError):
        history.push(-1.0)
    with pytest.raises(ValueError):
        HistoryBuffer([0.0])
    with pytest.raises(ValueError):
        HistoryBuffer([0.0, -1.5])


def test_ipde_step_keeps_equilibrium(harvest_eq):
    x1, x2 = step_ipde(harvest_eq, harvest_eq.profile_1, harvest_eq.profile_2, harvest_eq.u_star)
    np.testing.assert_allclose(x1, harvest_eq.profile_1, rtol=1e-10)
    np.testing.assert_allclose(x2, harvest_eq.profile_2, rtol=1e-10)


def test_ode_ide_step_keeps_origin(harvest_eq):
    origin = TransformedState.at_origin(harvest_eq.grid.size)
    advanced = step_ode_ide(harvest_eq, origin, harvest_eq.u_star)
    assert advanced.eta_1 == 0.0 and advanced.eta_2 == 0.0
    assert not np.any(advanced.psi_1) and not np.any(advanced.psi_2)


def test_ode_ide_step_conserves_P_and_enforces_renewal(harvest_eq):
    state = _perturbed_state(harvest_eq)
    for _ in range(50):
        state = step_ode_ide(harvest_eq, state, lambda eta: harvest_eq.u_star)
    for i in (1, 2):
        assert abs(P_functional(harvest_eq, i, state.psi(i))) < 1e-12
        assert abs(boundary_residual(harvest_eq, i, state.psi(i))) < 1e-14


def test_solver_factory_registry(harvest_eq, harvest_cfg):
    assert {"ipde", "odeide"} <= set(SolverFactory.list_available_solvers())
    context = SimulationContext(eq=harvest_eq, gains=harvest_cfg.gains)
    assert SolverFactory.get_solver("ipde", context) is not SolverFactory.get_solver("ipde", context)
    capabilities = SolverFactory.get_all_capabilities(context)
    assert capabilities["odeide"]["feedback"] == ["state", "output"]
    with pytest.raises(ValueError, match="Unknown solver type"):
        SolverFactory.get_solver("euler", context)
    with pytest.raises(ValueError, match="must inherit"):
        SolverFactory.register_solver("bogus", dict)
    assert issubclass(type(SolverFactory.get_solver("odeide", context)), ClosedLoopSolver)


def test_context_rejects_unknown_feedback(harvest_eq, harvest_cfg):
    with pytest.raises(ValueError, match="Unknown feedback mode"):
        SimulationContext(eq=harvest_eq, gains=harvest_cfg.gains, feedback="observer")
    context = SimulationContext(eq=harvest_eq, gains=harvest_cfg.gains, feedback="output")
    assert context.output_kernel.shape == (harvest_eq.grid.size,)


def test_initial_state_modes(harvest_eq):
    assert initial_state(harvest_eq, "underpopulated").eta_1 < 0.0
    scaled = initial_state(harvest_eq, "equilibrium_scaled", factor=2.0)
    assert scaled.eta_1 == pytest.approx(np.log(2.0), abs=1e-12)
    with pytest.raises(ValueError, match="needs a factor"):
        initial_state(harvest_eq, "equilibrium_scaled")
    with pytest.raises(ValueError, match="needs a transformed state"):
        initial_state(harvest_eq, "eta-psi")
    with pytest.raises(ValueError, match="Unknown ic_mode"):
        initial_state(harvest_eq, "random")


# runs

@pytest.mark.parametrize("solver", ["ipde", "odeide"])
def test_equilibrium_is_a_fixed_point(coarse_cfg, coarse_eq, coarse_cert, solver):
    traj = run_closed_loop(coarse_cfg, "equilibrium", solver=solver, t_final=5.0, snapshots=(),
                           eq=coarse_eq, cert=coarse_cert)
    assert np.max(np.abs(traj.eta_series)) < 1e-8
    np.testing.assert_allclose(traj.u_series, coarse_eq.u_star, rtol=1e-8)


@pytest.mark.parametrize("solver", ["ipde", "odeide"])
def test_closed_loop_converges_on_coarse_grid(coarse_cfg, coarse_eq, coarse_cert, solver):
    traj = run_closed_loop(coarse_cfg, "underpopulated", solver=solver, t_final=20.0, snapshots=(),
                           eq=coarse_eq, cert=coarse_cert)
    assert np.linalg.norm(traj.final_eta) < 1e-3
    assert np.min(traj.u_series) > 0.0
    assert np.all(traj.diagnostics["positive"] == 1.0)
    assert np.max(np.abs(traj.diagnostics["P1"])) < 1e-8


def test_output_feedback_converges(coarse_cfg, coarse_eq, coarse_cert):
    state_run = run_closed_loop(coarse_cfg, "underpopulated", solver="odeide", t_final=20.0, snapshots=(),
                                eq=coarse_eq, cert=coarse_cert)
    output_run = run_closed_loop(coarse_cfg, "underpopulated", solver="odeide", feedback="output", t_final=20.0,
                                 snapshots=(), eq=coarse_eq, cert=coarse_cert)
    assert output_run.u_series[0] != state_run.u_series[0]
    assert np.linalg.norm(output_run.final_eta) < 1e-3
    assert output_run.u_series[-1] == pytest.approx(coarse_eq.u_star, abs=1e-3)


def test_open_loop_trips_blow_up_guard(coarse_cfg, coarse_eq, coarse_cert):
    with pytest.raises(SimulationGuardError) as info:
        run_closed_loop(coarse_cfg, "underpopulated", solver="odeide", open_loop=True, t_final=40.0,
                        snapshots=(), eq=coarse_eq, cert=coarse_cert)
    error = info.value
    assert error.guard == "blow-up guard"
    assert str(error).startswith("blow-up guard: ")
    partial = error.trajectory
    assert partial is not None
    assert 0.0 < partial.times[-1] < 40.0
    assert np.all(partial.u_series == coarse_eq.u_star)


def test_open_loop_growth_rate(coarse_cfg, coarse_eq, coarse_cert):
    size = coarse_eq.grid.size
    start = TransformedState(-0.01, -0.01, np.zeros(size), np.zeros(size))
    traj = run_closed_loop(coarse_cfg, "eta-psi", state=start, solver="odeide", open_loop=True,
                           t_final=8.0, snapshots=(), eq=coarse_eq, cert=coarse_cert)
    expected = np.sqrt(coarse_eq.lambda_1 * coarse_eq.lambda_2)
    assert fit_growth_rate(traj, t_start=3.0) == pytest.approx(expected, rel=0.15)


def test_snapshots_map_to_nearest_step(coarse_cfg, coarse_eq, coarse_cert):
    traj = run_closed_loop(coarse_cfg, "underpopulated", t_final=1.0, snapshots=(0.0, 0.5, 99.0),
                           eq=coarse_eq, cert=coarse_cert)
    assert sorted(traj.profile_snapshots) == [0.0, 0.5]
    x1, x2 = traj.profile_snapshots[0.5]
    assert x1.shape == x2.shape == (coarse_eq.grid.size,)
    assert traj.times.size == 101


def test_non_positive_horizon_rejected(coarse_cfg, coarse_eq, coarse_cert):
    with pytest.raises(ValueError, match="t_final must be positive"):
        run_closed_loop(coarse_cfg, "underpopulated", t_final=0.0, eq=coarse_eq, cert=coarse_cert)


# diagnostics

def test_fit_exponential_recovers_rate():
    t = np.linspace(0.0, 5.0, 51)
    prefactor, rate = fit_exponential(t, 3.0 * np.exp(-2.0 * t))
    assert prefactor == pytest.approx(3.0, rel=1e-10)
    assert rate == pytest.approx(-2.0, rel=1e-10)
    with pytest.raises(ValueError, match="window empty"):
        fit_exponential([1.0], [1.0])
    with pytest.raises(ValueError):
        fit_exponential([0.0, 1.0], [1.0, 0.0])


def test_psi_fit_needs_a_history(coarse_cfg, coarse_eq, coarse_cert):
    traj = run_closed_loop(coarse_cfg, "equilibrium", solver="odeide", t_final=3.0, snapshots=(),
                           eq=coarse_eq, cert=coarse_cert)
    with pytest.raises(ValueError, match="window empty"):
        fit_psi_decay(traj)


# invariance battery

def test_invariance_samples_lie_inside_level_set(certified, harvest_cfg, harvest_eq):
    cert, _ = certified
    states = sample_invariance_states(harvest_eq, harvest_cfg.gains, cert, count=6, seed=7)
    again = sample_invariance_states(harvest_eq, harvest_cfg.gains, cert, count=6, seed=7)
    for n, (state, twin) in enumerate(zip(states, again)):
        assert state.eta_1 == twin.eta_1
        value = V_total(state.eta, state.psi_1, state.psi_2, cert, harvest_cfg.gains, harvest_eq.grid)
        assert value < cert.c_star
        if n % 2 == 0:
            assert not np.any(state.psi_1)


def test_invariance_battery_short(certified, harvest_cfg, harvest_eq):
    cert, _ = certified
    results = run_invariance_battery(harvest_cfg, harvest_eq, cert, count=4, seed=1, t_final=2.0, progress=False)
    assert len(results) == 4
    assert all(r.passed for r in results), [r for r in results if not r.passed]


# certificates along trajectories

def test_decay_rate_meets_certificate(harvest_cfg, harvest_eq, harvest_cert):
    size = harvest_eq.grid.size
    start = TransformedState(1e-2, 1e-2, np.zeros(size), np.zeros(size))
    traj = run_closed_loop(harvest_cfg, "eta-psi", state=start, solver="odeide", t_final=15.0, snapshots=(),
                           eq=harvest_eq, cert=harvest_cert)
    bound = decay_rate_estimate(harvest_cfg.gains, harvest_cert.sigma_1, harvest_cert.sigma_2,
                                harvest_eq.lambda_2, epsilon=0.1)
    assert fit_state_decay(traj, t_start=0.0, t_end=15.0) >= 0.5 * bound


@pytest.mark.slow
def test_history_functional_decays_along_ode_ide(harvest_cfg, harvest_eq, harvest_cert):
    traj = run_closed_loop(harvest_cfg, "underpopulated", solver="odeide", t_final=30.0, snapshots=(),
                           eq=harvest_eq, cert=harvest_cert)
    for i in (1, 2):
        values = traj.diagnostics[f"G{i}"]
        window = (traj.times >= harvest_eq.grid.max_age) & (values > 1e-9)
        _, slope = fit_exponential(traj.times[window], values[window])
        assert slope <= -0.9 * harvest_cert.sigma(i)


@pytest.mark.slow
def test_invariance_battery_full(certified, harvest_cfg, harvest_eq):
    cert, _ = certified
    results = run_invariance_battery(harvest_cfg, harvest_eq, cert, count=50, seed=0, t_final=10.0, progress=False)
    assert len(results) == 50
    failed = [r for r in results if not r.passed]
    assert not failed, failed


# full-resolution runs

@pytest.mark.slow
def test_harvesting_closed_loop_reproduction(reference_run, harvest_eq):
    eta0 = reference_run.eta_series[0]
    assert np.all((eta0 > -0.30) & (eta0 < -0.20))
    assert np.linalg.norm(reference_run.final_eta) < 1e-3
    assert np.min(reference_run.u_series) > 0.0
    assert reference_run.u_series[-1] == pytest.approx(harvest_eq.u_star, abs=1e-3)
    assert sorted(reference_run.profile_snapshots) == [0.0, 5.0, 10.0, 20.0, 40.0]


@pytest.mark.slow
def test_psi_decay_rate_at_least_certified(reference_run, harvest_cert):
    _, sigma_fit = fit_psi_decay(reference_run)
    assert sigma_fit >= 0.9 * max(harvest_cert.sigma_1, harvest_cert.sigma_2)


@pytest.mark.slow
def test_cross_solver_equivalence(harvest_cfg, harvest_eq):
    gap = cross_solver_gap(harvest_cfg, t_final=20.0, eq=harvest_eq)
    coarse = cross_solver_gap(harvest_cfg.replace(N_a=200), t_final=20.0)
    assert gap < 1e-3
    assert 1.4 <= coarse / gap <= 2.6
