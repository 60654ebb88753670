"""
Closed-loop runs: initial condition, per-step diagnostics, guards, snapshots.
"""

import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from certificates.functionals import G_functional
from certificates.special_functions import h_integral
from certificates.weights import CertificateData, build_certificate
from equilibrium.steady_state import assemble_equilibrium
from feedback.backstepping import V3_eta
from model.configuration import ModelConfig
from model.errors import SimulationGuardError, TransformError
from model.grid import AgeProfile
from simulation.base.factory import SolverFactory
from simulation.base.interfaces import SimulationContext, Trajectory
from transform.mapping import P_functional, TransformedState, boundary_residual, forward_transform

logger = logging.getLogger(__name__)

ETA_GUARD = 50.0
IC_MODES = ("paper", "underpopulated", "equilibrium", "equilibrium_scaled", "profiles", "eta-psi")
DIAGNOSTIC_KEYS = ("V", "G1", "G2", "psi_sup1", "psi_sup2", "P1", "P2", "boundary1", "boundary2", "positive")


def underpopulated_profiles(eq, rate: float = 0.2) -> Tuple[AgeProfile, AgeProfile]:
    """Both species slightly underpopulated: x_i* e^{-rate (1 + a)}."""
    factor = np.exp(-rate * (1.0 + eq.grid.ages))
    return eq.profile_1 * factor, eq.profile_2 * factor


def initial_state(eq, ic_mode: str,
                  profiles: Optional[Tuple[npt.ArrayLike, npt.ArrayLike]] = None,
                  state: Optional[TransformedState] = None,
                  factor: Optional[npt.ArrayLike] = None) -> TransformedState:
    if ic_mode in ("paper", "underpopulated"):
        return forward_transform(eq, *underpopulated_profiles(eq))
    if ic_mode == "equilibrium":
        return forward_transform(eq, eq.profile_1, eq.profile_2)
    if ic_mode == "equilibrium_scaled":
        if factor is None:
            raise ValueError("ic_mode 'equilibrium_scaled' needs a factor profile")
        factor = np.broadcast_to(np.asarray(factor, dtype=float), (eq.grid.size,))
        return forward_transform(eq, eq.profile_1 * factor, eq.profile_2 * factor)
    if ic_mode == "profiles":
        if profiles is None:
            raise ValueError("ic_mode 'profiles' needs two age profiles")
        return forward_transform(eq, profiles[0], profiles[1])
    if ic_mode == "eta-psi":
        if state is None:
            raise ValueError("ic_mode 'eta-psi' needs a transformed state")
        return state
    raise ValueError(f"Unknown ic_mode: {ic_mode}. Expected one of {IC_MODES}")


class _Recorder:
    """Accumulates the trajectory and per-step diagnostics."""

    def __init__(self, eq, context: SimulationContext, cert: CertificateData, n_steps: int):
        self.eq = eq
        self.context = context
        self.cert = cert
        self.times = np.full(n_steps + 1, np.nan)
        self.eta = np.full((n_steps + 1, 2), np.nan)
        self.u = np.full(n_steps + 1, np.nan)
        self.diagnostics: Dict[str, np.ndarray] = {key: np.full(n_steps + 1, np.nan) for key in DIAGNOSTIC_KEYS}
        self.snapshots: Dict[float, Tuple[AgeProfile, AgeProfile]] = {}
        self.count = 0

    def record(self, time: float, state: TransformedState, u: float, positive: bool) -> None:
        k = self.count
        grid = self.eq.grid
        self.times[k] = time
        self.eta[k] = state.eta
        self.u[k] = u
        d = self.diagnostics
        value = float(np.log1p(V3_eta(state.eta_1, state.eta_2, self.context.gains)))
        for i in (1, 2):
            psi = state.psi(i)
            sigma = self.cert.sigma(i)
            g = G_functional(psi, sigma, grid) if positive else np.inf
            d[f"G{i}"][k] = g
            d[f"psi_sup{i}"][k] = float(np.max(np.abs(psi)))
            d[f"P{i}"][k] = P_functional(self.eq, i, psi)
            d[f"boundary{i}"][k] = boundary_residual(self.eq, i, psi)
            value += self.cert.gamma(i) / sigma * h_integral(g)
        d["V"][k] = value
        d["positive"][k] = float(positive)
        self.count += 1

    def trajectory(self, solver: str, open_loop: bool) -> Trajectory:
        n = self.count
        return Trajectory(
            solver=solver,
            times=self.times[:n].copy(),
            eta_series=self.eta[:n].copy(),
            u_series=self.u[:n].copy(),
            profile_snapshots=dict(self.snapshots),
            diagnostics={key: values[:n].copy() for key, values in self.diagnostics.items()},
            open_loop=open_loop,
            max_age=self.eq.grid.max_age,
        )


def _snapshot_steps(snapshots: Sequence[float], dt: float, n_steps: int) -> Dict[int, float]:
    steps = {}
    for t in snapshots:
        k = int(round(t / dt))
        if 0 <= k <= n_steps:
            steps[k] = float(t)
        else:
            logger.warning("snapshot time %g lies outside [0, %g]; skipped", t, n_steps * dt)
    return steps


def run_closed_loop(
    config: ModelConfig,
    ic_mode: str = "paper",
    *,
    solver: Optional[str] = None,
    open_loop: bool = False,
    feedback: Optional[str] = None,
    snapshots: Optional[Sequence[float]] = None,
    t_final: Optional[float] = None,
    profiles: Optional[Tuple[npt.ArrayLike, npt.ArrayLike]] = None,
    state: Optional[TransformedState] = None,
    factor: Optional[npt.ArrayLike] = None,
    eq=None,
    cert: Optional[CertificateData] = None,
) -> Trajectory:
    """Simulate the closed loop (or the open loop with u = u*) from an initial condition.

    Raises SimulationGuardError when |eta| exceeds the blow-up guard or a
    profile loses positivity; the partial trajectory travels with the error.
    """
    if eq is None:
        eq = assemble_equilibrium(config)
    gains = config.gains
    if cert is None:
        cert = build_certificate(eq, gains, config.sigma_1, config.sigma_2, config.gamma_slack)
    solver_type = solver or config.solver
    context = SimulationContext(eq=eq, gains=gains, open_loop=open_loop, feedback=feedback or config.feedback)
    engine = SolverFactory.get_solver(solver_type, context)

    horizon = config.T_final if t_final is None else t_final
    if not horizon > 0:
        raise ValueError(f"t_final must be positive, got {horizon}")
    dt = context.dt
    n_steps = int(round(horizon / dt))
    snapshot_steps = _snapshot_steps(config.snapshots if snapshots is None else snapshots, dt, n_steps)

    recorder = _Recorder(eq, context, cert, n_steps)
    if not engine.initialize(initial_state(eq, ic_mode, profiles, state, factor)):
        raise RuntimeError(f"solver {solver_type} failed to initialize")
    logger.info("run: solver=%s ic=%s open_loop=%s feedback=%s steps=%d",
                solver_type, ic_mode, open_loop, context.feedback, n_steps)

    def guard(name: str, message: str) -> SimulationGuardError:
        logger.warning("%s tripped at t=%.6g: %s", name, engine.time, message)
        return SimulationGuardError(name, message, trajectory=recorder.trajectory(solver_type, open_loop))

    try:
        for k in range(n_steps + 1):
            try:
                current = engine.transformed_state()
            except TransformError as e:
                raise guard("positivity guard", str(e)) from e
            x1, x2 = engine.profiles()
            positive = bool(np.all(x1 > 0.0) and np.all(x2 > 0.0))
            eta = current.eta
            if not np.all(np.isfinite(eta)) or np.max(np.abs(eta)) > ETA_GUARD:
                raise guard("blow-up guard", f"|eta| exceeded {ETA_GUARD:g} at t={engine.time:.6g}")
            u = engine.current_input()
            recorder.record(engine.time, current, u, positive)
            if not positive:
                raise guard("positivity guard", f"population profile lost positivity at t={engine.time:.6g}")
            if k in snapshot_steps:
                recorder.snapshots[snapshot_steps[k]] = (x1.copy(), x2.copy())
            if k < n_steps:
                try:
                    engine.advance()
                except (ValueError, FloatingPointError) as e:
                    raise guard("blow-up guard", f"step {k + 1} failed: {e}") from e
    finally:
        engine.cleanup()

    traj = recorder.trajectory(solver_type, open_loop)
    logger.info("run finished: |eta(T)|=%.3g u(T)=%.10g", float(np.linalg.norm(traj.final_eta)), traj.u_series[-1])
    return traj


def cross_solver_gap(config: ModelConfig, t_final: float = 20.0, ic_mode: str = "paper", eq=None,
                     profiles: Optional[Tuple[npt.ArrayLike, npt.ArrayLike]] = None,
                     state: Optional[TransformedState] = None,
                     factor: Optional[npt.ArrayLike] = None) -> float:
    """sup over t, a of |x_ipde - x_odeide| / x* for the same initial condition.

    Both solvers are stepped in lockstep, so no profile history is stored.
    """
    if eq is None:
        eq = assemble_equilibrium(config)
    context = SimulationContext(eq=eq, gains=config.gains, feedback=config.feedback)
    start = initial_state(eq, ic_mode, profiles, state, factor)
    engines = [SolverFactory.get_solver(name, context) for name in ("ipde", "odeide")]
    for engine in engines:
        engine.initialize(start)

    gap = 0.0
    n_steps = int(round(t_final / context.dt))
    for k in range(n_steps + 1):
        direct, rebuilt = (engine.profiles() for engine in engines)
        for i in (0, 1):
            diff = np.abs(direct[i] - rebuilt[i]) / eq.profile(i + 1)
            gap = max(gap, float(np.max(diff)))
        if k < n_steps:
            for engine in engines:
                engine.advance()
    logger.info("cross-solver gap over [0, %g] at N=%d: %.3e", t_final, eq.grid.n_intervals, gap)
    return gap
