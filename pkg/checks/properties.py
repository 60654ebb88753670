"""
Property battery behind the `check` subcommand.

Each property is a function returning a PropertyResult; run_property_battery
executes them in a fixed order. Simulation-heavy properties use the grid of the
given config unless `quick` is set, which halves the grid and shortens the
random-initial-condition battery.
"""

import logging
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from tqdm import tqdm

from certificates.assumption import kappa_objective, verify_psi_decay
from certificates.region import certify, decay_rate_estimate, refinement_study
from certificates.special_functions import B_bound, f_param, h_integral, h_quadrature
from equilibrium.steady_state import assemble_equilibrium, lotka_sharpe_residuals
from model.configuration import ModelConfig
from model.errors import CertificateError, SimulationGuardError
from simulation.battery import run_invariance_battery
from simulation.diagnostics import fit_growth_rate, fit_psi_decay, fit_state_decay
from simulation.runner import cross_solver_gap, run_closed_loop
from transform.mapping import TransformedState, pi_functional

logger = logging.getLogger(__name__)

B_BETAS = (0.1, 0.5, 1.0, 2.0, 10.0)


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def brute_force_B(beta: float, samples: int = 200001) -> float:
    """max_y |f(y; 1, beta)| by a dense scan polished with a bounded search."""
    y = np.linspace(-40.0, 40.0 + 2.0 / beta, samples)
    values = np.array([abs(f_param(v, 1.0, beta)) for v in y])
    k = int(np.argmax(values))
    lo, hi = y[max(k - 1, 0)], y[min(k + 1, samples - 1)]
    result = minimize_scalar(lambda v: -abs(f_param(v, 1.0, beta)), bounds=(lo, hi), method="bounded",
                             options={"xatol": 1e-12})
    return max(float(values[k]), -float(result.fun))


class PropertyBattery:
    """Shared equilibrium, certificate and reference trajectory for the property checks."""

    def __init__(self, config: ModelConfig, seed: int = 0, quick: bool = False,
                 resolution: Optional[int] = None):
        self.config = config.replace(N_a=max(config.N_a // 2, 50)) if quick else config
        self.seed = seed
        self.quick = quick
        self.resolution = resolution
        self.eq = assemble_equilibrium(self.config)
        self._cert = None
        self._roa = None
        self._reference = None

    def _roa_options(self) -> dict:
        return {} if self.resolution is None else {"resolution": self.resolution}

    @property
    def cert(self):
        if self._cert is None:
            c = self.config
            self._cert, self._roa = certify(self.eq, c.gains, c.sigma_1, c.sigma_2, c.gamma_slack,
                                            **self._roa_options())
        return self._cert

    @property
    def reference_run(self):
        if self._reference is None:
            self._reference = run_closed_loop(self.config, "underpopulated", solver="ipde", t_final=40.0, snapshots=(),
                                          eq=self.eq, cert=self.cert)
        return self._reference

    def lotka_sharpe(self) -> Tuple[bool, str]:
        residuals = lotka_sharpe_residuals(self.eq)
        fine = assemble_equilibrium(self.config.replace(N_a=10 * self.config.N_a))
        fine_residuals = lotka_sharpe_residuals(fine)
        ok = max(map(abs, residuals)) < 1e-8 and max(map(abs, fine_residuals)) < 1e-10
        if self.config.mortality[0] == self.config.mortality[1] and self.config.birth[0] == self.config.birth[1]:
            ok = ok and abs(self.eq.zeta_1 - self.eq.zeta_2) < 1e-12
        return ok, f"residuals {max(map(abs, residuals)):.2e}, fine grid {max(map(abs, fine_residuals)):.2e}"

    def equilibrium_fixed_point(self) -> Tuple[bool, str]:
        pis = [pi_functional(self.eq, i, self.eq.profile(i)) for i in (1, 2)]
        traj = run_closed_loop(self.config, "equilibrium", t_final=20.0, snapshots=(), eq=self.eq, cert=self.cert)
        drift = float(np.max(np.abs(traj.eta_series)))
        ok = max(abs(p - 1.0) for p in pis) < 1e-8 and drift < 5e-3
        return ok, f"|Pi[x*] - 1| = {max(abs(p - 1.0) for p in pis):.2e}, max |eta| = {drift:.2e}"

    def open_loop_growth(self) -> Tuple[bool, str]:
        size = self.eq.grid.size
        start = TransformedState(-0.01, -0.01, np.zeros(size), np.zeros(size))
        traj = run_closed_loop(self.config, "eta-psi", state=start, solver="odeide", open_loop=True,
                               t_final=8.0, snapshots=(), eq=self.eq, cert=self.cert)
        rate = fit_growth_rate(traj, t_start=3.0)
        expected = float(np.sqrt(self.eq.lambda_1 * self.eq.lambda_2))
        return abs(rate - expected) < 0.15 * expected, f"growth {rate:.4f} vs sqrt(l1 l2) = {expected:.4f}"

    def lambert_bound(self) -> Tuple[bool, str]:
        worst = max(abs(B_bound(b) - brute_force_B(b)) for b in B_BETAS)
        curve = [B_bound(b) for b in np.geomspace(0.1, 100.0, 200)]
        monotone = bool(np.all(np.diff(curve) > 0.0))
        return worst < 1e-6 and monotone, f"max |B - brute force| = {worst:.2e}, increasing: {monotone}"

    def h_series(self) -> Tuple[bool, str]:
        ps = np.linspace(0.0, 10.0, 101)
        lower = all(h_integral(p) >= p + 0.25 * p * p for p in ps)
        worst = max(abs(h_integral(p) - h_quadrature(p)) / max(1.0, h_integral(p)) for p in ps)
        return lower and worst < 1e-10, f"h >= p + p^2/4: {lower}, series vs quad {worst:.2e}"

    def cross_solver(self) -> Tuple[bool, str]:
        gap = cross_solver_gap(self.config, t_final=20.0, eq=self.eq)
        coarse = cross_solver_gap(self.config.replace(N_a=self.config.N_a // 2), t_final=20.0)
        ratio = coarse / gap if gap > 0 else np.inf
        ok = gap < 1e-3 * (400 / self.config.N_a) and 1.4 <= ratio <= 2.6
        return ok, f"gap {gap:.3e} at N={self.config.N_a}, coarse/fine ratio {ratio:.2f}"

    def reference_convergence(self) -> Tuple[bool, str]:
        traj = self.reference_run
        eta0 = traj.eta_series[0]
        final = float(np.linalg.norm(traj.final_eta))
        u_gap = abs(float(traj.u_series[-1]) - self.eq.u_star)
        ok = (final < 1e-3 and float(np.min(traj.u_series)) > 0.0 and u_gap < 1e-3
              and bool(np.all((eta0 > -0.30) & (eta0 < -0.20))))
        return ok, f"eta0 = ({eta0[0]:.4f}, {eta0[1]:.4f}), |eta(T)| = {final:.2e}, |u(T) - u*| = {u_gap:.2e}"

    def invariance(self) -> Tuple[bool, str]:
        count = 10 if self.quick else 50
        results = run_invariance_battery(self.config, self.eq, self.cert, count=count, seed=self.seed,
                                         t_final=5.0 if self.quick else 10.0, progress=False)
        failed = [r.index for r in results if not r.passed]
        return not failed, f"{count - len(failed)}/{count} samples stayed inside Omega_c* with u > 0"

    def decay_rate(self) -> Tuple[bool, str]:
        size = self.eq.grid.size
        start = TransformedState(1e-2, 1e-2, np.zeros(size), np.zeros(size))
        traj = run_closed_loop(self.config, "eta-psi", state=start, solver="odeide", t_final=15.0,
                               snapshots=(), eq=self.eq, cert=self.cert)
        fitted = fit_state_decay(traj, t_start=0.0, t_end=15.0)
        bound = decay_rate_estimate(self.config.gains, self.cert.sigma_1, self.cert.sigma_2,
                                    self.eq.lambda_2, epsilon=0.1)
        return fitted >= 0.5 * bound, f"fitted decay {fitted:.4f}, certified {bound:.4f}"

    def assumption(self) -> Tuple[bool, str]:
        checks = [verify_psi_decay(self.eq, i) for i in (1, 2)]
        objectives = [kappa_objective(self.eq, c.index, c.kappa) for c in checks]
        _, sigma_fit = fit_psi_decay(self.reference_run)
        sigma = max(c.sigma for c in checks)
        ok = max(objectives) < 1.0 and min(c.sigma for c in checks) > 0.0 and sigma_fit >= 0.9 * sigma
        return ok, f"J = {max(objectives):.4f}, sigma = {sigma:.4f}, fitted psi decay {sigma_fit:.4f}"

    def roa_determinism(self) -> Tuple[bool, str]:
        c = self.config
        first, _ = certify(self.eq, c.gains, c.sigma_1, c.sigma_2, c.gamma_slack, **self._roa_options())
        second, estimate = certify(self.eq, c.gains, c.sigma_1, c.sigma_2, c.gamma_slack, **self._roa_options())
        same = first.c_star == second.c_star and first.c0_star == second.c0_star
        _, _, change = refinement_study(first, self.eq, c.gains, **self._roa_options())
        ok = same and change < 0.01 and estimate.contour_closed
        return ok, (f"c_star = {first.c_star:.6g}, repeatable: {same}, refinement change {change:.2e}, "
                    f"contour closed: {estimate.contour_closed}")

    def properties(self) -> List[Tuple[str, Callable[[], Tuple[bool, str]]]]:
        return [
            ("lotka-sharpe residual", self.lotka_sharpe),
            ("equilibrium fixed point", self.equilibrium_fixed_point),
            ("open-loop instability", self.open_loop_growth),
            ("lambert bound B(beta)", self.lambert_bound),
            ("h series", self.h_series),
            ("cross-solver equivalence", self.cross_solver),
            ("closed-loop convergence", self.reference_convergence),
            ("level-set invariance", self.invariance),
            ("decay-rate certificate", self.decay_rate),
            ("psi decay assumption", self.assumption),
            ("roa determinism", self.roa_determinism),
        ]


def run_property_battery(config: ModelConfig, seed: int = 0, quick: bool = False,
                         resolution: Optional[int] = None, progress: bool = True) -> List[PropertyResult]:
    battery = PropertyBattery(config, seed=seed, quick=quick, resolution=resolution)
    results = []
    for name, check in tqdm(battery.properties(), desc="check", disable=not progress):
        started = time.perf_counter()
        try:
            passed, detail = check()
        except (CertificateError, SimulationGuardError, ValueError) as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        elapsed = time.perf_counter() - started
        logger.info("property %s: %s (%s) in %.2fs", name, "pass" if passed else "FAIL", detail, elapsed)
        results.append(PropertyResult(name, bool(passed), detail, elapsed))
    return results
