"""
Random-initial-condition battery for the invariance of the certified level set.

Each sample starts inside Omega_{c*}: eta on a ray scaled below half the level,
psi either identically zero or the history of a smooth random perturbation of
x*, shrunk until the full functional is below 0.9 c*. Runs are independent and
are spread over a thread pool.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.optimize import brentq
from tqdm import tqdm

import config
from certificates.functionals import G_functional, V_total
from certificates.weights import CertificateData
from feedback.backstepping import GainSet, V3_eta
from model.configuration import ModelConfig
from model.errors import CertificateError, SimulationGuardError
from simulation.runner import run_closed_loop
from transform.mapping import TransformedState, forward_transform

logger = logging.getLogger(__name__)

LEVEL_FILL = 0.9
MAX_PSI_G = 0.05


@dataclass(frozen=True)
class InvarianceResult:
    index: int
    V0: float
    V_max: float
    u_min: float
    max_increase: float
    stayed_inside: bool
    positive_input: bool
    non_increasing: bool
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.stayed_inside and self.positive_input and self.non_increasing


def _ray_radius(direction: np.ndarray, level: float, gains: GainSet) -> float:
    """Radius where ln(1 + V3) reaches level along the ray."""
    def excess(r: float) -> float:
        eta = r * direction
        return float(np.log1p(V3_eta(eta[0], eta[1], gains))) - level

    upper = 1e-3
    while excess(upper) < 0.0:
        upper *= 2.0
    return brentq(excess, 0.0, upper, xtol=1e-14)


def _random_history_profile(rng: np.random.Generator, ages: np.ndarray, max_age: float) -> np.ndarray:
    coefficients = rng.normal(size=4)
    shape = coefficients[0] + sum(coefficients[m] * np.cos(m * np.pi * ages / max_age) for m in (1, 2, 3))
    return shape / max(float(np.max(np.abs(shape))), 1e-12)


def sample_invariance_states(eq, gains: GainSet, cert: CertificateData, count: int,
                             seed: int) -> List[TransformedState]:
    """Deterministic samples inside Omega_{c*}; even indices lie on the psi = 0 slice."""
    if cert.c_star is None or not cert.c_star > 0:
        raise CertificateError("invariance battery needs a positive certified level c_star")
    rng = np.random.default_rng(seed)
    grid = eq.grid
    states = []
    for n in range(count):
        angle = rng.uniform(0.0, 2.0 * np.pi)
        direction = np.array([np.cos(angle), np.sin(angle)])
        radius = _ray_radius(direction, 0.5 * cert.c_star, gains)
        eta = rng.uniform(0.0, 1.0) * radius * direction

        if n % 2 == 0:
            states.append(TransformedState(float(eta[0]), float(eta[1]), np.zeros(grid.size), np.zeros(grid.size)))
            continue

        shapes = [_random_history_profile(rng, grid.ages, grid.max_age) for _ in (1, 2)]
        amplitude = 0.1
        while True:
            perturbed = forward_transform(eq, eq.profile_1 * (1.0 + amplitude * shapes[0]),
                                          eq.profile_2 * (1.0 + amplitude * shapes[1]))
            g_max = max(G_functional(perturbed.psi(i), cert.sigma(i), grid) for i in (1, 2))
            value = V_total(eta, perturbed.psi_1, perturbed.psi_2, cert, gains, grid)
            if value < LEVEL_FILL * cert.c_star and g_max < MAX_PSI_G:
                break
            amplitude *= 0.5
        states.append(TransformedState(float(eta[0]), float(eta[1]), perturbed.psi_1, perturbed.psi_2))
    return states


def _check_one(index: int, state: TransformedState, model: ModelConfig, eq, cert: CertificateData,
               solver: str, t_final: float) -> InvarianceResult:
    try:
        traj = run_closed_loop(model, "eta-psi", state=state, solver=solver, t_final=t_final,
                               snapshots=(), eq=eq, cert=cert)
    except SimulationGuardError as e:
        return InvarianceResult(index, np.nan, np.inf, -np.inf, np.inf, False, False, False, message=str(e))
    values = traj.diagnostics["V"]
    v0 = float(values[0])
    tolerance = 1e-3 * max(v0, 1.0)
    increase = float(np.max(np.diff(values))) if values.size > 1 else 0.0
    return InvarianceResult(
        index=index,
        V0=v0,
        V_max=float(np.max(values)),
        u_min=float(np.min(traj.u_series)),
        max_increase=increase,
        stayed_inside=bool(np.max(values) <= cert.c_star),
        positive_input=bool(np.min(traj.u_series) > 0.0),
        non_increasing=increase <= tolerance,
    )


def run_invariance_battery(model: ModelConfig, eq, cert: CertificateData, count: int = 50,
                           seed: int = 0, t_final: float = 10.0, solver: str = "odeide",
                           threads: Optional[int] = None, progress: bool = True) -> List[InvarianceResult]:
    """Run every sample and report whether it stayed in Omega_{c*} with u > 0 and V non-increasing."""
    states = sample_invariance_states(eq, model.gains, cert, count, seed)
    workers = max(1, min(threads or config.get_settings().worker_count, count))
    logger.info("invariance battery: %d samples, seed %d, %d workers", count, seed, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_check_one, n, state, model, eq, cert, solver, t_final)
                   for n, state in enumerate(states)]
        results = [future.result() for future in tqdm(futures, desc="invariance", disable=not progress)]
    failed = [r.index for r in results if not r.passed]
    if failed:
        logger.warning("invariance battery: %d of %d samples failed: %s", len(failed), count, failed)
    return results
