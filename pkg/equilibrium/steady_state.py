# equilibrium/steady_state.py

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from equilibrium.lotka_sharpe import lotka_sharpe_integral, solve_lotka_sharpe, survival_profile
from model.configuration import ModelConfig, SpeciesKernels
from model.errors import EquilibriumError
from model.grid import AgeGrid, AgeProfile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EquilibriumData:
    """Positive steady state of the two-species model for a given u*."""
    grid: AgeGrid
    zeta_1: float
    zeta_2: float
    lambda_1: float
    lambda_2: float
    x0_1: float
    x0_2: float
    u_star: float
    profile_1: AgeProfile = field(repr=False)
    profile_2: AgeProfile = field(repr=False)
    survival_1: AgeProfile = field(repr=False)
    survival_2: AgeProfile = field(repr=False)
    species_1: SpeciesKernels = field(repr=False)
    species_2: SpeciesKernels = field(repr=False)

    def species(self, index: int) -> SpeciesKernels:
        return self.species_1 if index == 1 else self.species_2

    def profile(self, index: int) -> AgeProfile:
        return self.profile_1 if index == 1 else self.profile_2

    def survival(self, index: int) -> AgeProfile:
        return self.survival_1 if index == 1 else self.survival_2

    def zeta(self, index: int) -> float:
        return self.zeta_1 if index == 1 else self.zeta_2

    def lam(self, index: int) -> float:
        return self.lambda_1 if index == 1 else self.lambda_2

    @property
    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(repr((self.grid.max_age, self.grid.n_intervals, self.u_star)).encode())
        for index in (1, 2):
            sp = self.species(index)
            for values in (sp.mortality, sp.birth, sp.interaction):
                digest.update(np.ascontiguousarray(values).tobytes())
        return digest.hexdigest()


def assemble_equilibrium(config: ModelConfig, u_star: Optional[float] = None) -> EquilibriumData:
    """Solve both Lotka-Sharpe conditions and build the steady state.

    u_star defaults to the config value, and to zeta_2 / 2 when that is unset.
    """
    species_1 = config.species(1)
    species_2 = config.species(2)
    zeta_1 = solve_lotka_sharpe(species_1)
    zeta_2 = solve_lotka_sharpe(species_2)

    if u_star is None:
        u_star = config.u_star if config.u_star is not None else 0.5 * zeta_2
    if not 0.0 < u_star < zeta_2:
        raise EquilibriumError(
            f"no positive equilibrium: u_star={u_star!r} must lie in (0, zeta_2={zeta_2!r})"
        )
    if not zeta_1 > 0.0:
        raise EquilibriumError(f"no positive equilibrium: zeta_1={zeta_1!r} must be positive")

    grid = config.grid
    survival_1 = survival_profile(species_1, zeta_1)
    survival_2 = survival_profile(species_2, zeta_2)

    lambda_1 = zeta_2 - u_star
    lambda_2 = zeta_1
    x0_1 = lambda_1 / grid.integrate(species_2.interaction * survival_1)
    x0_2 = zeta_1 / grid.integrate(species_1.interaction * survival_2)

    eq = EquilibriumData(
        grid=grid,
        zeta_1=zeta_1,
        zeta_2=zeta_2,
        lambda_1=lambda_1,
        lambda_2=lambda_2,
        x0_1=x0_1,
        x0_2=x0_2,
        u_star=float(u_star),
        profile_1=x0_1 * survival_1,
        profile_2=x0_2 * survival_2,
        survival_1=survival_1,
        survival_2=survival_2,
        species_1=species_1,
        species_2=species_2,
    )
    logger.info("equilibrium: zeta=(%.10g, %.10g) lambda=(%.10g, %.10g) x0=(%.10g, %.10g)",
                zeta_1, zeta_2, lambda_1, lambda_2, x0_1, x0_2)
    return eq


def lotka_sharpe_residuals(eq: EquilibriumData) -> Tuple[float, float]:
    return tuple(lotka_sharpe_integral(eq.species(i), eq.zeta(i)) - 1.0 for i in (1, 2))


def interaction_residuals(eq: EquilibriumData) -> Tuple[float, float]:
    """int b_j x_i* - lambda_i for both species."""
    grid = eq.grid
    r1 = grid.integrate(eq.species_2.interaction * eq.profile_1) - eq.lambda_1
    r2 = grid.integrate(eq.species_1.interaction * eq.profile_2) - eq.lambda_2
    return r1, r2


def open_loop_eigenvalues(eq: EquilibriumData) -> Tuple[float, float]:
    """Eigenvalues of the linearised open-loop aggregate dynamics."""
    if not (eq.lambda_1 > 0 and eq.lambda_2 > 0):
        raise ValueError("open-loop eigenvalues need positive interaction constants")
    s = float(np.sqrt(eq.lambda_1 * eq.lambda_2))
    return s, -s
