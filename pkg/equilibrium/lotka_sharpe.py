"""
Lotka-Sharpe growth parameter of a single species.

zeta solves  int_0^A k(a) exp(-int_0^a (mu(s) + zeta) ds) da = 1.
The left side is strictly decreasing in zeta, so the root is bracketed by
doubling and then bisected to machine precision.
"""

import logging

import numpy as np
from scipy.optimize import bisect

from model.configuration import SpeciesKernels
from model.errors import EquilibriumError
from model.grid import AgeProfile

logger = logging.getLogger(__name__)

MAX_DOUBLINGS = 60


def _log_survival(species: SpeciesKernels, zeta: float) -> AgeProfile:
    grid = species.grid
    return -(zeta * grid.ages + grid.cumulative(species.mortality))


def survival_profile(species: SpeciesKernels, zeta: float) -> AgeProfile:
    """exp(-int_0^a (zeta + mu)), cumulative trapezoid."""
    return np.exp(_log_survival(species, zeta))


def lotka_sharpe_integral(species: SpeciesKernels, zeta: float) -> float:
    birth = species.birth
    positive = birth > 0.0
    with np.errstate(over="ignore"):
        integrand = np.where(
            positive,
            np.exp(np.log(np.where(positive, birth, 1.0)) + _log_survival(species, zeta)),
            0.0,
        )
    return species.grid.integrate(integrand)


def solve_lotka_sharpe(species: SpeciesKernels) -> float:
    """Unique real zeta with unit net reproduction."""
    if not species.grid.integrate(species.birth) > 0.0:
        raise EquilibriumError(f"birth kernel of species {species.index} has no positive mass")

    def residual(zeta: float) -> float:
        return lotka_sharpe_integral(species, zeta) - 1.0

    lo, hi, width = -1.0, 1.0, 1.0
    for _ in range(MAX_DOUBLINGS):
        if residual(lo) >= 0.0:
            break
        lo -= width
        width *= 2.0
    else:
        raise EquilibriumError(f"Lotka-Sharpe bracket expansion failed below zeta={lo} (species {species.index})")

    width = 1.0
    for _ in range(MAX_DOUBLINGS):
        if residual(hi) <= 0.0:
            break
        hi += width
        width *= 2.0
    else:
        raise EquilibriumError(f"Lotka-Sharpe bracket expansion failed above zeta={hi} (species {species.index})")

    if residual(lo) == 0.0:
        return lo
    if residual(hi) == 0.0:
        return hi

    zeta = bisect(residual, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    logger.info("species %d: zeta=%.15g residual=%.3e", species.index, zeta, residual(zeta))
    return float(zeta)
