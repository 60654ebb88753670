"""
Decay certificate for the renewal histories psi.

Subtracting z*kappa*K(a) (K the tail of the normalised birth kernel,
z = 1 / int a k~) from k~ leaves a kernel whose e^{sigma a}-weighted L1 norm
must stay below 1; sigma is then a guaranteed decay rate of the G functional.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from model.errors import CertificateError
from transform.eigenfunctions import species_transform

logger = logging.getLogger(__name__)

MAX_BRACKET_WIDENINGS = 6


@dataclass(frozen=True)
class AssumptionCheck:
    index: int
    kappa: float
    sigma: float
    j_min: float
    z: float


def _residual_kernel(eq, index: int):
    st = species_transform(eq, index)
    grid = st.grid
    k_tilde = st.birth_normalized
    tail = grid.tail(k_tilde)
    z = 1.0 / grid.integrate(grid.ages * k_tilde)
    return grid, k_tilde, tail, z


def kappa_objective(eq, index: int, kappa: float) -> float:
    """J(kappa) = int |k~ - z kappa K|."""
    grid, k_tilde, tail, z = _residual_kernel(eq, index)
    return grid.integrate(np.abs(k_tilde - z * kappa * tail))


def weighted_residual(eq, index: int, kappa: float, sigma: float) -> float:
    """int |k~ - z kappa K| e^{sigma a}."""
    grid, k_tilde, tail, z = _residual_kernel(eq, index)
    return grid.integrate(np.abs(k_tilde - z * kappa * tail) * np.exp(sigma * grid.ages))


def verify_psi_decay(eq, index: int, tol: float = 1e-6) -> AssumptionCheck:
    """Find kappa minimising J and the largest sigma keeping the weighted norm below 1."""
    grid, k_tilde, tail, z = _residual_kernel(eq, index)
    abs_residual = lambda kappa: np.abs(k_tilde - z * kappa * tail)
    objective = lambda kappa: grid.integrate(abs_residual(kappa))

    kappa_max = 10.0 / z
    for _ in range(MAX_BRACKET_WIDENINGS):
        result = minimize_scalar(objective, bounds=(1e-12 * kappa_max, kappa_max),
                                 method="bounded", options={"xatol": 1e-12 * kappa_max})
        kappa = float(result.x)
        if kappa < 0.99 * kappa_max:
            break
        logger.warning("kappa search hit the bracket edge %.6g for species %d; widening", kappa_max, index)
        kappa_max *= 2.0
    j_min = objective(kappa)

    if not j_min < 1.0 - tol:
        raise CertificateError(
            f"psi decay condition not verifiable for these kernels (species {index}: min J = {j_min:.6g})"
        )

    base = abs_residual(kappa)
    weighted = lambda sigma: grid.integrate(base * np.exp(sigma * grid.ages)) - (1.0 - tol)

    sigma_hi = 1.0
    for _ in range(60):
        if weighted(sigma_hi) >= 0.0:
            break
        sigma_hi *= 2.0
    else:
        raise CertificateError(f"sigma bracket expansion failed for species {index}")

    sigma = float(bisect(weighted, 0.0, sigma_hi, xtol=1e-13, maxiter=500))
    logger.info("species %d: kappa=%.10g J=%.6g sigma=%.10g", index, kappa, j_min, sigma)
    return AssumptionCheck(index=index, kappa=kappa, sigma=sigma, j_min=j_min, z=z)
