# certificates/weights.py

import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from certificates.assumption import verify_psi_decay
from certificates.special_functions import B_bound
from feedback.backstepping import GainSet
from model.errors import CertificateError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CertificateData:
    """Weights, caps and levels of the full Lyapunov functional."""
    B1: float
    Btheta: float
    gamma_1: float
    gamma_2: float
    sigma_1: float
    sigma_2: float
    kappa_1: float
    kappa_2: float
    H1: float
    H2: float
    c_star: Optional[float] = None
    c0_star: Optional[float] = None

    def sigma(self, index: int) -> float:
        return self.sigma_1 if index == 1 else self.sigma_2

    def gamma(self, index: int) -> float:
        return self.gamma_1 if index == 1 else self.gamma_2

    def with_levels(self, c_star: float, c0_star: float) -> "CertificateData":
        return replace(self, c_star=c_star, c0_star=c0_star)


def gamma_lower_bounds(eq, gains: GainSet) -> tuple:
    """Strict lower bounds on the weights: 2 lambda_1 B(1) and 2 lambda_2 c1 (B(1) + B(theta))."""
    b1 = B_bound(1.0)
    b_theta = B_bound(gains.theta)
    return 2.0 * eq.lambda_1 * b1, 2.0 * eq.lambda_2 * gains.c1 * (b1 + b_theta)


def build_certificate(
    eq,
    gains: GainSet,
    sigma_1: Optional[float] = None,
    sigma_2: Optional[float] = None,
    gamma_slack: float = 1.05,
) -> CertificateData:
    """Weights gamma_i = slack * lower bound, caps H_i, and the psi decay data.

    sigma_i defaults to the largest rate certified by verify_psi_decay.
    """
    checks = [verify_psi_decay(eq, index) for index in (1, 2)]
    sigma_1 = checks[0].sigma if sigma_1 is None else sigma_1
    sigma_2 = checks[1].sigma if sigma_2 is None else sigma_2
    if not (sigma_1 > 0 and sigma_2 > 0):
        raise CertificateError(f"decay weights must be positive, got sigma=({sigma_1}, {sigma_2})")

    bound_1, bound_2 = gamma_lower_bounds(eq, gains)
    gamma_1 = gamma_slack * bound_1
    gamma_2 = gamma_slack * bound_2
    H1 = float(np.log(gamma_1 / bound_1))
    H2 = float(np.log(gamma_2 / bound_2))
    if not (H1 > 0 and H2 > 0):
        raise CertificateError(
            f"empty D slice: gamma weights must exceed their lower bounds (H1={H1:.3g}, H2={H2:.3g})"
        )

    return CertificateData(
        B1=B_bound(1.0),
        Btheta=B_bound(gains.theta),
        gamma_1=gamma_1,
        gamma_2=gamma_2,
        sigma_1=float(sigma_1),
        sigma_2=float(sigma_2),
        kappa_1=checks[0].kappa,
        kappa_2=checks[1].kappa,
        H1=H1,
        H2=H2,
    )
