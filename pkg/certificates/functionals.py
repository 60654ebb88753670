"""
History functionals and the full Lyapunov functional.
"""

import numpy as np
import numpy.typing as npt

from certificates.special_functions import h_integral
from certificates.weights import CertificateData
from feedback.backstepping import GainSet, V3_eta, control_law_eta, mu_sq
from model.grid import AgeGrid


def G_functional(psi: npt.ArrayLike, sigma: float, grid: AgeGrid) -> float:
    """max_a |psi(-a)| e^{sigma (A - a)} / (1 + min(0, min psi))."""
    psi = np.asarray(psi, dtype=float)
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    lowest = float(psi.min())
    if lowest <= -1.0:
        raise ValueError("G functional needs psi > -1")
    peak = float(np.max(np.abs(psi) * np.exp(sigma * (grid.max_age - grid.ages))))
    return peak / (1.0 + min(0.0, lowest))


def V_total(eta: npt.ArrayLike, psi_1: npt.ArrayLike, psi_2: npt.ArrayLike,
            cert: CertificateData, gains: GainSet, grid: AgeGrid) -> float:
    """ln(1 + V3(eta)) + sum_i (gamma_i / sigma_i) h(G_i(psi_i))."""
    eta = np.asarray(eta, dtype=float)
    value = float(np.log1p(V3_eta(eta[0], eta[1], gains)))
    for index, psi in ((1, psi_1), (2, psi_2)):
        sigma = cert.sigma(index)
        value += cert.gamma(index) / sigma * h_integral(G_functional(psi, sigma, grid))
    return value


def in_D(eta: npt.ArrayLike, psi_1: npt.ArrayLike, psi_2: npt.ArrayLike,
         cert: CertificateData, eq, gains: GainSet) -> bool:
    """Caps on eta plus positivity of the feedback."""
    eta = np.asarray(eta, dtype=float)
    for psi in (psi_1, psi_2):
        if np.any(np.asarray(psi) <= -1.0):
            raise ValueError("D membership needs psi > -1")
    if eta[0] > cert.H1 or eta[1] > cert.H2:
        return False
    return bool(control_law_eta(eta[0], eta[1], eq, gains) > 0.0)


def _v3_dissipation(eta: np.ndarray, eq, gains: GainSet) -> float:
    c1 = gains.c1
    z = eta[1] - c1 * eta[0]
    rate = 4.0 * eq.lambda_2 * (gains.theta * c1 * mu_sq(-c1 * eta[0]) + gains.c2 * mu_sq(z))
    return float(rate / (1.0 + V3_eta(eta[0], eta[1], gains)))


def dissipation_bound(eta: npt.ArrayLike, G1: float, G2: float,
                      cert: CertificateData, eq, gains: GainSet) -> float:
    """Upper bound on D+V before the eta caps are used."""
    eta = np.asarray(eta, dtype=float)
    cross_1 = cert.B1 * eq.lambda_1 * np.exp(eta[0]) - cert.gamma_1
    cross_2 = gains.c1 * (cert.B1 + cert.Btheta) * eq.lambda_2 * np.exp(eta[1]) - cert.gamma_2
    return float(-_v3_dissipation(eta, eq, gains) + cross_1 * np.expm1(G1) + cross_2 * np.expm1(G2))


def dissipation_margin(eta: npt.ArrayLike, G1: float, G2: float,
                       cert: CertificateData, eq, gains: GainSet) -> float:
    """W(eta, G) >= 0; inside the caps D+V <= -W."""
    eta = np.asarray(eta, dtype=float)
    return float(_v3_dissipation(eta, eq, gains)
                 + 0.5 * cert.gamma_1 * np.expm1(G1)
                 + 0.5 * cert.gamma_2 * np.expm1(G2))
