"""
Backstepping harvesting feedback for the reduced (eta) dynamics.

The reduced dynamics are
    d eta_1/dt = phi_2(eta_2 + v_2)
    d eta_2/dt = phi_1(eta_1 + v_1) + u* - u
with phi_i(q) = lambda_i (1 - e^q). Only the second species is harvested.
Every function accepts scalars or numpy arrays and broadcasts.
"""

from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

ArrayLike = npt.ArrayLike


@dataclass(frozen=True)
class GainSet:
    """Backstepping gains c1, c2 and the weight theta."""
    c1: float = 1.0
    c2: float = 1.0
    theta: float = 1.0

    def __post_init__(self):
        for name in ("c1", "c2", "theta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"gain {name} must be positive")


@dataclass(frozen=True)
class OdeState:
    """Log-aggregate state (eta_1, eta_2)."""
    eta_1: float
    eta_2: float

    def z(self, c1: float) -> float:
        return self.eta_2 - c1 * self.eta_1

    def as_array(self) -> np.ndarray:
        return np.array([self.eta_1, self.eta_2])

    @classmethod
    def from_array(cls, eta: ArrayLike) -> "OdeState":
        eta = np.asarray(eta, dtype=float)
        return cls(float(eta[0]), float(eta[1]))


def phi(eta: ArrayLike, lam: float) -> Any:
    return lam * (1.0 - np.exp(eta))


def omega(q: ArrayLike) -> Any:
    """e^q - 1 - q, evaluated without cancellation near 0."""
    q = np.asarray(q, dtype=float)
    return np.expm1(q) - q


def mu_sq(q: ArrayLike) -> Any:
    return np.sinh(0.5 * np.asarray(q, dtype=float)) ** 2


def control_law_eta(eta_1: ArrayLike, eta_2: ArrayLike, eq, gains: GainSet) -> Any:
    """Feedback u as a function of (eta_1, eta_2); vectorised form of control_law."""
    eta_1 = np.asarray(eta_1, dtype=float)
    eta_2 = np.asarray(eta_2, dtype=float)
    c1, c2, theta = gains.c1, gains.c2, gains.theta
    z = eta_2 - c1 * eta_1
    bracket = (
        -c2 * np.expm1(-z)
        - theta * c1 * np.expm1(c1 * eta_1)
        - (eq.lambda_1 / eq.lambda_2) * np.expm1(eta_1)
        + c1 * np.expm1(eta_2)
    )
    return eq.u_star + eq.lambda_2 * bracket


def control_law(state: OdeState, eq, gains: GainSet) -> float:
    """Harvesting rate u for the current (eta_1, eta_2). May be negative."""
    return float(control_law_eta(state.eta_1, state.eta_2, eq, gains))


def control_law_from_pi(pi_1: ArrayLike, pi_2: ArrayLike, eq, gains: GainSet) -> Any:
    """The same feedback written with the aggregates Pi_i = e^{eta_i}."""
    pi_1 = np.asarray(pi_1, dtype=float)
    pi_2 = np.asarray(pi_2, dtype=float)
    c1, c2, theta = gains.c1, gains.c2, gains.theta
    pi_1_c1 = pi_1 ** c1
    bracket = (
        c2 * (1.0 - pi_1_c1 / pi_2)
        + theta * c1 * (1.0 - pi_1_c1)
        + (eq.lambda_1 / eq.lambda_2) * (1.0 - pi_1)
        + c1 * (pi_2 - 1.0)
    )
    return eq.u_star + eq.lambda_2 * bracket


def V1(state: OdeState, gains: GainSet) -> float:
    return float(omega(-gains.c1 * state.eta_1))


def V2(state: OdeState, gains: GainSet) -> float:
    return float(omega(state.z(gains.c1)))


def V3_eta(eta_1: ArrayLike, eta_2: ArrayLike, gains: GainSet) -> Any:
    eta_1 = np.asarray(eta_1, dtype=float)
    z = np.asarray(eta_2, dtype=float) - gains.c1 * eta_1
    return gains.theta * omega(-gains.c1 * eta_1) + omega(z)


def V3(state: OdeState, gains: GainSet) -> float:
    return float(V3_eta(state.eta_1, state.eta_2, gains))


def V4(state: OdeState, gains: GainSet) -> float:
    return float(np.log1p(V3(state, gains)))


def V3_dot_closed_form(state: OdeState, eq, gains: GainSet) -> float:
    """Derivative of V3 along the undisturbed closed loop."""
    c1 = gains.c1
    return float(-4.0 * eq.lambda_2 * (
        gains.theta * c1 * mu_sq(-c1 * state.eta_1) + gains.c2 * mu_sq(state.z(c1))
    ))


def V3_dot_along(state: OdeState, eq, gains: GainSet, u: float, v_1: float = 0.0, v_2: float = 0.0) -> float:
    """Derivative of V3 for an arbitrary input u and v-map disturbances."""
    c1 = gains.c1
    z = state.z(c1)
    grad_1 = -c1 * (gains.theta * np.expm1(-c1 * state.eta_1) + np.expm1(z))
    grad_2 = np.expm1(z)
    eta_1_dot = phi(state.eta_2 + v_2, eq.lambda_2)
    eta_2_dot = phi(state.eta_1 + v_1, eq.lambda_1) + eq.u_star - u
    return float(grad_1 * eta_1_dot + grad_2 * eta_2_dot)


def in_D0(state: OdeState, eq, gains: GainSet) -> bool:
    """True where the feedback is a positive harvesting rate."""
    return control_law(state, eq, gains) > 0.0


def closed_loop_matrix(eq, gains: GainSet) -> np.ndarray:
    """Jacobian of the closed-loop reduced dynamics at the origin."""
    c1, c2, theta = gains.c1, gains.c2, gains.theta
    return eq.lambda_2 * np.array([
        [0.0, -1.0],
        [c1 * (c2 + theta * c1), -(c1 + c2)],
    ])
