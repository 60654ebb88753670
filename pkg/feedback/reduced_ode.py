# feedback/reduced_ode.py

from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt
from scipy.integrate import solve_ivp

from feedback.backstepping import GainSet, control_law_eta, phi


@dataclass(frozen=True)
class ReducedTrajectory:
    times: np.ndarray
    eta: np.ndarray      # shape (n, 2)
    u: np.ndarray


def reduced_rhs(eta: np.ndarray, eq, gains: GainSet, open_loop: bool = False) -> np.ndarray:
    """Right-hand side of the psi = 0 dynamics."""
    u = eq.u_star if open_loop else control_law_eta(eta[0], eta[1], eq, gains)
    return np.array([
        phi(eta[1], eq.lambda_2),
        phi(eta[0], eq.lambda_1) + eq.u_star - u,
    ])


def integrate_reduced_ode(
    eta0: npt.ArrayLike,
    eq,
    gains: GainSet,
    t_final: float,
    open_loop: bool = False,
    t_eval: Optional[npt.ArrayLike] = None,
    rtol: float = 1e-10,
    atol: float = 1e-14,
) -> ReducedTrajectory:
    """Integrate the reduced closed-loop (or open-loop) ODE with an adaptive solver."""
    if t_final <= 0:
        raise ValueError(f"t_final must be positive, got {t_final}")
    if t_eval is None:
        t_eval = np.linspace(0.0, t_final, int(np.ceil(t_final * 100)) + 1)

    solution = solve_ivp(
        lambda t, y: reduced_rhs(y, eq, gains, open_loop),
        (0.0, t_final),
        np.asarray(eta0, dtype=float),
        method="LSODA",
        t_eval=np.asarray(t_eval, dtype=float),
        rtol=rtol,
        atol=atol,
    )
    if not solution.success:
        raise RuntimeError(f"Reduced ODE integration failed: {solution.message}")

    eta = solution.y.T
    if open_loop:
        u = np.full(eta.shape[0], eq.u_star)
    else:
        u = control_law_eta(eta[:, 0], eta[:, 1], eq, gains)
    return ReducedTrajectory(times=solution.t, eta=eta, u=np.asarray(u))
