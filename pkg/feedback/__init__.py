"""
Backstepping feedback, reduced-ODE Lyapunov functions and the psi = 0 integrator.
"""

from .backstepping import (
    GainSet,
    OdeState,
    V1,
    V2,
    V3,
    V3_dot_along,
    V3_dot_closed_form,
    V3_eta,
    V4,
    closed_loop_matrix,
    control_law,
    control_law_eta,
    control_law_from_pi,
    in_D0,
    mu_sq,
    omega,
    phi,
)
from .reduced_ode import ReducedTrajectory, integrate_reduced_ode

__all__ = [
    'GainSet', 'OdeState', 'V1', 'V2', 'V3', 'V3_dot_along', 'V3_dot_closed_form', 'V3_eta', 'V4',
    'closed_loop_matrix', 'control_law', 'control_law_eta', 'control_law_from_pi', 'in_D0',
    'mu_sq', 'omega', 'phi', 'ReducedTrajectory', 'integrate_reduced_ode',
]
