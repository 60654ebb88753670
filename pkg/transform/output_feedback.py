"""
Aggregate estimate from a lumped measurement y_i = int q(a) x_i(a) da.

The estimate y_i / int q x_i* equals Pi_i (1 + s_out_i), where s_out_i is the
q-weighted average of psi_i; ln of the estimate therefore differs from eta_i by
ln(1 + s_out_i), which is bounded by the G functional of psi_i.
"""

import numpy as np
import numpy.typing as npt

from model.grid import AgeProfile
from transform.eigenfunctions import species_transform


def _check_output_kernel(eq, index: int, q: npt.ArrayLike) -> AgeProfile:
    q = np.asarray(q, dtype=float)
    grid = eq.grid
    if q.shape != (grid.size,):
        raise ValueError(f"output kernel must have {grid.size} samples, got shape {q.shape}")
    if np.any(q < 0.0) or not grid.integrate(q * eq.profile(index)) > 0.0:
        raise ValueError(f"degenerate output kernel for species {index}")
    return q


def measure_output(eq, index: int, x: npt.ArrayLike, q: npt.ArrayLike) -> float:
    """y_i = int q x_i."""
    q = _check_output_kernel(eq, index, q)
    return eq.grid.integrate(q * np.asarray(x, dtype=float))


def output_feedback_pi(eq, index: int, y: float, q: npt.ArrayLike) -> float:
    """Estimate of Pi_i from the measured output y."""
    q = _check_output_kernel(eq, index, q)
    if not y > 0.0:
        raise ValueError(f"measured output must be positive, got {y}")
    return y / eq.grid.integrate(q * eq.profile(index))


def output_mismatch(eq, index: int, psi: npt.ArrayLike, q: npt.ArrayLike) -> float:
    """s_out_i: q x_i*-weighted mean of psi_i; ln(estimate) - eta_i = ln(1 + s_out_i)."""
    q = _check_output_kernel(eq, index, q)
    st = species_transform(eq, index)
    weight = q * st.x_star
    return eq.grid.integrate(weight * np.asarray(psi, dtype=float)) / eq.grid.integrate(weight)


def total_population_kernel(eq) -> AgeProfile:
    """q = 1: the measurement is the total head count."""
    return np.ones(eq.grid.size)
