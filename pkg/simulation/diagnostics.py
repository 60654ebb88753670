# simulation/diagnostics.py

import logging
from typing import Optional, Tuple

import numpy as np
import numpy.typing as npt

from simulation.base.interfaces import Trajectory

logger = logging.getLogger(__name__)

PSI_FLOOR = 1e-10


def fit_exponential(times: npt.ArrayLike, values: npt.ArrayLike) -> Tuple[float, float]:
    """Least-squares fit of values ~ M e^{rate t}; returns (M, rate)."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.size < 2:
        raise ValueError("window empty: need at least two samples to fit")
    if np.any(values <= 0.0):
        raise ValueError("exponential fit needs positive samples")
    slope, intercept = np.polyfit(times, np.log(values), 1)
    return float(np.exp(intercept)), float(slope)


def state_norm_series(traj: Trajectory) -> np.ndarray:
    """|eta(t)| + max_i sup |psi_i|."""
    return np.linalg.norm(traj.eta_series, axis=1) + traj.psi_sup


def _window(times: np.ndarray, values: np.ndarray, t_start: float, t_end: Optional[float],
            floor: float, ceiling: Optional[float] = None) -> np.ndarray:
    mask = (times >= t_start) & (values > floor) & np.isfinite(values)
    if t_end is not None:
        mask &= times <= t_end
    if ceiling is not None:
        above = np.nonzero((values > ceiling) & (times >= t_start))[0]
        if above.size:
            mask[above[0]:] = False
    return mask


def fit_psi_decay(traj: Trajectory, t_start: Optional[float] = None, t_end: Optional[float] = None,
                  floor: float = PSI_FLOOR) -> Tuple[float, float]:
    """(M, sigma_fit) with sup|psi_t| ~ M e^{-sigma_fit t}.

    The fit starts after one maximum age by default, once the initial history
    has been renewed.
    """
    sup = traj.psi_sup
    if t_start is None:
        t_start = float(traj.max_age)
    mask = _window(traj.times, sup, t_start, t_end, floor)
    if np.count_nonzero(mask) < 2:
        raise ValueError("window empty: psi history is identically zero or below the floor")
    prefactor, rate = fit_exponential(traj.times[mask], sup[mask])
    logger.debug("psi decay fit: M=%.4g sigma=%.4g over %d samples", prefactor, -rate, np.count_nonzero(mask))
    return prefactor, -rate


def fit_growth_rate(traj: Trajectory, t_start: float = 0.0, ceiling: float = 0.15,
                    floor: float = 1e-14) -> float:
    """Exponential rate of |eta(t)| up to the first time it exceeds ceiling."""
    norm = np.linalg.norm(traj.eta_series, axis=1)
    mask = _window(traj.times, norm, t_start, None, floor, ceiling)
    if np.count_nonzero(mask) < 2:
        raise ValueError("window empty: no samples between t_start and the growth ceiling")
    return fit_exponential(traj.times[mask], norm[mask])[1]


def fit_state_decay(traj: Trajectory, t_start: float = 0.0, t_end: Optional[float] = None,
                    floor: float = 1e-12) -> float:
    """Decay rate of |eta| + sup|psi| over the window."""
    norm = state_norm_series(traj)
    mask = _window(traj.times, norm, t_start, t_end, floor)
    if np.count_nonzero(mask) < 2:
        raise ValueError("window empty: state below the floor over the whole window")
    return -fit_exponential(traj.times[mask], norm[mask])[1]
