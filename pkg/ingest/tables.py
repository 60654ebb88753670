# ingest/tables.py

import logging
import os
from typing import Tuple

import numpy as np

from model.errors import ConfigError
from model.grid import AgeGrid, AgeProfile

logger = logging.getLogger(__name__)


def _has_header(file_path: str) -> bool:
    with open(file_path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                [float(cell) for cell in line.split(",")]
                return False
            except ValueError:
                return True
    return False


def load_table(file_path: str, columns: int) -> np.ndarray:
    """Read a comma-separated numeric table with an optional one-line header."""
    if not os.path.isfile(file_path):
        raise ConfigError(f"table file not found: {file_path}")
    try:
        data = np.loadtxt(file_path, delimiter=",", comments="#", skiprows=1 if _has_header(file_path) else 0,
                          ndmin=2)
    except ValueError as e:
        raise ConfigError(f"cannot parse {file_path}: {e}") from e
    if data.shape[1] != columns:
        raise ConfigError(f"{file_path}: expected {columns} columns, found {data.shape[1]}")
    if data.shape[0] < 2:
        raise ConfigError(f"{file_path}: need at least two rows")
    if np.any(np.diff(data[:, 0]) <= 0.0):
        raise ConfigError(f"{file_path}: ages must be strictly increasing")
    return data


def load_kernel_table(file_path: str) -> Tuple[np.ndarray, np.ndarray]:
    """Two-column (age, value) kernel table."""
    data = load_table(file_path, 2)
    return data[:, 0], data[:, 1]


def load_profiles(file_path: str, grid: AgeGrid) -> Tuple[AgeProfile, AgeProfile]:
    """Initial densities from an (a, x1, x2) table, interpolated onto the grid if needed."""
    data = load_table(file_path, 3)
    ages = data[:, 0]
    if ages[0] > 0.0 or ages[-1] < grid.max_age:
        raise ConfigError(f"{file_path}: ages must cover [0, {grid.max_age}]")
    if ages.size == grid.size and np.allclose(ages, grid.ages, rtol=0.0, atol=1e-12):
        x1, x2 = data[:, 1].copy(), data[:, 2].copy()
    else:
        logger.warning("profile table %s is not on the run grid (N=%d); interpolating linearly",
                       file_path, grid.n_intervals)
        x1 = np.interp(grid.ages, ages, data[:, 1])
        x2 = np.interp(grid.ages, ages, data[:, 2])
    if np.any(x1 <= 0.0) or np.any(x2 <= 0.0):
        raise ConfigError(f"{file_path}: population profiles must be strictly positive")
    return x1, x2
