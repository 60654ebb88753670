# simulation/history.py

import numpy as np
import numpy.typing as npt


class HistoryBuffer:
    """Ring buffer of psi(t - a_j), j = 0..N, advanced one age step at a time."""

    def __init__(self, values: npt.ArrayLike):
        values = np.array(values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("history needs at least two samples")
        if np.any(values <= -1.0):
            raise ValueError("history values must stay above -1")
        self._data = values
        self._head = 0

    def __len__(self) -> int:
        return self._data.size

    @property
    def newest(self) -> float:
        return float(self._data[self._head])

    def push(self, value: float) -> None:
        """Drop psi(t - A) and prepend psi(t + dt)."""
        if not value > -1.0:
            raise ValueError(f"history value {value} left (-1, inf)")
        self._head = (self._head - 1) % self._data.size
        self._data[self._head] = value

    def ordered(self) -> np.ndarray:
        """Copy with index j holding psi(t - a_j)."""
        return np.roll(self._data, -self._head)
