# model/grid.py

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

AgeProfile = npt.NDArray[np.float64]


@dataclass(frozen=True)
class AgeGrid:
    """Uniform age grid a_j = j*da on [0, A] with composite trapezoid weights."""

    max_age: float
    n_intervals: int
    ages: AgeProfile = field(init=False, repr=False, compare=False)
    weights: AgeProfile = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.max_age <= 0:
            raise ValueError(f"max age must be positive, got {self.max_age}")
        if self.n_intervals < 2:
            raise ValueError(f"grid needs at least 2 intervals, got {self.n_intervals}")
        ages = np.linspace(0.0, self.max_age, self.n_intervals + 1)
        weights = np.full(self.n_intervals + 1, self.step)
        weights[0] = weights[-1] = 0.5 * self.step
        ages.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "ages", ages)
        object.__setattr__(self, "weights", weights)

    @property
    def step(self) -> float:
        return self.max_age / self.n_intervals

    @property
    def size(self) -> int:
        return self.n_intervals + 1

    def integrate(self, values: npt.ArrayLike) -> float:
        """Trapezoid integral over [0, A]."""
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))

    def cumulative(self, values: npt.ArrayLike) -> AgeProfile:
        """Running trapezoid integral from 0 to each node."""
        values = np.asarray(values, dtype=float)
        out = np.empty_like(values)
        out[0] = 0.0
        np.cumsum(0.5 * self.step * (values[:-1] + values[1:]), out=out[1:])
        return out

    def tail(self, values: npt.ArrayLike) -> AgeProfile:
        """Trapezoid integral from each node to A."""
        cumulative = self.cumulative(values)
        return cumulative[-1] - cumulative

    def check_profile(self, values: npt.ArrayLike, name: str, positive: bool = False) -> AgeProfile:
        values = np.asarray(values, dtype=float)
        if values.shape != (self.size,):
            raise ValueError(f"{name} must have {self.size} samples, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError(f"{name} contains non-finite values")
        if positive and np.any(values <= 0.0):
            raise ValueError(f"{name} must be strictly positive")
        return values
