"""
Base interfaces for age-dependent rate kernels.

This module defines the kernel description carried by a run configuration and
the abstract base class every kernel family must implement.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Tuple

import numpy as np
import numpy.typing as npt


class KernelForm(str, Enum):
    """Enumerated kernel families."""
    EXP_GROWTH = "exp_growth"      # scale * e^a, mortality
    EXP_DECAY = "exp_decay"        # scale * e^-a, birth
    PARABOLIC = "parabolic"        # scale * (a - a^2), interaction
    CONSTANT = "constant"
    GAUSSIAN = "gaussian"          # scale * exp(-(a - center)^2 / (2 width^2))
    TABULATED = "tabulated"        # (age, value) pairs, linear interpolation


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its real coefficients.

    Tabulated kernels store their table flattened as (a0, v0, a1, v1, ...).
    """
    form: KernelForm
    params: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "form", KernelForm(self.form))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    @classmethod
    def from_table(cls, ages: npt.ArrayLike, values: npt.ArrayLike) -> "KernelSpec":
        ages = np.asarray(ages, dtype=float)
        values = np.asarray(values, dtype=float)
        if ages.shape != values.shape or ages.ndim != 1:
            raise ValueError("tabulated kernel needs matching 1-D age and value columns")
        flat = np.column_stack([ages, values]).ravel()
        return cls(KernelForm.TABULATED, tuple(float(p) for p in flat))


class Kernel(ABC):
    """Abstract base class for all kernel families."""

    def __init__(self, spec: KernelSpec):
        self.spec = spec

    @abstractmethod
    def get_form(self) -> KernelForm:
        """Return the family handled by this kernel."""
        pass

    @abstractmethod
    def validate_params(self) -> bool:
        """Check the coefficients. Return True if the kernel is usable."""
        pass

    @abstractmethod
    def evaluate(self, ages: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """Evaluate the kernel at the given ages (already range-checked)."""
        pass

    @abstractmethod
    def get_capabilities(self) -> Dict[str, Any]:
        """Return a short description of the family and its parameters."""
        pass

    def __call__(self, ages: npt.ArrayLike, max_age: float) -> npt.NDArray[np.float64]:
        ages = np.asarray(ages, dtype=float)
        if np.any(ages < 0.0) or np.any(ages > max_age):
            raise ValueError(f"age outside [0, {max_age}] for {self.get_form().value} kernel")
        return self.evaluate(ages)
