# kernels/parametric.py

from typing import Any, Dict

import numpy as np
import numpy.typing as npt

from kernels.base.interfaces import Kernel, KernelForm


class ParametricKernel(Kernel):
    """Closed-form kernel family whose first coefficient is a non-negative scale."""

    form: KernelForm
    n_params: int = 1
    expression: str = ""

    def get_form(self) -> KernelForm:
        return self.form

    def validate_params(self) -> bool:
        params = self.spec.params
        if len(params) != self.n_params:
            return False
        return all(np.isfinite(p) for p in params) and params[0] >= 0.0

    def get_capabilities(self) -> Dict[str, Any]:
        return {
            "form": self.form.value,
            "expression": self.expression,
            "params": list(self.spec.params),
        }

    @property
    def scale(self) -> float:
        return self.spec.params[0]


class ExponentialGrowthKernel(ParametricKernel):
    form = KernelForm.EXP_GROWTH
    expression = "scale * exp(a)"

    def evaluate(self, ages: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return self.scale * np.exp(ages)


class ExponentialDecayKernel(ParametricKernel):
    form = KernelForm.EXP_DECAY
    expression = "scale * exp(-a)"

    def evaluate(self, ages: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return self.scale * np.exp(-ages)


class ParabolicKernel(ParametricKernel):
    """Vanishes at ages 0 and 1; negative beyond age 1, so only valid for A <= 1."""
    form = KernelForm.PARABOLIC
    expression = "scale * (a - a^2)"

    def evaluate(self, ages: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return self.scale * (ages - ages * ages)


class ConstantKernel(ParametricKernel):
    form = KernelForm.CONSTANT
    expression = "scale"

    def evaluate(self, ages: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return np.full_like(ages, self.scale, dtype=float)


class GaussianKernel(ParametricKernel):
    """Peaked fertility profile: scale * exp(-(a - center)^2 / (2 width^2))."""
    form = KernelForm.GAUSSIAN
    n_params = 3
    expression = "scale * exp(-(a - center)^2 / (2 width^2))"

    def validate_params(self) -> bool:
        return super().validate_params() and self.spec.params[2] > 0.0

    def evaluate(self, ages: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        scale, center, width = self.spec.params
        return scale * np.exp(-0.5 * ((ages - center) / width) ** 2)
