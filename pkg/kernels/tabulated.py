"""
Tabulated kernels given as (age, value) pairs, linearly interpolated.
"""

from typing import Any, Dict

import numpy as np
import numpy.typing as npt

from kernels.base.interfaces import Kernel, KernelForm


class TabulatedKernel(Kernel):
    """Kernel read from a table; outside the table the end values are held."""

    def __init__(self, spec):
        super().__init__(spec)
        table = np.asarray(spec.params, dtype=float)
        self.table_ages = table[0::2]
        self.table_values = table[1::2]

    def get_form(self) -> KernelForm:
        return KernelForm.TABULATED

    def validate_params(self) -> bool:
        if len(self.spec.params) < 4 or len(self.spec.params) % 2:
            return False
        if not (np.all(np.isfinite(self.table_ages)) and np.all(np.isfinite(self.table_values))):
            return False
        return bool(np.all(np.diff(self.table_ages) > 0.0))

    def evaluate(self, ages: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return np.interp(ages, self.table_ages, self.table_values)

    def get_capabilities(self) -> Dict[str, Any]:
        return {
            "form": KernelForm.TABULATED.value,
            "expression": "linear interpolation",
            "points": int(self.table_ages.size),
            "age_range": [float(self.table_ages[0]), float(self.table_ages[-1])],
        }
