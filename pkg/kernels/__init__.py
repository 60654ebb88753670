"""
Kernel package: mortality, birth and interaction rates as functions of age.

Kernel families register with the KernelFactory at import time; new families
are added by subclassing Kernel and calling KernelFactory.register_kernel.
"""

import numpy as np
import numpy.typing as npt

from .base.factory import KernelFactory
from .base.interfaces import Kernel, KernelForm, KernelSpec
from .parametric import (
    ConstantKernel,
    ExponentialDecayKernel,
    ExponentialGrowthKernel,
    GaussianKernel,
    ParabolicKernel,
)
from .tabulated import TabulatedKernel

KernelFactory.register_kernel(KernelForm.EXP_GROWTH, ExponentialGrowthKernel)
KernelFactory.register_kernel(KernelForm.EXP_DECAY, ExponentialDecayKernel)
KernelFactory.register_kernel(KernelForm.PARABOLIC, ParabolicKernel)
KernelFactory.register_kernel(KernelForm.CONSTANT, ConstantKernel)
KernelFactory.register_kernel(KernelForm.GAUSSIAN, GaussianKernel)
KernelFactory.register_kernel(KernelForm.TABULATED, TabulatedKernel)


def eval_kernel(spec: KernelSpec, a: npt.ArrayLike, max_age: float) -> npt.NDArray[np.float64]:
    """Evaluate a kernel at age(s) a in [0, max_age]."""
    return KernelFactory.get_kernel(spec)(a, max_age)


__all__ = [
    'Kernel',
    'KernelFactory',
    'KernelForm',
    'KernelSpec',
    'eval_kernel',
]
