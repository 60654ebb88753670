"""
Base interfaces and factory for kernel families.
"""

from .interfaces import Kernel, KernelForm, KernelSpec
from .factory import KernelFactory

__all__ = ['Kernel', 'KernelForm', 'KernelSpec', 'KernelFactory']
