"""
Kernel factory for creating and caching kernel families.
"""

import logging
import threading
from typing import Any, Dict, List, Type

from .interfaces import Kernel, KernelForm, KernelSpec

logger = logging.getLogger(__name__)


class KernelFactory:
    """Factory class for registering kernel families and building kernels."""

    _kernels: Dict[KernelForm, Type[Kernel]] = {}
    _instances: Dict[KernelSpec, Kernel] = {}
    _lock = threading.Lock()

    @classmethod
    def register_kernel(cls, form: KernelForm, kernel_class: Type[Kernel]) -> None:
        """Register a kernel class for a family."""
        if not issubclass(kernel_class, Kernel):
            raise ValueError("Kernel class must inherit from Kernel")

        cls._kernels[KernelForm(form)] = kernel_class
        logger.debug("Registered kernel family: %s", KernelForm(form).value)

    @classmethod
    def get_kernel(cls, spec: KernelSpec) -> Kernel:
        """Get a validated kernel instance for the spec."""
        if spec.form not in cls._kernels:
            raise ValueError(f"Unknown kernel family: {spec.form}")

        with cls._lock:
            if spec in cls._instances:
                return cls._instances[spec]

            kernel = cls._kernels[spec.form](spec)
            if not kernel.validate_params():
                raise ValueError(f"Invalid parameters for {spec.form.value} kernel: {spec.params}")

            cls._instances[spec] = kernel
            return kernel

    @classmethod
    def list_available_kernels(cls) -> List[str]:
        """Get list of all registered kernel families."""
        return [form.value for form in cls._kernels]

    @classmethod
    def get_all_capabilities(cls) -> Dict[str, Dict[str, Any]]:
        """Get capabilities of every cached kernel, keyed by family."""
        capabilities: Dict[str, Dict[str, Any]] = {}
        for spec, kernel in list(cls._instances.items()):
            capabilities.setdefault(spec.form.value, kernel.get_capabilities())
        return capabilities

    @classmethod
    def clear_cache(cls) -> None:
        with cls._lock:
            cls._instances.clear()
