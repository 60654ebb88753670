"""
Model definition: age grid, validated configuration, per-species kernels.
"""

from .errors import CertificateError, ConfigError, EquilibriumError, SimulationGuardError, TransformError
from .grid import AgeGrid, AgeProfile
from .configuration import ModelConfig, SpeciesKernels, harvesting_config, harvesting_kernels

__all__ = [
    'AgeGrid', 'AgeProfile', 'ModelConfig', 'SpeciesKernels', 'harvesting_config', 'harvesting_kernels',
    'CertificateError', 'ConfigError', 'EquilibriumError', 'SimulationGuardError', 'TransformError',
]
