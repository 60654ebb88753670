"""
Exception types raised across the package.

All of them derive from built-in exceptions so callers may catch either the
specific type or the ValueError / RuntimeError family.
"""

from typing import Any, Optional


class ConfigError(ValueError):
    """Configuration file could not be parsed or violates an invariant."""


class EquilibriumError(ValueError):
    """No positive equilibrium exists for the requested parameters."""


class TransformError(ValueError):
    """A profile or history is outside the state space of the transform."""


class CertificateError(RuntimeError):
    """A Lyapunov certificate cannot be constructed for these parameters."""


class SimulationGuardError(RuntimeError):
    """A simulation was stopped by a numerical guard."""

    def __init__(self, guard: str, message: str, trajectory: Optional[Any] = None):
        super().__init__(f"{guard}: {message}")
        self.guard = guard
        self.trajectory = trajectory
