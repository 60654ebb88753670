"""
Validated run configuration for the two-species model.
"""

from dataclasses import dataclass
from typing import Any, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from kernels import KernelForm, KernelSpec, eval_kernel
from model.grid import AgeGrid, AgeProfile
from feedback.backstepping import GainSet

SPECIES = (1, 2)


@dataclass(frozen=True)
class SpeciesKernels:
    """Kernels of one species sampled on the run grid.

    ``interaction`` is b_i, the rate at which species i is removed per unit of
    the other species.
    """
    index: int
    grid: AgeGrid
    mortality: AgeProfile
    birth: AgeProfile
    interaction: AgeProfile


def harvesting_kernels(mu_bar: float = 0.5, k_bar: float = 3.0, b_bar: float = 0.4) -> Tuple[KernelSpec, KernelSpec, KernelSpec]:
    return (
        KernelSpec(KernelForm.EXP_GROWTH, (mu_bar,)),
        KernelSpec(KernelForm.EXP_DECAY, (k_bar,)),
        KernelSpec(KernelForm.PARABOLIC, (b_bar,)),
    )


class ModelConfig(BaseModel):
    """Kernels, equilibrium input, gains, grid and horizon of one run."""

    model_config = ConfigDict(frozen=True)

    A: float = Field(1.0, description="Maximum age")
    mortality: Tuple[KernelSpec, KernelSpec] = Field(..., description="mu_1, mu_2")
    birth: Tuple[KernelSpec, KernelSpec] = Field(..., description="k_1, k_2")
    interaction: Tuple[KernelSpec, KernelSpec] = Field(..., description="b_1, b_2")
    u_star: Optional[float] = Field(None, description="Equilibrium dilution; None selects zeta_2 / 2")
    c1: float = 1.0
    c2: float = 1.0
    theta: float = 1.0
    N_a: int = Field(400, description="Number of age intervals")
    T_final: float = 40.0
    dt_policy: Literal["match_da"] = "match_da"
    sigma_1: Optional[float] = None
    sigma_2: Optional[float] = None
    gamma_slack: float = 1.05
    feedback: Literal["state", "output"] = "state"
    solver: Literal["ipde", "odeide"] = "ipde"
    snapshots: Tuple[float, ...] = (0.0, 5.0, 10.0, 20.0, 40.0)

    @field_validator("c1", "c2", "theta")
    @classmethod
    def _gain_positive(cls, value: float, info) -> float:
        if not value > 0:
            raise ValueError(f"gain {info.field_name} must be positive")
        return value

    @field_validator("A", "T_final")
    @classmethod
    def _horizon_positive(cls, value: float, info) -> float:
        if not value > 0:
            raise ValueError(f"{info.field_name} must be positive")
        return value

    @field_validator("N_a")
    @classmethod
    def _grid_size(cls, value: int) -> int:
        if value < 2:
            raise ValueError("N_a must be at least 2")
        return value

    @field_validator("u_star")
    @classmethod
    def _u_star_non_negative(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and value < 0:
            raise ValueError("u_star must be non-negative")
        return value

    @field_validator("sigma_1", "sigma_2")
    @classmethod
    def _sigma_positive(cls, value: Optional[float], info) -> Optional[float]:
        if value is not None and not value > 0:
            raise ValueError(f"{info.field_name} must be positive")
        return value

    @field_validator("gamma_slack")
    @classmethod
    def _slack_above_one(cls, value: float) -> float:
        if not value > 1.0:
            raise ValueError("gamma_slack must exceed 1 (strict gamma lower bounds)")
        return value

    @field_validator("snapshots")
    @classmethod
    def _snapshots_sorted(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(t < 0 for t in value):
            raise ValueError("snapshots must be non-negative times")
        return tuple(sorted(set(value)))

    @model_validator(mode="after")
    def _kernels_admissible(self) -> "ModelConfig":
        grid = self.grid
        for label, specs in (("mortality", self.mortality), ("birth", self.birth), ("interaction", self.interaction)):
            for index, spec in zip(SPECIES, specs):
                try:
                    values = eval_kernel(spec, grid.ages, self.A)
                except ValueError as e:
                    raise ValueError(f"{label} kernel of species {index}: {e}")
                if np.any(values < 0.0):
                    raise ValueError(f"{label} kernel of species {index} must be non-negative on [0, A]")
                if not grid.integrate(values) > 0.0:
                    raise ValueError(f"{label} kernel of species {index} must have a positive integral")
        return self

    @property
    def grid(self) -> AgeGrid:
        return AgeGrid(self.A, self.N_a)

    @property
    def gains(self) -> GainSet:
        return GainSet(self.c1, self.c2, self.theta)

    @property
    def dt(self) -> float:
        return self.grid.step

    def species(self, index: int) -> SpeciesKernels:
        """Sample the kernels of species 1 or 2 on the run grid."""
        if index not in SPECIES:
            raise ValueError(f"species index must be 1 or 2, got {index}")
        grid = self.grid
        i = index - 1
        return SpeciesKernels(
            index=index,
            grid=grid,
            mortality=eval_kernel(self.mortality[i], grid.ages, self.A),
            birth=eval_kernel(self.birth[i], grid.ages, self.A),
            interaction=eval_kernel(self.interaction[i], grid.ages, self.A),
        )

    def replace(self, **changes: Any) -> "ModelConfig":
        """Return a re-validated copy with some fields changed."""
        return type(self).model_validate({**dict(self), **changes})


def harvesting_config(**overrides: Any) -> ModelConfig:
    """Parameter set of the harvesting example: A=1, mu=0.5e^a, k=3e^-a, b=0.4(a-a^2)."""
    mu, k, b = harvesting_kernels()
    values = dict(A=1.0, mortality=(mu, mu), birth=(k, k), interaction=(b, b))
    values.update(overrides)
    return ModelConfig(**values)
