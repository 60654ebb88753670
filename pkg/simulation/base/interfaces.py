"""
Base interfaces for closed-loop solvers.

This module defines the simulation context shared by all solvers, the
trajectory record they produce, and the abstract base class every solver
must implement.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from feedback.backstepping import GainSet, control_law_eta
from model.grid import AgeProfile
from transform.mapping import TransformedState


@dataclass(frozen=True)
class SimulationContext:
    """Equilibrium, gains and feedback mode of one closed-loop run."""
    eq: Any
    gains: GainSet
    open_loop: bool = False
    feedback: str = "state"
    output_kernel: Optional[AgeProfile] = None

    def __post_init__(self):
        if self.feedback not in ("state", "output"):
            raise ValueError(f"Unknown feedback mode: {self.feedback}")
        if self.feedback == "output" and self.output_kernel is None:
            object.__setattr__(self, "output_kernel", np.ones(self.eq.grid.size))

    @property
    def dt(self) -> float:
        return self.eq.grid.step

    def input_from_eta(self, eta_1: float, eta_2: float) -> float:
        """Harvesting rate for the (possibly estimated) log aggregates."""
        if self.open_loop:
            return self.eq.u_star
        return float(control_law_eta(eta_1, eta_2, self.eq, self.gains))


@dataclass
class Trajectory:
    """Time series of one closed-loop run.

    diagnostics holds per-time arrays: V, G1, G2, psi_sup1, psi_sup2, P1, P2,
    boundary1, boundary2 and the positivity flag `positive`.
    """
    solver: str
    times: np.ndarray
    eta_series: np.ndarray
    u_series: np.ndarray
    profile_snapshots: Dict[float, Tuple[AgeProfile, AgeProfile]] = field(default_factory=dict)
    diagnostics: Dict[str, np.ndarray] = field(default_factory=dict)
    open_loop: bool = False
    max_age: float = 1.0

    @property
    def psi_sup(self) -> np.ndarray:
        return np.maximum(self.diagnostics["psi_sup1"], self.diagnostics["psi_sup2"])

    @property
    def final_eta(self) -> np.ndarray:
        return self.eta_series[-1]


class ClosedLoopSolver(ABC):
    """Abstract base class for all closed-loop solvers.

    Every solver advances by exactly one age step per call, so the transport
    part is exact along characteristics.
    """

    def __init__(self, context: SimulationContext):
        self.context = context
        self.time = 0.0
        self.steps = 0

    @abstractmethod
    def get_solver_type(self) -> str:
        """Return the identifier of this solver."""
        pass

    @abstractmethod
    def initialize(self, state: TransformedState) -> bool:
        """Load the initial state. Return True if successful."""
        pass

    @abstractmethod
    def current_input(self) -> float:
        """Harvesting rate applied from the current state."""
        pass

    @abstractmethod
    def advance(self) -> None:
        """Advance the closed loop by one time step."""
        pass

    @abstractmethod
    def transformed_state(self) -> TransformedState:
        """Current (eta, psi)."""
        pass

    @abstractmethod
    def profiles(self) -> Tuple[AgeProfile, AgeProfile]:
        """Current population densities."""
        pass

    @abstractmethod
    def get_capabilities(self) -> Dict[str, Any]:
        """Return information about this solver."""
        pass

    def cleanup(self) -> None:
        """Optional cleanup method. Override if needed."""
        pass
