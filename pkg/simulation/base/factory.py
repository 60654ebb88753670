"""
Solver factory for creating closed-loop solvers.
"""

import logging
from typing import Any, Dict, List, Type

from .interfaces import ClosedLoopSolver, SimulationContext

logger = logging.getLogger(__name__)


class SolverFactory:
    """Factory class for registering and creating closed-loop solvers.

    Solvers carry the state of a single run, so every call returns a fresh
    instance.
    """

    _solvers: Dict[str, Type[ClosedLoopSolver]] = {}

    @classmethod
    def register_solver(cls, solver_type: str, solver_class: Type[ClosedLoopSolver]) -> None:
        """Register a new solver class."""
        if not issubclass(solver_class, ClosedLoopSolver):
            raise ValueError("Solver class must inherit from ClosedLoopSolver")

        cls._solvers[solver_type] = solver_class
        logger.debug("Registered solver: %s", solver_type)

    @classmethod
    def get_solver(cls, solver_type: str, context: SimulationContext) -> ClosedLoopSolver:
        """Create a solver instance for one run."""
        if solver_type not in cls._solvers:
            raise ValueError(f"Unknown solver type: {solver_type}")
        return cls._solvers[solver_type](context)

    @classmethod
    def list_available_solvers(cls) -> List[str]:
        """Get list of all registered solver types."""
        return list(cls._solvers.keys())

    @classmethod
    def get_all_capabilities(cls, context: SimulationContext) -> Dict[str, Dict[str, Any]]:
        """Get capabilities of all registered solvers."""
        capabilities = {}
        for solver_type, solver_class in cls._solvers.items():
            try:
                capabilities[solver_type] = solver_class(context).get_capabilities()
            except Exception as e:
                capabilities[solver_type] = {"error": str(e)}
        return capabilities
