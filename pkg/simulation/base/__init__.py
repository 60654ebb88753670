"""
Base interfaces and factory for closed-loop solvers.
"""

from .interfaces import ClosedLoopSolver, SimulationContext, Trajectory
from .factory import SolverFactory

__all__ = ['ClosedLoopSolver', 'SimulationContext', 'Trajectory', 'SolverFactory']
