"""
Closed-loop simulation package.

Two interchangeable solvers register with the SolverFactory at import time:
"ipde" advances the population densities on characteristics and "odeide"
advances the transformed (eta, psi) system.
"""

from .base.factory import SolverFactory
from .base.interfaces import ClosedLoopSolver, SimulationContext, Trajectory
from .history import HistoryBuffer
from .ipde import CharacteristicsStepper, IPDESolver, step_ipde
from .ode_ide import ODEIDESolver, step_ode_ide

SolverFactory.register_solver("ipde", IPDESolver)
SolverFactory.register_solver("odeide", ODEIDESolver)

from .runner import cross_solver_gap, initial_state, underpopulated_profiles, run_closed_loop  # noqa: E402
from .diagnostics import fit_exponential, fit_growth_rate, fit_psi_decay, fit_state_decay, state_norm_series  # noqa: E402
from .battery import InvarianceResult, run_invariance_battery, sample_invariance_states  # noqa: E402

__all__ = [
    'CharacteristicsStepper', 'ClosedLoopSolver', 'HistoryBuffer', 'IPDESolver', 'InvarianceResult',
    'ODEIDESolver', 'SimulationContext', 'SolverFactory', 'Trajectory', 'cross_solver_gap',
    'fit_exponential', 'fit_growth_rate', 'fit_psi_decay', 'fit_state_decay', 'initial_state',
    'underpopulated_profiles', 'run_closed_loop', 'run_invariance_battery', 'sample_invariance_states',
    'state_norm_series', 'step_ipde', 'step_ode_ide',
]
