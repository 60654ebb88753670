"""
Steady states: Lotka-Sharpe parameters, interaction constants, newborn densities.
"""

from .lotka_sharpe import lotka_sharpe_integral, solve_lotka_sharpe, survival_profile
from .steady_state import (
    EquilibriumData,
    assemble_equilibrium,
    interaction_residuals,
    lotka_sharpe_residuals,
    open_loop_eigenvalues,
)

__all__ = [
    'EquilibriumData', 'assemble_equilibrium', 'interaction_residuals', 'lotka_sharpe_integral',
    'lotka_sharpe_residuals', 'open_loop_eigenvalues', 'solve_lotka_sharpe', 'survival_profile',
]
