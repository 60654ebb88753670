"""
Direct IPDE solver on characteristics (dt = da).

Each step shifts both profiles one age cell, multiplies by the survival
factor of that cell and solves the renewal condition for the newborns.
Mortality over a cell is the trapezoid cell integral of mu, the same rule
that defines the equilibrium survival profile, so x* is a fixed point.
Interaction and harvesting are held at their values at the start of the step.
"""

from typing import Any, Dict, Tuple

import numpy as np

from model.configuration import SpeciesKernels
from model.grid import AgeGrid, AgeProfile
from simulation.base.interfaces import ClosedLoopSolver, SimulationContext
from transform.mapping import TransformedState, forward_transform, reconstruct
from transform.output_feedback import measure_output, output_feedback_pi


class CharacteristicsStepper:
    """Precomputed per-cell factors for the characteristics update."""

    def __init__(self, grid: AgeGrid, species_1: SpeciesKernels, species_2: SpeciesKernels):
        self.grid = grid
        self.species = (species_1, species_2)
        self.cell_mortality = tuple(np.diff(grid.cumulative(sp.mortality)) for sp in self.species)
        self.renewal_weights = tuple(grid.weights * sp.birth for sp in self.species)
        self.renewal_denominators = tuple(1.0 - w[0] for w in self.renewal_weights)
        for index, denominator in zip((1, 2), self.renewal_denominators):
            if denominator <= 0.0:
                raise ValueError(
                    f"grid too coarse for the birth kernel of species {index}: 1 - w0*k(0) = {denominator}"
                )

    @classmethod
    def from_equilibrium(cls, eq) -> "CharacteristicsStepper":
        return cls(eq.grid, eq.species_1, eq.species_2)

    def interaction(self, x1: AgeProfile, x2: AgeProfile) -> Tuple[float, float]:
        """(int b_1 x_2, int b_2 x_1)."""
        return (self.grid.integrate(self.species[0].interaction * x2),
                self.grid.integrate(self.species[1].interaction * x1))

    def step(self, x1: AgeProfile, x2: AgeProfile, u: float) -> Tuple[AgeProfile, AgeProfile]:
        dt = self.grid.step
        interaction = self.interaction(x1, x2)
        removal = (interaction[0], interaction[1] + u)
        out = []
        for i, x in enumerate((x1, x2)):
            new = np.empty_like(x)
            new[1:] = x[:-1] * np.exp(-self.cell_mortality[i] - dt * removal[i])
            weights = self.renewal_weights[i]
            new[0] = float(np.dot(weights[1:], new[1:])) / self.renewal_denominators[i]
            out.append(new)
        return out[0], out[1]


def step_ipde(eq, x1: AgeProfile, x2: AgeProfile, u: float) -> Tuple[AgeProfile, AgeProfile]:
    """Advance both profiles by one age step with harvesting u on species 2."""
    return CharacteristicsStepper.from_equilibrium(eq).step(np.asarray(x1, float), np.asarray(x2, float), u)


class IPDESolver(ClosedLoopSolver):
    """Population densities advanced on characteristics; u from the Pi functionals."""

    def __init__(self, context: SimulationContext):
        super().__init__(context)
        self.stepper = CharacteristicsStepper.from_equilibrium(context.eq)
        self.x1 = None
        self.x2 = None
        self._state = None

    def get_solver_type(self) -> str:
        return "ipde"

    def initialize(self, state: TransformedState) -> bool:
        self.x1, self.x2 = reconstruct(self.context.eq, state)
        self._state = state
        self.time = 0.0
        self.steps = 0
        return True

    def current_input(self) -> float:
        context = self.context
        if context.open_loop:
            return context.eq.u_star
        if context.feedback == "output":
            eta_hat = [
                np.log(output_feedback_pi(context.eq, i, measure_output(context.eq, i, x, context.output_kernel),
                                          context.output_kernel))
                for i, x in ((1, self.x1), (2, self.x2))
            ]
            return context.input_from_eta(eta_hat[0], eta_hat[1])
        state = self.transformed_state()
        return context.input_from_eta(state.eta_1, state.eta_2)

    def advance(self) -> None:
        u = self.current_input()
        self.x1, self.x2 = self.stepper.step(self.x1, self.x2, u)
        self._state = None
        self.steps += 1
        self.time = self.steps * self.context.dt

    def transformed_state(self) -> TransformedState:
        if self._state is None:
            self._state = forward_transform(self.context.eq, self.x1, self.x2)
        return self._state

    def profiles(self) -> Tuple[AgeProfile, AgeProfile]:
        return self.x1, self.x2

    def get_capabilities(self) -> Dict[str, Any]:
        return {
            "solver": "ipde",
            "scheme": "characteristics, dt = da, explicit interaction",
            "order": 1,
            "feedback": ["state", "output"],
        }
