"""
Transformed solver: eta by RK4, psi by the discrete renewal recursion.

psi_i(t + dt) = [sum_{j>=1} w_j k~_j psi_i(t + dt - a_j)] / (1 - w_0 k~_0)

is appended first; the v-map is then frozen per RK4 stage at its value at t
(first stage), t + dt (last stage) and their mean (middle stages).
"""

from typing import Any, Callable, Dict, Tuple, Union

import numpy as np

from feedback.backstepping import phi
from model.grid import AgeProfile
from simulation.base.interfaces import ClosedLoopSolver, SimulationContext
from simulation.history import HistoryBuffer
from transform.eigenfunctions import SpeciesTransform, species_transform
from transform.mapping import TransformedState, reconstruct
from transform.output_feedback import output_mismatch

Control = Union[float, Callable[[np.ndarray], float]]


def renewal_value(st: SpeciesTransform, ordered: np.ndarray) -> float:
    """Next psi value from the current ordered history (index j = age a_j)."""
    return st.renewal_gain * float(np.dot(st.renewal_weights[1:], ordered[:-1]))


def v_value(st: SpeciesTransform, ordered: np.ndarray) -> float:
    argument = 1.0 + st.grid.integrate(st.interaction_normalized * ordered)
    if argument <= 0.0:
        raise ValueError(f"v-map argument of species {st.index} is not positive: {argument}")
    return float(np.log(argument))


def _rk4_eta(eq, eta: np.ndarray, v_start: np.ndarray, v_end: np.ndarray, control: Control, dt: float) -> np.ndarray:
    v_mid = 0.5 * (v_start + v_end)

    def rhs(y: np.ndarray, v: np.ndarray) -> np.ndarray:
        u = control(y) if callable(control) else control
        return np.array([
            phi(y[1] + v[1], eq.lambda_2),
            phi(y[0] + v[0], eq.lambda_1) + eq.u_star - u,
        ])

    k1 = rhs(eta, v_start)
    k2 = rhs(eta + 0.5 * dt * k1, v_mid)
    k3 = rhs(eta + 0.5 * dt * k2, v_mid)
    k4 = rhs(eta + dt * k3, v_end)
    return eta + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_ode_ide(eq, state: TransformedState, control: Control) -> TransformedState:
    """One dt = da step of the transformed system.

    control is either a fixed input u or a function of the stage eta.
    """
    transforms = (species_transform(eq, 1), species_transform(eq, 2))
    histories = (np.asarray(state.psi_1, float), np.asarray(state.psi_2, float))
    advanced = []
    for st, ordered in zip(transforms, histories):
        advanced.append(np.concatenate(([renewal_value(st, ordered)], ordered[:-1])))
    v_start = np.array([v_value(st, h) for st, h in zip(transforms, histories)])
    v_end = np.array([v_value(st, h) for st, h in zip(transforms, advanced)])
    eta = _rk4_eta(eq, state.eta, v_start, v_end, control, eq.grid.step)
    return TransformedState(float(eta[0]), float(eta[1]), advanced[0], advanced[1])


class ODEIDESolver(ClosedLoopSolver):
    """Transformed (eta, psi) system with ring-buffer histories."""

    def __init__(self, context: SimulationContext):
        super().__init__(context)
        self.transforms = (species_transform(context.eq, 1), species_transform(context.eq, 2))
        for st in self.transforms:
            st.renewal_gain  # raises on a degenerate grid
        self.eta = np.zeros(2)
        self.histories = None

    def get_solver_type(self) -> str:
        return "odeide"

    def initialize(self, state: TransformedState) -> bool:
        self.eta = state.eta.astype(float)
        self.histories = (HistoryBuffer(state.psi_1), HistoryBuffer(state.psi_2))
        self.time = 0.0
        self.steps = 0
        return True

    def _estimate_offset(self, ordered: Tuple[np.ndarray, np.ndarray]) -> np.ndarray:
        """ln(estimate) - eta for the lumped measurement, zero for state feedback."""
        context = self.context
        if context.open_loop or context.feedback == "state":
            return np.zeros(2)
        return np.array([
            np.log1p(output_mismatch(context.eq, i, ordered[i - 1], context.output_kernel)) for i in (1, 2)
        ])

    def _control(self, offset: np.ndarray) -> Callable[[np.ndarray], float]:
        return lambda y: self.context.input_from_eta(y[0] + offset[0], y[1] + offset[1])

    def current_input(self) -> float:
        ordered = tuple(h.ordered() for h in self.histories)
        return self._control(self._estimate_offset(ordered))(self.eta)

    def advance(self) -> None:
        ordered = tuple(h.ordered() for h in self.histories)
        offset = self._estimate_offset(ordered)
        v_start = np.array([v_value(st, h) for st, h in zip(self.transforms, ordered)])
        for st, history, h in zip(self.transforms, self.histories, ordered):
            history.push(renewal_value(st, h))
        v_end = np.array([v_value(st, h.ordered()) for st, h in zip(self.transforms, self.histories)])
        self.eta = _rk4_eta(self.context.eq, self.eta, v_start, v_end, self._control(offset), self.context.dt)
        self.steps += 1
        self.time = self.steps * self.context.dt

    def transformed_state(self) -> TransformedState:
        psi_1, psi_2 = (h.ordered() for h in self.histories)
        return TransformedState(float(self.eta[0]), float(self.eta[1]), psi_1, psi_2)

    def profiles(self) -> Tuple[AgeProfile, AgeProfile]:
        return reconstruct(self.context.eq, self.transformed_state())

    def get_capabilities(self) -> Dict[str, Any]:
        return {
            "solver": "odeide",
            "scheme": "RK4 for eta, trapezoid renewal recursion for psi",
            "order": 1,
            "feedback": ["state", "output"],
        }
