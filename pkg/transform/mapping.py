# transform/mapping.py

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import numpy.typing as npt

from model.errors import TransformError
from model.grid import AgeProfile
from transform.eigenfunctions import SpeciesTransform, species_transform


@dataclass(frozen=True)
class TransformedState:
    """Log aggregates eta_i and histories psi_i[j] = psi_i(-a_j)."""
    eta_1: float
    eta_2: float
    psi_1: AgeProfile
    psi_2: AgeProfile

    @property
    def eta(self) -> np.ndarray:
        return np.array([self.eta_1, self.eta_2])

    def psi(self, index: int) -> AgeProfile:
        return self.psi_1 if index == 1 else self.psi_2

    @classmethod
    def at_origin(cls, size: int) -> "TransformedState":
        return cls(0.0, 0.0, np.zeros(size), np.zeros(size))


def _check_history(st: SpeciesTransform, psi: npt.ArrayLike) -> AgeProfile:
    psi = np.asarray(psi, dtype=float)
    if psi.shape != (st.grid.size,):
        raise TransformError(f"psi_{st.index} must have {st.grid.size} samples, got shape {psi.shape}")
    if np.any(psi <= -1.0):
        raise TransformError(f"psi_{st.index} must stay above -1")
    return psi


def _pi(st: SpeciesTransform, x: npt.ArrayLike) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (st.grid.size,):
        raise TransformError(f"profile of species {st.index} must have {st.grid.size} samples")
    if np.any(x <= 0.0):
        raise TransformError(f"profile of species {st.index} must be strictly positive")
    return st.eigenfunction.pair(x) / st.pi_denominator


def pi_functional(eq, index: int, x: npt.ArrayLike) -> float:
    """Pi_i[x] = <pi0_i, x> / int a k_i x_i*."""
    return _pi(species_transform(eq, index), x)


def forward_transform(eq, x1: npt.ArrayLike, x2: npt.ArrayLike) -> TransformedState:
    """Map positive profiles to (eta, psi)."""
    etas, psis = [], []
    for index, x in ((1, x1), (2, x2)):
        st = species_transform(eq, index)
        pi = _pi(st, x)
        etas.append(float(np.log(pi)))
        psis.append(np.asarray(x, dtype=float) / (st.x_star * pi) - 1.0)
    return TransformedState(etas[0], etas[1], psis[0], psis[1])


def reconstruct(eq, state: TransformedState) -> Tuple[AgeProfile, AgeProfile]:
    """x_i = x_i* e^{eta_i} (1 + psi_i)."""
    profiles = []
    for index in (1, 2):
        st = species_transform(eq, index)
        psi = _check_history(st, state.psi(index))
        eta = state.eta_1 if index == 1 else state.eta_2
        profiles.append(st.x_star * np.exp(eta) * (1.0 + psi))
    return profiles[0], profiles[1]


def v_map(eq, index: int, psi: npt.ArrayLike) -> float:
    """v_i = ln(1 + int b~ psi_i) with the unit-mass interaction weight of species i."""
    st = species_transform(eq, index)
    psi = _check_history(st, psi)
    argument = 1.0 + st.grid.integrate(st.interaction_normalized * psi)
    if argument <= 0.0:
        raise TransformError(f"v-map argument of species {index} is not positive: {argument}")
    return float(np.log(argument))


def P_functional(eq, index: int, psi: npt.ArrayLike) -> float:
    """P(psi) = int psi(-a) K(a) da / int a k~; zero on the admissible set."""
    st = species_transform(eq, index)
    psi = np.asarray(psi, dtype=float)
    return st.grid.step * float(np.dot(st.tail_weights, psi)) / st.p_denominator


def boundary_residual(eq, index: int, psi: npt.ArrayLike) -> float:
    """psi(0) - int k~ psi(-a)."""
    st = species_transform(eq, index)
    psi = np.asarray(psi, dtype=float)
    return float(psi[0] - np.dot(st.renewal_weights, psi))
