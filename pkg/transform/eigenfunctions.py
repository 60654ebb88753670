"""
Adjoint eigenfunctions and the per-species data of the (eta, psi) transform.

The adjoint eigenfunction is sampled as the exact adjoint of the trapezoid
renewal rule used by both simulators:

    Q_m   = sum_{j > m} w_j k~_j            (tail of the normalised birth kernel)
    pi0_m = Q_m / x~_m

and it is paired with profiles by the left-endpoint rule h * sum_{m < N}.
With this pairing Pi[x*] = 1 and P(psi) = 0 hold to rounding for transformed
states, and P is conserved exactly by the discrete renewal recursion.
"""

import logging
import threading
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from model.grid import AgeGrid, AgeProfile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdjointEigenfunction:
    """pi0 on the age grid; vanishes at a = A."""
    values: AgeProfile
    step: float

    def pair(self, x: AgeProfile) -> float:
        """Left-endpoint pairing h * sum_m pi0_m x_m (pi0_N = 0)."""
        return self.step * float(np.dot(self.values[:-1], x[:-1]))


@dataclass(frozen=True)
class SpeciesTransform:
    """Everything the transform and the IDE need for one species."""
    index: int
    grid: AgeGrid
    x_star: AgeProfile = field(repr=False)
    survival: AgeProfile = field(repr=False)
    birth_normalized: AgeProfile = field(repr=False)          # k~ = k x~
    renewal_weights: AgeProfile = field(repr=False)           # w_j k~_j
    tail_weights: AgeProfile = field(repr=False)              # Q_m
    interaction_normalized: AgeProfile = field(repr=False)    # b_j x_i* / lambda_i, unit integral
    eigenfunction: AdjointEigenfunction = field(repr=False)
    pi_denominator: float = 0.0                               # int a k x*
    p_denominator: float = 0.0                                # int a k~

    @property
    def renewal_gain(self) -> float:
        """1 / (1 - w_0 k~_0); the a = 0 node of the trapezoid renewal rule."""
        denominator = 1.0 - self.renewal_weights[0]
        if denominator <= 0.0:
            raise ValueError(
                f"grid too coarse for the birth kernel of species {self.index}: 1 - w0*k(0) = {denominator}"
            )
        return 1.0 / denominator


def _tail_sums(weights: AgeProfile) -> AgeProfile:
    inclusive = np.cumsum(weights[::-1])[::-1]
    return inclusive - weights


def build_species_transform(eq, index: int) -> SpeciesTransform:
    grid = eq.grid
    species = eq.species(index)
    other = eq.species(2 if index == 1 else 1)
    survival = eq.survival(index)
    x_star = eq.profile(index)

    birth_normalized = species.birth * survival
    renewal_weights = grid.weights * birth_normalized
    tail_weights = _tail_sums(renewal_weights)
    eigenfunction = AdjointEigenfunction(values=tail_weights / survival, step=grid.step)

    # v_i uses the other species' interaction kernel weighted by x_i*:
    # b_2 x_1* / lambda_1 for species 1 and b_1 x_2* / lambda_2 for species 2.
    interaction_normalized = other.interaction * x_star / eq.lam(index)

    return SpeciesTransform(
        index=index,
        grid=grid,
        x_star=x_star,
        survival=survival,
        birth_normalized=birth_normalized,
        renewal_weights=renewal_weights,
        tail_weights=tail_weights,
        interaction_normalized=interaction_normalized,
        eigenfunction=eigenfunction,
        pi_denominator=grid.integrate(grid.ages * species.birth * x_star),
        p_denominator=grid.integrate(grid.ages * birth_normalized),
    )


class TransformCache:
    """Per-equilibrium species transforms, built once and shared between threads."""

    _instances: Dict[str, Tuple[SpeciesTransform, SpeciesTransform]] = {}
    _lock = threading.Lock()

    @classmethod
    def get(cls, eq) -> Tuple[SpeciesTransform, SpeciesTransform]:
        key = f"{eq.fingerprint}_{eq.zeta_1!r}_{eq.zeta_2!r}"
        with cls._lock:
            if key not in cls._instances:
                cls._instances[key] = (build_species_transform(eq, 1), build_species_transform(eq, 2))
                logger.debug("Built species transforms for %s", key[:12])
            return cls._instances[key]

    @classmethod
    def clear(cls) -> None:
        with cls._lock:
            cls._instances.clear()


def species_transform(eq, index: int) -> SpeciesTransform:
    if index not in (1, 2):
        raise ValueError(f"species index must be 1 or 2, got {index}")
    return TransformCache.get(eq)[index - 1]


def adjoint_eigenfunction(eq, index: int) -> AdjointEigenfunction:
    """Adjoint eigenfunction of species `index` for the zero eigenvalue."""
    return species_transform(eq, index).eigenfunction
