"""
Change of variables x -> (eta, psi), its inverse, and the lumped-output estimate.
"""

from .eigenfunctions import (
    AdjointEigenfunction,
    SpeciesTransform,
    TransformCache,
    adjoint_eigenfunction,
    species_transform,
)
from .mapping import (
    P_functional,
    TransformedState,
    boundary_residual,
    forward_transform,
    pi_functional,
    reconstruct,
    v_map,
)
from .output_feedback import measure_output, output_feedback_pi, output_mismatch, total_population_kernel

__all__ = [
    'AdjointEigenfunction', 'SpeciesTransform', 'TransformCache', 'TransformedState',
    'P_functional', 'adjoint_eigenfunction', 'boundary_residual', 'forward_transform',
    'measure_output', 'output_feedback_pi', 'output_mismatch', 'pi_functional', 'reconstruct',
    'species_transform', 'total_population_kernel', 'v_map',
]
