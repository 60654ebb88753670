"""
Lyapunov certificate: special functions, decay weights, functionals, ROA levels.
"""

from .assumption import AssumptionCheck, kappa_objective, verify_psi_decay, weighted_residual
from .functionals import G_functional, V_total, dissipation_bound, dissipation_margin, in_D
from .region import (
    EtaPlaneScan,
    RoaEstimate,
    certify,
    contour_closes_in_box,
    decay_rate_estimate,
    estimate_roa,
    refinement_study,
    roa_level,
    scan_eta_plane,
    u_zero_contour,
)
from .special_functions import B_bound, f_param, h_integral, h_quadrature, lambert_w0
from .weights import CertificateData, build_certificate, gamma_lower_bounds

__all__ = [
    'AssumptionCheck', 'B_bound', 'CertificateData', 'EtaPlaneScan', 'G_functional', 'RoaEstimate',
    'V_total', 'build_certificate', 'certify', 'contour_closes_in_box', 'decay_rate_estimate',
    'dissipation_bound', 'dissipation_margin', 'estimate_roa', 'f_param', 'gamma_lower_bounds',
    'h_integral', 'h_quadrature', 'in_D', 'kappa_objective', 'lambert_w0', 'refinement_study',
    'roa_level', 'scan_eta_plane', 'u_zero_contour', 'verify_psi_decay', 'weighted_residual',
]
