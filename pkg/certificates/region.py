"""
Region-of-attraction estimate on the psi = 0 slice of the eta plane.

V3 is convex, so the largest V3 sublevel set inside a region that contains
the origin is set by the minimum of V3 over that region's boundary. The
boundary is assembled from the cap lines eta_1 = H1 and eta_2 = H2 (where
u > 0), the u = 0 contour traced by marching squares, and the edges of the
scan box.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from skimage import measure

import config
from certificates.weights import CertificateData, build_certificate
from feedback.backstepping import GainSet, V3_eta, control_law_eta
from model.errors import CertificateError

logger = logging.getLogger(__name__)

DEFAULT_BOX = (-4.0, 4.0)
DEFAULT_RESOLUTION = 600
DEFAULT_BOUNDARY_SAMPLES = 2000


@dataclass(frozen=True)
class EtaPlaneScan:
    """Row-major grids: index [i, j] is (eta_1 = axis[j], eta_2 = axis[i])."""
    axis: np.ndarray
    V3: np.ndarray
    u: np.ndarray
    in_D: np.ndarray

    @property
    def step(self) -> float:
        return float(self.axis[1] - self.axis[0])


@dataclass(frozen=True)
class RoaEstimate:
    c_star: float
    c0_star: float
    scan: EtaPlaneScan
    contours: List[np.ndarray]
    contour_closed: bool


def _scan_rows(axis: np.ndarray, rows: np.ndarray, eq, gains: GainSet, cert: CertificateData):
    eta_1, eta_2 = np.meshgrid(axis, axis[rows])
    u = control_law_eta(eta_1, eta_2, eq, gains)
    v3 = V3_eta(eta_1, eta_2, gains)
    inside = (eta_1 <= cert.H1) & (eta_2 <= cert.H2) & (u > 0.0)
    return v3, u, inside


def scan_eta_plane(eq, gains: GainSet, cert: CertificateData,
                   box: Tuple[float, float] = DEFAULT_BOX,
                   resolution: int = DEFAULT_RESOLUTION,
                   threads: Optional[int] = None) -> EtaPlaneScan:
    """Evaluate V3, u and D membership on a resolution x resolution grid.

    Row blocks are evaluated concurrently and reassembled in row order.
    """
    if resolution < 3:
        raise ValueError(f"resolution must be at least 3, got {resolution}")
    axis = np.linspace(box[0], box[1], resolution)
    workers = max(1, min(threads or config.get_settings().worker_count, resolution))
    blocks = np.array_split(np.arange(resolution), workers)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda rows: _scan_rows(axis, rows, eq, gains, cert), blocks))

    return EtaPlaneScan(
        axis=axis,
        V3=np.vstack([r[0] for r in results]),
        u=np.vstack([r[1] for r in results]),
        in_D=np.vstack([r[2] for r in results]),
    )


def u_zero_contour(scan: EtaPlaneScan) -> List[np.ndarray]:
    """u = 0 level set as (n, 2) arrays of (eta_1, eta_2) points."""
    lo, step = float(scan.axis[0]), scan.step
    lines = []
    for path in measure.find_contours(scan.u, 0.0):
        # find_contours returns (row, col) = (eta_2 index, eta_1 index)
        lines.append(np.column_stack([lo + step * path[:, 1], lo + step * path[:, 0]]))
    return lines


def contour_closes_in_box(lines: List[np.ndarray], box: Tuple[float, float], step: float) -> bool:
    """Every piece is a loop or ends on the box boundary, so with the box it bounds a region."""
    tolerance = 1e-6 * step
    lo, hi = box

    def on_edge(point: np.ndarray) -> bool:
        return bool(np.any(np.abs(point - lo) <= tolerance) or np.any(np.abs(point - hi) <= tolerance))

    if not lines:
        return False
    for line in lines:
        closed = np.allclose(line[0], line[-1], atol=tolerance)
        if not closed and not (on_edge(line[0]) and on_edge(line[-1])):
            return False
    return True


def _line_minimum(eq, gains: GainSet, fixed: str, value: float, lo: float, hi: float,
                  samples: int) -> float:
    """min V3 along a segment where u > 0, sampled then polished."""
    s = np.linspace(lo, hi, samples)
    if fixed == "eta_1":
        eta_1, eta_2 = np.full_like(s, value), s
    else:
        eta_1, eta_2 = s, np.full_like(s, value)
    u = control_law_eta(eta_1, eta_2, eq, gains)
    v3 = V3_eta(eta_1, eta_2, gains)
    admissible = u > 0.0
    if not np.any(admissible):
        return np.inf
    v3 = np.where(admissible, v3, np.inf)
    k = int(np.argmin(v3))
    best = float(v3[k])

    left, right = s[max(k - 1, 0)], s[min(k + 1, samples - 1)]
    if right > left:
        if fixed == "eta_1":
            along = lambda t: float(V3_eta(value, t, gains))
            positive = lambda t: control_law_eta(value, t, eq, gains) > 0.0
        else:
            along = lambda t: float(V3_eta(t, value, gains))
            positive = lambda t: control_law_eta(t, value, eq, gains) > 0.0
        result = minimize_scalar(along, bounds=(left, right), method="bounded",
                                 options={"xatol": 1e-12 * max(1.0, abs(right - left))})
        if result.fun < best and positive(result.x):
            best = float(result.fun)
    return best


def _contour_minimum(lines: List[np.ndarray], gains: GainSet, caps: Optional[Tuple[float, float]]) -> float:
    best = np.inf
    for line in lines:
        points = line
        if caps is not None:
            points = line[(line[:, 0] <= caps[0]) & (line[:, 1] <= caps[1])]
        if points.size:
            best = min(best, float(np.min(V3_eta(points[:, 0], points[:, 1], gains))))
    return best


def roa_level(cert: CertificateData, eq, gains: GainSet,
              box: Tuple[float, float] = DEFAULT_BOX,
              resolution: int = DEFAULT_RESOLUTION,
              boundary_samples: int = DEFAULT_BOUNDARY_SAMPLES,
              threads: Optional[int] = None) -> Tuple[float, float]:
    """(c_star, c0_star) for the psi = 0 slice."""
    estimate = estimate_roa(cert, eq, gains, box, resolution, boundary_samples, threads)
    return estimate.c_star, estimate.c0_star


def estimate_roa(cert: CertificateData, eq, gains: GainSet,
                 box: Tuple[float, float] = DEFAULT_BOX,
                 resolution: int = DEFAULT_RESOLUTION,
                 boundary_samples: int = DEFAULT_BOUNDARY_SAMPLES,
                 threads: Optional[int] = None) -> RoaEstimate:
    lo, hi = box
    if not (lo < 0.0 < hi):
        raise ValueError(f"scan box {box} must contain the origin")
    if not (cert.H1 > 0 and cert.H2 > 0 and eq.u_star > 0):
        raise CertificateError("empty D slice: the origin is not inside the constraint set")

    scan = scan_eta_plane(eq, gains, cert, box, resolution, threads)
    contours = u_zero_contour(scan)
    closed = contour_closes_in_box(contours, box, scan.step)
    if not closed:
        logger.warning("u = 0 contour does not close against the scan box")

    h1, h2 = min(cert.H1, hi), min(cert.H2, hi)
    n = boundary_samples

    # boundary of the D slice
    d_candidates = [
        _line_minimum(eq, gains, "eta_1", h1, lo, h2, n),
        _line_minimum(eq, gains, "eta_2", h2, lo, h1, n),
        _line_minimum(eq, gains, "eta_1", lo, lo, h2, n),
        _line_minimum(eq, gains, "eta_2", lo, lo, h1, n),
        _contour_minimum(contours, gains, (cert.H1, cert.H2)),
    ]
    # boundary of D0 inside the box
    d0_candidates = [
        _line_minimum(eq, gains, "eta_1", lo, lo, hi, n),
        _line_minimum(eq, gains, "eta_1", hi, lo, hi, n),
        _line_minimum(eq, gains, "eta_2", lo, lo, hi, n),
        _line_minimum(eq, gains, "eta_2", hi, lo, hi, n),
        _contour_minimum(contours, gains, None),
    ]
    v3_min = min(d_candidates)
    v3_min_0 = min(d0_candidates)
    if not np.isfinite(v3_min):
        raise CertificateError("empty D slice: no admissible boundary points")

    c_star = float(np.log1p(v3_min))
    logger.info("ROA: c_star=%.10g c0_star=%.10g (resolution %d)", c_star, v3_min_0, resolution)
    return RoaEstimate(c_star=c_star, c0_star=float(v3_min_0), scan=scan, contours=contours,
                       contour_closed=closed)


def refinement_study(cert: CertificateData, eq, gains: GainSet,
                     box: Tuple[float, float] = DEFAULT_BOX,
                     resolution: int = DEFAULT_RESOLUTION,
                     boundary_samples: int = DEFAULT_BOUNDARY_SAMPLES,
                     threads: Optional[int] = None) -> Tuple[float, float, float]:
    """c_star at the given and at twice the sampling, plus the relative change."""
    base = estimate_roa(cert, eq, gains, box, resolution, boundary_samples, threads).c_star
    fine = estimate_roa(cert, eq, gains, box, 2 * resolution, 2 * boundary_samples, threads).c_star
    return base, fine, abs(fine - base) / base


def decay_rate_estimate(gains: GainSet, sigma_1: float, sigma_2: float, lambda_2: float,
                        epsilon: float) -> float:
    """Guaranteed exponential rate: min of sigma_i and -lambda_2 Re(p) over the gain polynomial roots."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    roots = np.roots([1.0, gains.c1 + gains.c2, gains.theta + gains.c1 * gains.c2])
    rates = [sigma_1, sigma_2] + [-lambda_2 * float(np.real(p)) for p in roots]
    return min(rates) / (1.0 + epsilon)


def certify(eq, gains: GainSet, sigma_1: Optional[float] = None, sigma_2: Optional[float] = None,
            gamma_slack: float = 1.05, **roa_options) -> Tuple[CertificateData, RoaEstimate]:
    """Build the certificate and fill in its ROA levels."""
    cert = build_certificate(eq, gains, sigma_1, sigma_2, gamma_slack)
    estimate = estimate_roa(cert, eq, gains, **roa_options)
    return cert.with_levels(estimate.c_star, estimate.c0_star), estimate
