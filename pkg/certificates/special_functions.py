"""
Scalar special functions used by the Lyapunov certificate.

- lambert_w0: principal branch of the Lambert W function (real argument).
- f_param, B_bound: the gain function f(y; r, beta) and its global bound.
- h_integral: h(p) = int_0^p (e^z - 1)/z dz.
"""

import math

import numpy as np
from scipy.integrate import quad

INV_E = math.exp(-1.0)


def lambert_w0(x: float) -> float:
    """Principal branch W0(x) for real x >= -1/e.

    Halley iteration started from the branch-point series near -1/e and from
    ln x - ln ln x for large arguments.
    """
    x = float(x)
    if not np.isfinite(x):
        raise ValueError(f"lambert_w0 needs a finite argument, got {x}")
    if x < -INV_E:
        if x < -INV_E * (1.0 + 4 * np.finfo(float).eps):
            raise ValueError(f"lambert_w0 is undefined below -1/e, got {x}")
        x = -INV_E
    if x == 0.0:
        return 0.0

    if x <= 1.5 - INV_E:
        w = math.sqrt(max(0.0, 2.0 * (math.e * x + 1.0))) - 1.0
    else:
        log_x = math.log(x)
        w = log_x - math.log(log_x)

    for _ in range(100):
        ew = math.exp(w)
        residual = w * ew - x
        w1 = w + 1.0 if w != -1.0 else w
        denominator = ew * w1 - (w + 2.0) * residual / (2.0 * w1)
        if denominator == 0.0:
            break
        dw = residual / denominator
        w -= dw
        if abs(dw) < 0.7e-16 * (2.0 + abs(w)):
            break
    return w


def f_param(y: float, r: float, beta: float) -> float:
    """f(y; r, beta) = r (e^{ry} - 1) / (e^{ry} - ry - 1 + 1/beta)."""
    if r == 0:
        raise ValueError("f_param needs r != 0")
    if not beta > 0:
        raise ValueError(f"f_param needs beta > 0, got {beta}")
    q = r * y
    if q > 0:
        # divide through by e^q so large q stays finite
        decay = math.exp(-q)
        return r * (1.0 - decay) / (1.0 - (q + 1.0 - 1.0 / beta) * decay)
    return r * math.expm1(q) / (math.expm1(q) - q + 1.0 / beta)


def B_bound(beta: float) -> float:
    """sup_y |f(y; r, beta)| / |r|, reached at y = (1 + 1/beta + d) / r."""
    if not beta > 0:
        raise ValueError(f"B_bound needs beta > 0, got {beta}")
    inv_beta = 1.0 / beta
    d = lambert_w0(-math.exp(-1.0 - inv_beta))
    exponent = 1.0 + inv_beta + d
    if exponent > 700.0:
        return 1.0 + (1.0 + d) * math.exp(-exponent)
    return 1.0 + (1.0 + d) / (math.exp(exponent) - d - 2.0)


def h_integral(p: float) -> float:
    """h(p) = sum_{n>=1} p^n / (n n!), truncated once terms fall below 1e-17 of the sum."""
    if p < 0:
        raise ValueError(f"h_integral needs p >= 0, got {p}")
    if p == 0:
        return 0.0
    if p > 700.0:
        return math.inf
    terms = []
    running = 0.0
    power_over_factorial = 1.0
    n = 1
    while True:
        power_over_factorial *= p / n
        term = power_over_factorial / n
        terms.append(term)
        running += term
        if n > p and term < 1e-17 * running:
            break
        n += 1
    return math.fsum(terms)


def h_quadrature(p: float) -> float:
    """h(p) by adaptive Gauss-Kronrod quadrature; reference for h_integral."""
    if p < 0:
        raise ValueError(f"h_quadrature needs p >= 0, got {p}")
    value, _ = quad(lambda z: math.expm1(z) / z if z != 0.0 else 1.0, 0.0, p,
                    epsabs=0.0, epsrel=1e-13, limit=200)
    return value
