"""Areas of the explicit domains and their derivative in gamma."""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from pucci_eig.closed_form.domains import (
    HALF_PI,
    DomainSpec,
    OmegaGamma,
    Scaled,
    Sheared,
    Square,
    check_admissible,
)
from pucci_eig.errors import ParameterError, QuadratureError, UnsupportedError

AREA_TOL = 1e-10


def _breakpoints(scales, a: float, b: float):
    pts = sorted({float(t) for t in scales if a < t < b})
    return pts or None


def _quad(func, a: float, b: float, tol: float = AREA_TOL, points=None) -> float:
    value, err = integrate.quad(func, a, b, epsabs=tol, epsrel=1e-13, limit=400, points=points)
    if not err <= 10 * tol:
        raise QuadratureError("adaptive quadrature did not converge", err)
    return value


def area_omega_gamma(omega: float, gamma: float) -> float:
    """``pi^2 + 4 sqrt(omega) int_0^{pi/2} [asin(gamma cos x/sqrt w) + asin(cos x/(gamma sqrt w))] dx``."""
    check_admissible(omega, gamma)
    r = math.sqrt(omega)
    k1 = min(gamma / r, 1.0)
    k2 = min(1.0 / (gamma * r), 1.0)

    def integrand(x):
        c = math.cos(x)
        return math.asin(k1 * c) + math.asin(k2 * c)

    # for k close to 1 the integrand bends sharply within sqrt(1 - k^2) of x = 0
    pts = _breakpoints([math.sqrt(1 - k * k) for k in (k1, k2)], 0.0, HALF_PI)
    return math.pi**2 + 4.0 * r * _quad(integrand, 0.0, HALF_PI, points=pts)


def area(spec: DomainSpec) -> float:
    """Lebesgue measure of the domain."""
    if isinstance(spec, OmegaGamma):
        return area_omega_gamma(spec.omega, spec.gamma)
    if isinstance(spec, Sheared):
        return math.sqrt(math.pi**2 - spec.a**2) / math.pi * area_omega_gamma(spec.omega, spec.gamma)
    if isinstance(spec, Scaled):
        return spec.delta**2 * area(spec.base)
    if isinstance(spec, Square):
        return 4.0 * spec.halfside**2
    raise UnsupportedError(f"no area for {type(spec).__name__}")


def area_derivative_gamma(omega: float, gamma: float) -> float:
    """d|Omega(omega, gamma)|/d gamma for ``1/sqrt(omega) < gamma < sqrt(omega)``.

    At the endpoints one of the inner square roots vanishes at ``x = 0`` and
    the derivative is infinite, so they are rejected.
    """
    check_admissible(omega, gamma)
    r = math.sqrt(omega)
    if not (1.0 / r < gamma < r):
        raise ParameterError(
            f"derivative requires 1/sqrt(omega) < gamma < sqrt(omega), got gamma={gamma}, omega={omega}"
        )
    # substituting s = sin x turns cos x dx / sqrt(a - cos^2 x) into
    # ds / sqrt((a - 1) + s^2), whose peak at s = 0 has width sqrt(a - 1)
    b1 = omega / gamma**2 - 1.0
    b2 = omega * gamma**2 - 1.0

    def integrand(s):
        return 1.0 / math.sqrt(b1 + s * s) - 1.0 / math.sqrt(b2 + s * s)

    pts = _breakpoints([math.sqrt(b) for b in (b1, b2)], 0.0, 1.0)
    # at gamma == 1 the integrand vanishes identically and quad returns 0 exactly
    return 4.0 * r / gamma * _quad(integrand, 0.0, 1.0, points=pts)


def gamma_grid(omega: float, n: int) -> np.ndarray:
    """``n`` (odd) admissible gammas, log-symmetric about 1, endpoints included."""
    if n < 1 or n % 2 == 0:
        raise ParameterError(f"need an odd number of gamma values, got {n}")
    if omega == 1.0:
        return np.array([1.0])
    t = np.linspace(-1.0, 1.0, n)
    g = np.sqrt(omega) ** t
    g[n // 2] = 1.0
    g[0], g[-1] = 1.0 / math.sqrt(omega), math.sqrt(omega)
    return g
