"""
Closed-form principal eigenfunctions on the explicit domains.

On ``Omega(omega, gamma)`` the eigenfunction is additively separable,
``u(x, y) = gamma * g(x) + g(y)``, where ``g`` is the one-dimensional profile

    g(t) = cos t                                     |t| <= pi/2
    g(t) = -sqrt(omega) * sin((|t| - pi/2)/sqrt(omega))   |t| > pi/2

(``-sin(s)`` is ``cos(s + pi/2)``, matching the three branch formulas).  The
Hessian is therefore diagonal, and ``-M+(D^2 u) = lam * u`` branch by branch.
Sheared and scaled domains pull points back to the base domain.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from pucci_eig.closed_form.domains import (
    HALF_PI,
    DomainSpec,
    OmegaGamma,
    Scaled,
    Sheared,
    domain_omega,
    shear_matrix,
    split_point,
)
from pucci_eig.errors import DomainError, ParameterError, UnsupportedError
from pucci_eig.pucci_core import EllipticityPair, Sym2, pucci_plus


class RegionTag(enum.Enum):
    CENTRAL_SQUARE = "central"
    EAST_WEST = "east_west"
    NORTH_SOUTH = "north_south"
    CORNER = "corner"
    OUTSIDE = "outside"


def profile(t, omega: float):
    """One-dimensional profile ``g``; C^2 across ``|t| = pi/2``."""
    r = math.sqrt(omega)
    at = np.abs(np.asarray(t, dtype=float))
    return np.where(at <= HALF_PI, np.cos(t), -r * np.sin((at - HALF_PI) / r))


def profile_d1(t, omega: float):
    r = math.sqrt(omega)
    t = np.asarray(t, dtype=float)
    at = np.abs(t)
    return np.where(at <= HALF_PI, -np.sin(t), -np.sign(t) * np.cos((at - HALF_PI) / r))


def profile_d2(t, omega: float):
    r = math.sqrt(omega)
    at = np.abs(np.asarray(t, dtype=float))
    return np.where(at <= HALF_PI, -np.cos(t), np.sin((at - HALF_PI) / r) / r)


def classify(x, y):
    """Branch tag from the position relative to the lines ``|x|, |y| = pi/2``.

    Points on an interface belong to the central branch.
    """
    ox = np.abs(x) > HALF_PI
    oy = np.abs(y) > HALF_PI
    tags = np.select(
        [ox & oy, ox, oy],
        [RegionTag.CORNER.value, RegionTag.EAST_WEST.value, RegionTag.NORTH_SOUTH.value],
        RegionTag.CENTRAL_SQUARE.value,
    )
    return tags


def _tags_to_enum(tags):
    if np.ndim(tags) == 0:
        return RegionTag(str(tags))
    return np.vectorize(RegionTag, otypes=[object])(tags)


@dataclass(frozen=True)
class PiecewiseEigenfunction:
    """Closed-form eigenfunction of a domain built from ``Omega(omega, gamma)``.

    ``normalization`` multiplies every returned value, gradient and Hessian.
    """

    spec: DomainSpec
    ell: EllipticityPair
    normalization: float = 1.0

    def __post_init__(self):
        base, _, _ = _unwrap(self.spec)
        if not math.isclose(base.omega, self.ell.omega(), rel_tol=1e-12):
            raise ParameterError(
                f"domain built for omega={base.omega} but ellipticity ratio is {self.ell.omega()}"
            )
        if not self.normalization > 0:
            raise ParameterError("normalization must be positive")

    @property
    def base(self) -> OmegaGamma:
        return _unwrap(self.spec)[0]

    @property
    def eigenvalue(self) -> float:
        """``lam`` on the base domain, divided by ``delta**2`` for dilations.

        For sheared domains this is the supersolution level
        ``lam * pi**2 / (pi**2 - a**2)``, exact only when ``omega == 1`` or ``a == 0``.
        """
        _, a, delta = _unwrap(self.spec)
        return self.ell.lam * math.pi**2 / (math.pi**2 - a * a) / delta**2

    def pull_back(self, point):
        """Map points of ``spec`` to coordinates ``(X, Y)`` on the base domain."""
        x, y = split_point(point)
        spec, scale = self.spec, 1.0
        while isinstance(spec, Scaled):
            scale *= spec.delta
            spec = spec.base
        x, y = np.asarray(x, dtype=float) / scale, np.asarray(y, dtype=float) / scale
        if isinstance(spec, Sheared):
            x, y = spec.pull_back(x, y)
        return x, y

    def _check_closure(self, X, Y):
        if not np.all(self.base.contains_closure(X, Y, tol=1e-9)):
            raise DomainError("point outside the closure of the domain")

    def region(self, point):
        X, Y = self.pull_back(point)
        tags = np.where(self.base.contains_closure(X, Y, tol=1e-9), classify(X, Y),
                        RegionTag.OUTSIDE.value)
        return _tags_to_enum(tags)

    def value(self, point):
        X, Y = self.pull_back(point)
        self._check_closure(X, Y)
        w = self.base.omega
        out = self.normalization * (self.base.gamma * profile(X, w) + profile(Y, w))
        return float(out) if out.ndim == 0 else out

    def gradient(self, point):
        """Gradient as an array ``(..., 2)``."""
        X, Y = self.pull_back(point)
        self._check_closure(X, Y)
        w = self.base.omega
        gx = self.base.gamma * profile_d1(X, w)
        gy = profile_d1(Y, w)
        _, a, delta = _unwrap(self.spec)
        _, c_inv = shear_matrix(a)
        # chain rule: grad u_a = C^{-T} grad u
        dx = c_inv[0, 0] * gx + c_inv[1, 0] * gy
        dy = gy
        return self.normalization / delta * np.stack([dx, dy], -1)

    def base_hessian(self, point) -> Sym2:
        """Diagonal Hessian of the base eigenfunction at the pulled-back points."""
        X, Y = self.pull_back(point)
        w = self.base.omega
        return Sym2.diag(self.base.gamma * profile_d2(X, w), profile_d2(Y, w))

    def hessian(self, point) -> Sym2:
        X, Y = self.pull_back(point)
        self._check_closure(X, Y)
        h = self.base_hessian(point)
        _, a, delta = _unwrap(self.spec)
        _, c_inv = shear_matrix(a)
        return h.congruence(c_inv) * (self.normalization / delta**2)


def _unwrap(spec: DomainSpec) -> tuple[OmegaGamma, float, float]:
    """Return ``(base, a, delta)`` for specs with a closed-form eigenfunction."""
    delta = 1.0
    while isinstance(spec, Scaled):
        delta *= spec.delta
        spec = spec.base
    if isinstance(spec, OmegaGamma):
        return spec, 0.0, delta
    if isinstance(spec, Sheared):
        return spec.base, spec.a, delta
    raise UnsupportedError(f"no closed-form eigenfunction for {type(spec).__name__}")


def eigenfunction_value(f: PiecewiseEigenfunction, point):
    return f.value(point)


def eigenfunction_hessian(f: PiecewiseEigenfunction, point) -> Sym2:
    return f.hessian(point)


def region(f: PiecewiseEigenfunction, point):
    return f.region(point)


def residual(f: PiecewiseEigenfunction, mu: float, point):
    """``M+(D^2 u) + mu * u``; zero for an eigenpair, ``<= 0`` for a supersolution."""
    out = pucci_plus(f.hessian(point), f.ell) + mu * np.asarray(f.value(point))
    return float(out) if np.ndim(out) == 0 else out


def separable_candidate_residual(ell: EllipticityPair, x):
    """Defect ``-M+(D^2 u) - lam*u`` of ``u = cos(x/sqrt2) cos(y/sqrt2)`` on the diagonal.

    The separable candidate is the Laplace eigenfunction of the square
    ``(-pi/sqrt2, pi/sqrt2)^2``.  In the band ``pi/(2 sqrt2) <= |x| < pi/sqrt2``
    its Hessian at ``(x, x)`` is ``0.5*[[-c^2, s^2], [s^2, -c^2]]`` with
    ``c = cos(x/sqrt2)``, ``s = sin(x/sqrt2)``; the defect is evaluated with
    :func:`pucci_plus` and equals ``(Lam - lam) * (c**2 - 1/2)``.
    """
    x = np.asarray(x, dtype=float)
    lo, hi = math.pi / (2 * math.sqrt(2)), math.pi / math.sqrt(2)
    ax = np.abs(x)
    if np.any(ax < lo * (1 - 1e-15)) or np.any(ax >= hi):
        raise DomainError(f"x must satisfy {lo:.17g} <= |x| < {hi:.17g}")
    c = np.cos(x / math.sqrt(2))
    s = np.sin(x / math.sqrt(2))
    hess = Sym2(-0.5 * c * c, 0.5 * s * s, -0.5 * c * c)
    out = -np.asarray(pucci_plus(hess, ell)) - ell.lam * c * c
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CornerReport:
    omega: float
    distances: np.ndarray
    ratios: np.ndarray  # min over approach rays at each distance
    min_ratio: float
    max_ratio: float
    stability: float  # |ratio(1e-4)/ratio(1e-3) - 1|


def corner_asymptotics_check(ell: EllipticityPair, samples: int = 16) -> CornerReport:
    """Ratio of ``u`` on ``Omega(omega, sqrt(omega))`` to the cone solution near the corners.

    The corners sit at ``(0, +-(1 + sqrt(omega)) pi/2)``; the cone solution is
    evaluated at ``(x, corner - |y|)``.  Points approach along the axis and
    along two rays inside the cone.
    """
    omega = ell.omega()
    r = math.sqrt(omega)
    f = PiecewiseEigenfunction(OmegaGamma(omega, r), ell)
    top = (1.0 + r) * HALF_PI
    d = np.unique(np.concatenate([np.geomspace(1e-1, 1e-4, samples), [1e-3, 1e-4]]))[::-1]
    rays = np.array([0.0, 0.5, -0.5])
    dd, tt = np.meshgrid(d, rays, indexing="ij")
    x = tt * dd / r
    ratios = []
    for sign in (1.0, -1.0):
        y = sign * (top - dd)
        u = f.value((x, y))
        cone = (top - np.abs(y)) ** 2 - omega * x**2
        ratios.append(u / cone)
    per_d = np.min(np.minimum(*ratios), axis=1)
    r3 = per_d[np.argmin(np.abs(d - 1e-3))]
    r4 = per_d[np.argmin(np.abs(d - 1e-4))]
    return CornerReport(
        omega=omega,
        distances=d,
        ratios=per_d,
        min_ratio=float(per_d.min()),
        max_ratio=float(per_d.max()),
        stability=float(abs(r4 / r3 - 1.0)),
    )
