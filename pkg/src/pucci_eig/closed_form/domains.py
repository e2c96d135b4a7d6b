"""
Boundary profiles and the explicit plane domains.

The base family is

    Omega(omega, gamma) = {(x, y) : |y| < phi(omega, gamma, x)},
    1/sqrt(omega) <= gamma <= sqrt(omega),

with the half-width profile

    phi(x) = pi/2 + sqrt(omega) * arcsin(gamma/sqrt(omega) * cos x)          |x| <= pi/2
    phi(x) = arccos(gamma*sqrt(omega) * sin((|x| - pi/2)/sqrt(omega)))       pi/2 < |x| <= x_max
    x_max  = pi/2 + sqrt(omega) * arcsin(1/(gamma*sqrt(omega)))

Sheared domains are images under the shear C_a, scaled domains are
dilations, and ``Square`` is the axis-aligned square used for the Laplacian
sanity case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from pucci_eig.errors import DomainError, ParameterError

HALF_PI = 0.5 * math.pi
# relative slack accepted on the admissible-gamma endpoints, so that
# gamma = 1/sqrt(omega) computed by the caller is not rejected on rounding
_ADMISSIBLE_RTOL = 1e-12


def split_point(point):
    """Return ``(x, y)`` from a pair of scalars/arrays or an ``(..., 2)`` array."""
    if isinstance(point, np.ndarray) and point.ndim >= 2:
        return point[..., 0], point[..., 1]
    x, y = point
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def gamma_range(omega: float) -> tuple[float, float]:
    r = math.sqrt(omega)
    return 1.0 / r, r


def check_admissible(omega: float, gamma: float) -> None:
    if not (np.isfinite(omega) and omega >= 1.0):
        raise ParameterError(f"omega must be finite and >= 1, got {omega}")
    lo, hi = gamma_range(omega)
    if not (lo * (1 - _ADMISSIBLE_RTOL) <= gamma <= hi * (1 + _ADMISSIBLE_RTOL)):
        raise ParameterError(
            f"gamma={gamma} outside admissible range [{lo:.17g}, {hi:.17g}] for omega={omega}"
        )


def _asin(t):
    return np.arcsin(np.clip(t, -1.0, 1.0))


def _acos(t):
    return np.arccos(np.clip(t, -1.0, 1.0))


def support_halfwidth(omega: float, gamma: float) -> float:
    """Right endpoint ``x_max`` of the profile's support."""
    r = math.sqrt(omega)
    return HALF_PI + r * float(_asin(1.0 / (gamma * r)))


def _phi_raw(omega: float, gamma: float, x):
    """Profile without range checks; NaN outside the support."""
    r = math.sqrt(omega)
    ax = np.abs(np.asarray(x, dtype=float))
    xmax = support_halfwidth(omega, gamma)
    with np.errstate(invalid="ignore"):
        inner = HALF_PI + r * _asin(gamma / r * np.cos(np.minimum(ax, HALF_PI)))
        outer = _acos(gamma * r * np.sin((np.maximum(ax, HALF_PI) - HALF_PI) / r))
    out = np.where(ax <= HALF_PI, inner, outer)
    out = np.where(ax >= xmax, 0.0, out)
    return np.where(ax > xmax * (1 + 1e-15), np.nan, out)


def phi(omega: float, gamma: float, x):
    """Half-width of ``Omega(omega, gamma)`` at abscissa ``x``.

    Raises
    ------
    ParameterError
        ``(omega, gamma)`` not admissible.
    DomainError
        ``|x|`` beyond the support endpoint.
    """
    check_admissible(omega, gamma)
    xmax = support_halfwidth(omega, gamma)
    ax = np.abs(np.asarray(x, dtype=float))
    if np.any(ax > xmax * (1 + 1e-12)) or not np.all(np.isfinite(ax)):
        raise DomainError(f"x outside the support |x| <= {xmax:.17g}")
    out = _phi_raw(omega, gamma, np.minimum(ax, xmax))
    return float(out) if out.ndim == 0 else out


def phi_inverse_identity_check(omega: float, gamma: float, samples: int = 1000) -> float:
    """Max over sampled ``x`` of ``|phi(omega, 1/gamma, phi(omega, gamma, x)) - |x||``."""
    check_admissible(omega, gamma)
    x = np.linspace(0.0, support_halfwidth(omega, gamma), samples)
    y = phi(omega, gamma, x)
    back = phi(omega, 1.0 / gamma, np.minimum(y, support_halfwidth(omega, 1.0 / gamma)))
    return float(np.max(np.abs(back - x)))


def shear_matrix(a: float) -> tuple[np.ndarray, np.ndarray]:
    """The shear ``C_a`` and its inverse; ``det C_a = sqrt(pi**2 - a**2)/pi``."""
    if not (np.isfinite(a) and abs(a) < math.pi):
        raise ParameterError(f"shear parameter must satisfy |a| < pi, got {a}")
    root = math.sqrt(math.pi**2 - a * a)
    c = np.array([[root / math.pi, 0.0], [a / math.pi, 1.0]])
    c_inv = np.array([[math.pi / root, 0.0], [-a / root, 1.0]])
    return c, c_inv


# --------------------------------------------------------------------------
# domain descriptors
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class OmegaGamma:
    omega: float
    gamma: float

    def __post_init__(self):
        check_admissible(self.omega, self.gamma)

    def contains(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        with np.errstate(invalid="ignore"):
            half = _phi_raw(self.omega, self.gamma, x)
            return np.abs(y) < np.nan_to_num(half, nan=-1.0)

    def contains_closure(self, x, y, tol: float = 1e-12):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        xmax = support_halfwidth(self.omega, self.gamma)
        half = _phi_raw(self.omega, self.gamma, np.clip(x, -xmax, xmax))
        return (np.abs(x) <= xmax + tol) & (np.abs(y) <= half + tol)

    def bbox(self) -> tuple[float, float, float, float]:
        xm = support_halfwidth(self.omega, self.gamma)
        ym = float(_phi_raw(self.omega, self.gamma, 0.0))
        return -xm, xm, -ym, ym

    def boundary(self, n: int) -> np.ndarray:
        """``4n`` points on the boundary, generated as ``(x, +-phi(x))``."""
        xm = support_halfwidth(self.omega, self.gamma)
        x = np.linspace(-xm, xm, 2 * n)
        y = _phi_raw(self.omega, self.gamma, x)
        return np.concatenate([np.stack([x, y], -1), np.stack([x, -y], -1)])


@dataclass(frozen=True)
class Sheared:
    omega: float
    gamma: float
    a: float

    def __post_init__(self):
        check_admissible(self.omega, self.gamma)
        shear_matrix(self.a)

    @property
    def base(self) -> OmegaGamma:
        return OmegaGamma(self.omega, self.gamma)

    def pull_back(self, x, y):
        _, c_inv = shear_matrix(self.a)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return c_inv[0, 0] * x, c_inv[1, 0] * x + y

    def push_forward(self, x, y):
        c, _ = shear_matrix(self.a)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return c[0, 0] * x, c[1, 0] * x + y

    def contains(self, x, y):
        return self.base.contains(*self.pull_back(x, y))

    def contains_closure(self, x, y, tol: float = 1e-12):
        return self.base.contains_closure(*self.pull_back(x, y), tol=tol)

    def bbox(self) -> tuple[float, float, float, float]:
        x0, x1, y0, y1 = self.base.bbox()
        cx, cy = self.push_forward(np.array([x0, x0, x1, x1]), np.array([y0, y1, y0, y1]))
        return float(cx.min()), float(cx.max()), float(cy.min()), float(cy.max())

    def boundary(self, n: int) -> np.ndarray:
        b = self.base.boundary(n)
        return np.stack(self.push_forward(b[:, 0], b[:, 1]), -1)


@dataclass(frozen=True)
class Square:
    halfside: float

    def __post_init__(self):
        if not (np.isfinite(self.halfside) and self.halfside > 0):
            raise ParameterError(f"halfside must be positive, got {self.halfside}")

    def contains(self, x, y):
        return (np.abs(x) < self.halfside) & (np.abs(y) < self.halfside)

    def contains_closure(self, x, y, tol: float = 1e-12):
        s = self.halfside + tol
        return (np.abs(x) <= s) & (np.abs(y) <= s)

    def bbox(self) -> tuple[float, float, float, float]:
        s = self.halfside
        return -s, s, -s, s

    def boundary(self, n: int) -> np.ndarray:
        s = self.halfside
        t = np.linspace(-s, s, n)
        one = np.full_like(t, s)
        return np.concatenate(
            [np.stack(p, -1) for p in ((t, one), (t, -one), (one, t), (-one, t))]
        )


@dataclass(frozen=True)
class Scaled:
    base: "DomainSpec"
    delta: float

    def __post_init__(self):
        if not (np.isfinite(self.delta) and self.delta > 0):
            raise ParameterError(f"scale factor must be positive, got {self.delta}")

    @property
    def omega(self):
        return getattr(self.base, "omega", None)

    def contains(self, x, y):
        return self.base.contains(np.asarray(x) / self.delta, np.asarray(y) / self.delta)

    def contains_closure(self, x, y, tol: float = 1e-12):
        d = self.delta
        return self.base.contains_closure(np.asarray(x) / d, np.asarray(y) / d, tol=tol / d)

    def bbox(self) -> tuple[float, float, float, float]:
        return tuple(self.delta * v for v in self.base.bbox())

    def boundary(self, n: int) -> np.ndarray:
        return self.delta * self.base.boundary(n)


DomainSpec = Union[OmegaGamma, Sheared, Square, Scaled]


def contains(spec: DomainSpec, point):
    """Strict interior membership; broadcasts over arrays of points."""
    x, y = split_point(point)
    out = spec.contains(x, y)
    return bool(out) if np.ndim(out) == 0 else out


def domain_omega(spec: DomainSpec) -> float | None:
    """The ellipticity ratio a closed-form domain was built for, if any."""
    if isinstance(spec, Scaled):
        return domain_omega(spec.base)
    return getattr(spec, "omega", None)
