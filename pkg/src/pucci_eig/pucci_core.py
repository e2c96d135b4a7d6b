"""
Pucci extremal operators on symmetric 2x2 matrices.

For X symmetric with eigenvalues e_1, e_2 and ellipticity constants
0 < lam <= Lam,

    M+(X) = lam * sum_{e_i < 0} e_i + Lam * sum_{e_i > 0} e_i
    M-(X) = Lam * sum_{e_i < 0} e_i + lam * sum_{e_i > 0} e_i

Every function accepts scalars or numpy arrays in the matrix entries and
broadcasts elementwise, so a whole batch of Hessians is a single ``Sym2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pucci_eig.errors import InvalidInputError, ParameterError

__all__ = [
    "EllipticityPair",
    "Sym2",
    "eigenvalues",
    "pucci_plus",
    "pucci_minus",
    "cone_solution",
    "cone_hessian",
]


@dataclass(frozen=True)
class EllipticityPair:
    """Ellipticity constants ``0 < lam <= Lam``."""

    lam: float
    Lam: float

    def __post_init__(self):
        lam, Lam = float(self.lam), float(self.Lam)
        if not (np.isfinite(lam) and np.isfinite(Lam)):
            raise InvalidInputError(f"non-finite ellipticity constants ({lam}, {Lam})")
        if not 0.0 < lam <= Lam:
            raise ParameterError(f"need 0 < lambda <= Lambda, got ({lam}, {Lam})")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "Lam", Lam)

    @classmethod
    def from_omega(cls, omega: float, lam: float = 1.0) -> "EllipticityPair":
        return cls(lam, omega * lam)

    def omega(self) -> float:
        return self.Lam / self.lam


@dataclass(frozen=True)
class Sym2:
    """Symmetric 2x2 matrix [[xx, xy], [xy, yy]]; entries may be arrays."""

    xx: float | np.ndarray
    xy: float | np.ndarray
    yy: float | np.ndarray

    @classmethod
    def diag(cls, a, b) -> "Sym2":
        shape = np.broadcast(np.asarray(a), np.asarray(b)).shape
        return cls(a, np.zeros(shape) if shape else 0.0, b)

    @classmethod
    def from_matrix(cls, m) -> "Sym2":
        m = np.asarray(m, dtype=float)
        return cls(m[..., 0, 0], 0.5 * (m[..., 0, 1] + m[..., 1, 0]), m[..., 1, 1])

    def as_matrix(self) -> np.ndarray:
        xx, xy, yy = np.broadcast_arrays(*map(np.asarray, (self.xx, self.xy, self.yy)))
        return np.stack([np.stack([xx, xy], -1), np.stack([xy, yy], -1)], -2)

    @property
    def trace(self):
        return self.xx + self.yy

    @property
    def det(self):
        return self.xx * self.yy - self.xy * self.xy

    def scale(self) -> np.ndarray:
        return np.maximum.reduce([np.abs(self.xx), np.abs(self.xy), np.abs(self.yy)])

    def __neg__(self) -> "Sym2":
        return Sym2(-self.xx, -self.xy, -self.yy)

    def __add__(self, other: "Sym2") -> "Sym2":
        return Sym2(self.xx + other.xx, self.xy + other.xy, self.yy + other.yy)

    def __sub__(self, other: "Sym2") -> "Sym2":
        return self + (-other)

    def __mul__(self, t) -> "Sym2":
        return Sym2(t * self.xx, t * self.xy, t * self.yy)

    __rmul__ = __mul__

    def congruence(self, c) -> "Sym2":
        """Return ``c.T @ self @ c`` for a constant 2x2 matrix ``c``."""
        (p, q), (r, s) = np.asarray(c, dtype=float)
        xx, xy, yy = self.xx, self.xy, self.yy
        return Sym2(
            p * p * xx + 2 * p * r * xy + r * r * yy,
            p * q * xx + (p * s + q * r) * xy + r * s * yy,
            q * q * xx + 2 * q * s * xy + s * s * yy,
        )


def _check_finite(m: Sym2) -> None:
    if not (np.all(np.isfinite(m.xx)) and np.all(np.isfinite(m.xy)) and np.all(np.isfinite(m.yy))):
        raise InvalidInputError("matrix entries must be finite")


def eigenvalues(m: Sym2):
    """Eigenvalues ``(e_plus, e_minus)`` of a symmetric 2x2 matrix, ``e_plus >= e_minus``.

    The larger-magnitude root comes from the quadratic formula and the other
    from ``det / root``, so both the sum and the product are reproduced to
    rounding even when the two eigenvalues differ by many orders.
    """
    _check_finite(m)
    xx, xy, yy = (np.asarray(v, dtype=float) for v in (m.xx, m.xy, m.yy))
    tr = xx + yy
    # (xx - yy)^2 + 4 xy^2 == tr^2 - 4 det, but never negative after rounding
    disc = np.maximum((xx - yy) ** 2 + 4.0 * xy * xy, 0.0)
    root = np.sqrt(disc)
    big = 0.5 * (tr + np.where(tr >= 0.0, root, -root))
    det = xx * yy - xy * xy
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big != 0.0, det / np.where(big != 0.0, big, 1.0), 0.0)
    e_plus = np.maximum(big, small)
    e_minus = np.minimum(big, small)
    if e_plus.ndim == 0:
        return float(e_plus), float(e_minus)
    return e_plus, e_minus


def _weighted(e, pos_weight, neg_weight):
    return np.where(e > 0.0, pos_weight * e, 0.0) + np.where(e < 0.0, neg_weight * e, 0.0)


def pucci_plus(m: Sym2, ell: EllipticityPair):
    """Maximal Pucci operator ``M+_{lam,Lam}(m)``."""
    e_plus, e_minus = eigenvalues(m)
    out = _weighted(e_plus, ell.Lam, ell.lam) + _weighted(e_minus, ell.Lam, ell.lam)
    return float(out) if np.ndim(out) == 0 else out


def pucci_minus(m: Sym2, ell: EllipticityPair):
    """Minimal Pucci operator; ``pucci_minus(m) == -pucci_plus(-m)``."""
    e_plus, e_minus = eigenvalues(m)
    out = _weighted(e_plus, ell.lam, ell.Lam) + _weighted(e_minus, ell.lam, ell.Lam)
    return float(out) if np.ndim(out) == 0 else out


def cone_solution(point, omega: float):
    """Degree-2 homogeneous solution ``y**2 - omega*x**2`` of M+ = 0 in the cone y > sqrt(omega)|x|."""
    if not omega >= 1.0:
        raise ParameterError(f"omega must be >= 1, got {omega}")
    if isinstance(point, np.ndarray) and point.ndim >= 2:
        x, y = point[..., 0], point[..., 1]
    else:
        x, y = (np.asarray(v, dtype=float) for v in point)
    out = y**2 - omega * x**2
    return float(out) if np.ndim(out) == 0 else out


def cone_hessian(omega: float) -> Sym2:
    return Sym2(-2.0 * omega, 0.0, 2.0)
