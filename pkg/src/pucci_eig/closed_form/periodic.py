"""
Sign-changing eigenfunction on the whole plane.

On the square ``|x|, |y| <= L`` with ``L = (1 + sqrt(omega)) pi/2`` the
four-branch formula is again ``gamma * g(x) + g(y)`` with the profile ``g``
of :mod:`pucci_eig.closed_form.eigenfunction`.  ``g`` is even and
``g'(L) = 0``, so repeating the cell with period ``2L = (1 + sqrt(omega)) pi``
coincides with even reflection across ``|t| = L`` and is C^2 there.
For ``omega = 1`` this is ``cos``, whose minimal period is ``2 pi``.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from pucci_eig.closed_form.domains import HALF_PI, split_point
from pucci_eig.closed_form.eigenfunction import (
    RegionTag,
    _tags_to_enum,
    classify,
    profile,
    profile_d1,
    profile_d2,
)
from pucci_eig.errors import ParameterError
from pucci_eig.pucci_core import EllipticityPair, Sym2, pucci_plus


class ComponentClass(enum.Enum):
    CONNECTED_NEGATIVE = "connected_negative"
    HORIZONTAL_STRIPES = "horizontal_stripes"
    VERTICAL_STRIPES = "vertical_stripes"
    # omega == gamma == 1 only: cos x + cos y < 0 is a lattice of diamonds
    BOUNDED_NEGATIVE = "bounded_negative"


def period(omega: float) -> float:
    return (1.0 + math.sqrt(omega)) * math.pi


def _check(gamma: float) -> None:
    if not (np.isfinite(gamma) and gamma > 0):
        raise ParameterError(f"gamma must be positive, got {gamma}")


def reduce_to_cell(t, omega: float):
    """Representative of ``t`` in ``[-L, L]`` modulo the period ``2L``."""
    p = period(omega)
    t = np.asarray(t, dtype=float)
    return t - p * np.round(t / p)


def periodic_extension_value(ell: EllipticityPair, gamma: float, point):
    _check(gamma)
    w = ell.omega()
    x, y = split_point(point)
    out = gamma * profile(reduce_to_cell(x, w), w) + profile(reduce_to_cell(y, w), w)
    return float(out) if out.ndim == 0 else out


def periodic_extension_gradient(ell: EllipticityPair, gamma: float, point):
    _check(gamma)
    w = ell.omega()
    x, y = split_point(point)
    return np.stack(
        [gamma * profile_d1(reduce_to_cell(x, w), w), profile_d1(reduce_to_cell(y, w), w)], -1
    )


def periodic_extension_hessian(ell: EllipticityPair, gamma: float, point) -> Sym2:
    _check(gamma)
    w = ell.omega()
    x, y = split_point(point)
    return Sym2.diag(
        gamma * profile_d2(reduce_to_cell(x, w), w), profile_d2(reduce_to_cell(y, w), w)
    )


def periodic_residual(ell: EllipticityPair, gamma: float, point):
    """``M+(D^2 u) + lam * u`` for the plane-filling eigenfunction."""
    out = pucci_plus(periodic_extension_hessian(ell, gamma, point), ell) + ell.lam * np.asarray(
        periodic_extension_value(ell, gamma, point)
    )
    return float(out) if np.ndim(out) == 0 else out


def periodic_region(omega: float, point):
    x, y = split_point(point)
    return _tags_to_enum(classify(reduce_to_cell(x, omega), reduce_to_cell(y, omega)))


def component_class(omega: float, gamma: float) -> ComponentClass:
    """Shape of the connected components of ``{u < 0}``."""
    _check(gamma)
    if not omega >= 1.0:
        raise ParameterError(f"omega must be >= 1, got {omega}")
    r = math.sqrt(omega)
    if omega == 1.0 and gamma == 1.0:
        return ComponentClass.BOUNDED_NEGATIVE
    if gamma <= 1.0 / r:
        return ComponentClass.HORIZONTAL_STRIPES
    if gamma >= r:
        return ComponentClass.VERTICAL_STRIPES
    return ComponentClass.CONNECTED_NEGATIVE


def positive_components_bounded(omega: float, gamma: float) -> bool:
    """``{u > 0}`` splits into bounded pieces (translates of the base domain)."""
    _check(gamma)
    r = math.sqrt(omega)
    return 1.0 / r <= gamma <= r


__all__ = [
    "ComponentClass",
    "RegionTag",
    "HALF_PI",
    "period",
    "reduce_to_cell",
    "periodic_extension_value",
    "periodic_extension_gradient",
    "periodic_extension_hessian",
    "periodic_residual",
    "periodic_region",
    "component_class",
    "positive_components_bounded",
]
