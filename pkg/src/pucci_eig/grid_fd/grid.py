"""
Lattice discretization of a domain and wide-stencil geometry.

The lattice is ``h * Z^2`` anchored at the origin, so dilating a domain and
the mesh width by the same factor reproduces the same lattice pattern.
Every interior lattice point carries, for each stencil direction ``v``, two
legs ``p +- h v``.  A leg whose endpoint is not interior is cut where the
segment leaves the domain (bisection on the membership test) and the
Dirichlet value 0 is imposed at the cut point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from pucci_eig.closed_form.domains import DomainSpec
from pucci_eig.errors import GridError, ParameterError

_BISECTION_STEPS = 46  # 2**-46 < 1e-12 * h relative to a leg of length h|v|


def direction_pairs(W: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Orthogonal lattice direction pairs ``(v, v_perp)`` for stencil width ``W``.

    ``W = 1`` is the 5-point stencil (axis pair only).  For ``W >= 2`` every
    primitive ``v = (p, q)`` with ``p > 0, q >= 0`` and ``max(p, q) <= W``
    is used, paired with ``v_perp = (-q, p)``.  Consecutive directions are at
    most ``pi/(2W)`` apart.
    """
    if W < 1:
        raise ParameterError(f"stencil width must be >= 1, got {W}")
    vs = [(1, 0)] if W == 1 else [
        (p, q)
        for p in range(1, W + 1)
        for q in range(0, W + 1)
        if math.gcd(p, q) == 1
    ]
    vs.sort(key=lambda v: math.atan2(v[1], v[0]))
    return [(v, (-v[1], v[0])) for v in vs]


def max_angular_gap(W: int) -> float:
    angles = sorted(
        math.atan2(v[1], v[0]) % math.pi for pair in direction_pairs(W) for v in pair
    )
    gaps = np.diff(angles + [angles[0] + math.pi])
    return float(gaps.max())


@dataclass(frozen=True, eq=False)
class Grid:
    spec: DomainSpec
    h: float
    bbox: tuple[float, float, float, float]
    i0: int  # lattice index of column 0
    j0: int  # lattice index of row 0
    inside: np.ndarray  # bool, shape (ny, nx), indexed [j, i]
    index: np.ndarray  # int, -1 outside, else unknown number
    points: np.ndarray  # (n, 2) coordinates of interior points
    n_interior: int
    connected: bool

    @property
    def ij(self) -> np.ndarray:
        jj, ii = np.nonzero(self.inside)
        return np.stack([ii, jj], -1)


@dataclass(frozen=True, eq=False)
class StencilSet:
    """Per-point leg data for every stencil direction.

    ``nbr[d, k, i]`` is the unknown number of the leg endpoint (``k = 0`` for
    ``+v``, ``k = 1`` for ``-v``) or ``n`` (a ghost zero) when the leg is cut;
    ``frac`` is the fraction of the leg inside the domain and ``coef`` the
    weight of the endpoint in the second difference along ``v/|v|``.
    """

    W: int
    vectors: np.ndarray  # (n_dir, 2) int
    pairs: np.ndarray  # (n_pair, 2) indices into vectors
    nbr: np.ndarray
    frac: np.ndarray
    coef: np.ndarray
    certified_monotone: bool

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)

    def legs_cut(self) -> np.ndarray:
        return self.frac < 1.0


def _cut_fraction(spec: DomainSpec, p: np.ndarray, step: np.ndarray) -> np.ndarray:
    lo = np.zeros(len(p))
    hi = np.ones(len(p))
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        q = p + mid[:, None] * step
        ok = np.asarray(spec.contains(q[:, 0], q[:, 1]), dtype=bool)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return 0.5 * (lo + hi)


def build_grid(spec: DomainSpec, h: float, W: int) -> tuple[Grid, StencilSet]:
    """Classify lattice points and precompute the wide-stencil legs.

    Raises
    ------
    GridError
        No lattice point falls inside the domain.
    """
    if not (np.isfinite(h) and h > 0):
        raise ParameterError(f"mesh width must be positive, got {h}")
    pairs_v = direction_pairs(W)
    reach = max(max(abs(c) for pair in pairs_v for v in pair for c in v), 1)

    x0, x1, y0, y1 = spec.bbox()
    i0 = math.floor(x0 / h) - 1
    i1 = math.ceil(x1 / h) + 1
    j0 = math.floor(y0 / h) - 1
    j1 = math.ceil(y1 / h) + 1
    xs = h * np.arange(i0, i1 + 1)
    ys = h * np.arange(j0, j1 + 1)
    X, Y = np.meshgrid(xs, ys)
    inside = np.asarray(spec.contains(X, Y), dtype=bool)
    n = int(inside.sum())
    if n == 0:
        raise GridError(f"no interior lattice points at h={h}")
    index = np.full(inside.shape, -1, dtype=np.int64)
    index[inside] = np.arange(n)
    _, n_comp = ndimage.label(inside)
    grid = Grid(
        spec=spec,
        h=float(h),
        bbox=(float(xs[0]), float(xs[-1]), float(ys[0]), float(ys[-1])),
        i0=i0,
        j0=j0,
        inside=inside,
        index=index,
        points=np.stack([X[inside], Y[inside]], -1),
        n_interior=n,
        connected=n_comp == 1,
    )

    vectors = []
    for pair in pairs_v:
        vectors.extend(pair)
    vectors = np.array(vectors, dtype=np.int64)
    pairs = np.arange(len(vectors)).reshape(-1, 2)

    # pad so that every leg endpoint of an interior point has a valid index
    pad = reach + 1
    idx_pad = np.pad(index, pad, constant_values=-1)
    jj, ii = np.nonzero(inside)
    nbr = np.empty((len(vectors), 2, n), dtype=np.int64)
    frac = np.ones((len(vectors), 2, n))
    for d, (p, q) in enumerate(vectors):
        for k, sgn in enumerate((1, -1)):
            m = idx_pad[jj + pad + sgn * q, ii + pad + sgn * p]
            cut = m < 0
            nbr[d, k] = np.where(cut, n, m)
            if np.any(cut):
                step = h * np.array([sgn * p, sgn * q], dtype=float)
                frac[d, k, cut] = _cut_fraction(spec, grid.points[cut], step)
    lengths = h * np.hypot(vectors[:, 0], vectors[:, 1])[:, None, None] * frac
    total = lengths.sum(axis=1, keepdims=True)
    coef = 2.0 / (lengths * total)
    monotone = bool(np.all(np.isfinite(coef)) and np.all(coef > 0) and np.any(frac < 1.0))
    stencils = StencilSet(
        W=W,
        vectors=vectors,
        pairs=pairs,
        nbr=nbr,
        frac=frac,
        coef=coef,
        certified_monotone=monotone,
    )
    return grid, stencils
