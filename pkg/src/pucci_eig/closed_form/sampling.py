"""Deterministic interior sample sets for residual sweeps."""

from __future__ import annotations

import numpy as np
from scipy.stats import qmc

from pucci_eig.closed_form.domains import HALF_PI, DomainSpec, OmegaGamma, Scaled, Sheared
from pucci_eig.errors import UnsupportedError

NEAR_DISTANCES = (1e-2, 1e-4)


def _base_and_map(spec: DomainSpec):
    delta = 1.0
    while isinstance(spec, Scaled):
        delta *= spec.delta
        spec = spec.base
    if isinstance(spec, OmegaGamma):
        return spec, lambda x, y: (delta * x, delta * y)
    if isinstance(spec, Sheared):
        def fwd(x, y):
            px, py = spec.push_forward(x, y)
            return delta * px, delta * py
        return spec.base, fwd
    raise UnsupportedError(f"no sampler for {type(spec).__name__}")


def _interface_points(base: OmegaGamma) -> np.ndarray:
    """Points at distance 1e-2 and 1e-4 on both sides of ``|x|, |y| = pi/2``,
    plus points approaching the ends of both axes."""
    pts = []
    x0, x1, y0, y1 = base.bbox()
    t = np.linspace(-1.0, 1.0, 21)
    for d in NEAR_DISTANCES:
        for side in (-d, d):
            for s in (1.0, -1.0):
                c = s * (HALF_PI + side)
                pts.append(np.stack([np.full_like(t, c), t * y1], -1))
                pts.append(np.stack([t * x1, np.full_like(t, c)], -1))
        pts.append(np.array([[0.0, y1 - d], [0.0, y0 + d], [x1 - d, 0.0], [x0 + d, 0.0]]))
    pts = np.concatenate(pts)
    return pts[base.contains(pts[:, 0], pts[:, 1])]


def sample_points(spec: DomainSpec, n: int = 10_000, seed: int = 0) -> np.ndarray:
    """``n`` scrambled-Sobol interior points plus near-interface and near-corner points.

    Points are generated on the base domain and mapped forward, so the
    interface lines of the pulled-back eigenfunction are always probed.
    """
    base, fwd = _base_and_map(spec)
    x0, x1, y0, y1 = base.bbox()
    sob = qmc.Sobol(2, scramble=True, seed=seed)
    keep = []
    count = 0
    while count < n:
        raw = qmc.scale(sob.random(4096), [x0, y0], [x1, y1])
        raw = raw[base.contains(raw[:, 0], raw[:, 1])]
        keep.append(raw)
        count += len(raw)
    pts = np.concatenate(keep)[:n]
    pts = np.concatenate([pts, _interface_points(base)])
    return np.stack(fwd(pts[:, 0], pts[:, 1]), -1)
