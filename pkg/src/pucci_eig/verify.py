"""
Verification suites tying the closed forms to the numerical solver.

Each suite returns a plain dataclass; :func:`run_all` aggregates them into a
JSON-ready dictionary whose ``hard_failures`` list drives the CLI exit code.
Strict-inequality claims are only confirmed when the observed gap exceeds
twice the estimated discretization margin; otherwise they are reported as
indeterminate, never as failures.
"""

from __future__ import annotations

import dataclasses
import enum
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from pucci_eig.closed_form import (
    HALF_PI,
    OmegaGamma,
    PiecewiseEigenfunction,
    Scaled,
    Sheared,
    Square,
    area,
    area_derivative_gamma,
    area_omega_gamma,
    component_class,
    corner_asymptotics_check,
    gamma_grid,
    period,
    periodic_extension_value,
    periodic_region,
    periodic_residual,
    phi_inverse_identity_check,
    positive_components_bounded,
    residual,
    sample_points,
    separable_candidate_residual,
)
from pucci_eig.closed_form.domains import DomainSpec
from pucci_eig.errors import ParameterError
from pucci_eig.grid_fd import build_grid, principal_eigen
from pucci_eig.pucci_core import EllipticityPair, cone_hessian, pucci_plus

log = logging.getLogger(__name__)

SLACK_TOL = 1e-11
RESIDUAL_TOL = 1e-11


def max_workers() -> int:
    try:
        return max(1, int(os.environ.get("PUCCI_EIG_THREADS", "1")))
    except ValueError:
        return 1


def _map(func, items):
    items = list(items)
    workers = min(max_workers(), len(items)) or 1
    if workers == 1:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


# --------------------------------------------------------------------------
# certificates
# --------------------------------------------------------------------------


@dataclass
class Certificate:
    spec: DomainSpec
    mu_lower: float
    witness: str
    min_slack: float
    max_slack: float
    n_samples: int
    scale: float

    @property
    def passes(self) -> bool:
        return self.min_slack >= -SLACK_TOL * self.scale


def certify_lower_bound(spec: DomainSpec, ell: EllipticityPair, mu: float, sampler=None,
                        seed: int = 0, n: int = 10_000) -> Certificate:
    """Check that the closed-form eigenfunction is a positive supersolution at level ``mu``.

    ``slack = -M+(D^2 phi) - mu * phi`` is evaluated with analytic Hessians at
    every sample point; a non-negative minimum certifies ``mu+(spec) >= mu``.

    Raises
    ------
    UnsupportedError
        ``spec`` has no closed-form witness (e.g. ``Square``).
    """
    f = PiecewiseEigenfunction(spec, ell)
    pts = sample_points(spec, n, seed) if sampler is None else np.asarray(sampler, dtype=float)
    u = np.asarray(f.value(pts))
    slack = -np.asarray(residual(f, mu, pts))
    return Certificate(
        spec=spec,
        mu_lower=float(mu),
        witness=f"closed-form eigenfunction of {spec!r} (normalization 1)",
        min_slack=float(slack.min()),
        max_slack=float(slack.max()),
        n_samples=len(pts),
        scale=float(max(np.abs(u).max(), 1.0)),
    )


# --------------------------------------------------------------------------
# sweeps
# --------------------------------------------------------------------------


@dataclass
class SweepResult:
    parameter: str
    values: list[float]
    rows: list[dict]
    argmin: float
    argmin_numerical: float | None = None


def gamma_sweep(ell: EllipticityPair, n_gamma: int, numerical: bool = False,
                h: float | None = None, W: int | None = None) -> SweepResult:
    """Normalized eigenvalue ``lam * |Omega(omega, gamma)|`` over admissible gammas."""
    omega = ell.omega()
    if n_gamma < 3 and omega > 1.0:
        raise ParameterError("gamma sweep needs at least 3 values")
    gammas = gamma_grid(omega, n_gamma)

    def row(g):
        a = area_omega_gamma(omega, g)
        r = {"gamma": float(g), "area": a, "normalized": ell.lam * a}
        if numerical:
            grid, st = build_grid(OmegaGamma(omega, g), h, W)
            rep = principal_eigen(grid, st, ell)
            r["mu_h"] = rep.mu
            r["normalized_h"] = rep.mu * a
        return r

    rows = _map(row, gammas)
    k = int(np.argmin([r["normalized"] for r in rows]))
    kn = int(np.argmin([r["normalized_h"] for r in rows])) if numerical else None
    return SweepResult(
        parameter="gamma",
        values=[float(g) for g in gammas],
        rows=rows,
        argmin=float(gammas[k]),
        argmin_numerical=None if kn is None else float(gammas[kn]),
    )


def richardson_margin(mu_coarse: float, mu_fine: float, order: float = 1.0) -> float:
    """Relative error estimate of ``mu_fine`` from grids ``h`` and ``h/2``."""
    return abs(mu_coarse - mu_fine) / (2.0**order - 1.0) / abs(mu_fine)


def shear_sweep(ell: EllipticityPair, gamma: float, a_values, h: float, W: int) -> SweepResult:
    """Lower bound ``lam pi^2/(pi^2 - a^2)`` against ``mu_h`` on grids ``h`` and ``h/2``."""
    omega = ell.omega()
    a_values = sorted(float(a) for a in a_values)
    base_area = area_omega_gamma(omega, gamma)

    def row(a):
        spec = Sheared(omega, gamma, a)
        bound = ell.lam * math.pi**2 / (math.pi**2 - a * a)
        mus = []
        for hh in (h, h / 2):
            grid, st = build_grid(spec, hh, W)
            mus.append(principal_eigen(grid, st, ell).mu)
        mu_c, mu_f = mus
        margin = richardson_margin(mu_c, mu_f)
        ar = math.sqrt(math.pi**2 - a * a) / math.pi * base_area
        gap = mu_f - bound
        if a == 0.0 or omega == 1.0:
            strict = "equality_case"
        elif gap > 2.0 * margin * bound:
            strict = "confirmed"
        else:
            strict = "indeterminate"
        return {
            "a": a,
            "area": ar,
            "bound": bound,
            "mu_coarse": mu_c,
            "mu_h": mu_f,
            "margin": margin,
            "passes_bound": bool(mu_f >= bound * (1.0 - margin)),
            "strictness": strict,
            "normalized_bound": bound * ar,
            "normalized_h": mu_f * ar,
        }

    rows = _map(row, a_values)
    k = int(np.argmin([r["normalized_bound"] for r in rows]))
    kn = int(np.argmin([r["normalized_h"] for r in rows]))
    return SweepResult("a", a_values, rows, a_values[k], a_values[kn])


# --------------------------------------------------------------------------
# non-separability on the square
# --------------------------------------------------------------------------


@dataclass
class NonseparabilityReport:
    lam: float
    Lam: float
    min_defect: float
    max_defect: float
    max_abs_defect: float
    min_abs_defect_interior: float  # over the band without its left endpoint
    table: list[tuple[float, float]]
    forced_constants: dict
    separable_case: bool

    @property
    def nonseparable(self) -> bool:
        """The separable candidate fails the equation somewhere on the band."""
        return self.max_abs_defect > 1e-12 * max(1.0, self.Lam)


def nonseparability_report(ell: EllipticityPair, n_samples: int = 1000) -> NonseparabilityReport:
    """Defect of ``cos(x/sqrt2) cos(y/sqrt2)`` on the diagonal band of the square.

    Also records the constants the separable ansatz ``f(x) f(y)`` would be
    forced to take: ``f''(0) = -mu/(2 lam)``, ``mu = lam``, ``f = cos(x/sqrt2)``.
    """
    lo, hi = math.pi / (2 * math.sqrt(2)), math.pi / math.sqrt(2)
    x = np.linspace(lo, hi, n_samples, endpoint=False)
    d = np.asarray(separable_candidate_residual(ell, x))
    mu = ell.lam
    f2 = -0.5  # second derivative of cos(x/sqrt2) at 0
    forced = {
        "mu": mu,
        "f''(0)": f2,
        "-mu/(2 lam)": -mu / (2 * ell.lam),
        "-lam f''(0)": -ell.lam * f2,
        "-2 lam f''(0)": -2 * ell.lam * f2,
    }
    return NonseparabilityReport(
        lam=ell.lam,
        Lam=ell.Lam,
        min_defect=float(d.min()),
        max_defect=float(d.max()),
        max_abs_defect=float(np.abs(d).max()),
        min_abs_defect_interior=float(np.abs(d[1:]).min()) if len(d) > 1 else float("nan"),
        table=[(float(a), float(b)) for a, b in zip(x, d)],
        forced_constants=forced,
        separable_case=ell.lam == ell.Lam,
    )


# --------------------------------------------------------------------------
# plane-filling eigenfunction
# --------------------------------------------------------------------------


@dataclass
class PeriodicReport:
    omega: float
    gamma: float
    max_residual: float
    scale: float
    branch_counts: dict
    gradient_jumps: dict  # probe step -> max one-sided difference jump
    corner_center_value: float
    component_class: str
    positive_bounded: bool

    @property
    def passes(self) -> bool:
        return (
            self.max_residual <= RESIDUAL_TOL * self.scale
            and all(j <= 10 * h for h, j in self.gradient_jumps.items())
            and self.corner_center_value < 0
            and all(c > 0 for c in self.branch_counts.values())
        )


def _interface_probes(omega: float, n: int, seed: int):
    p = period(omega)
    L = 0.5 * p
    lines = np.array([HALF_PI, -HALF_PI, L, -L, p - HALF_PI, HALF_PI - p])
    rng = np.random.default_rng(seed)
    other = rng.uniform(-p, p, n)
    return lines, other


def gradient_jump(ell: EllipticityPair, gamma: float, step: float, n: int = 200, seed: int = 0) -> float:
    """Max difference of one-sided difference quotients across the interface lines."""
    lines, other = _interface_probes(ell.omega(), n, seed)
    worst = 0.0
    for t0 in lines:
        t0 = np.full_like(other, t0)
        for swap in (False, True):
            def u(t):
                return periodic_extension_value(ell, gamma, (other, t) if swap else (t, other))
            right = (u(t0 + step) - u(t0)) / step
            left = (u(t0) - u(t0 - step)) / step
            worst = max(worst, float(np.max(np.abs(right - left))))
    return worst


def periodic_residual_suite(ell: EllipticityPair, gamma: float, n_samples: int = 10_000,
                            seed: int = 0, probe_steps=(1e-4, 1e-5)) -> PeriodicReport:
    omega = ell.omega()
    p = period(omega)
    sob = qmc.Sobol(2, scramble=True, seed=seed)
    m = max(0, math.ceil(math.log2(max(n_samples, 1))))
    pts = qmc.scale(sob.random_base2(m)[:n_samples], [-p, -p], [p, p])
    # points hugging |x|, |y| = pi/2 and the cell seam from both sides
    lines, other = _interface_probes(omega, 50, seed)
    extra = []
    for d in (1e-2, 1e-4):
        for t0 in lines:
            for s in (-d, d):
                extra.append(np.stack([np.full_like(other, t0 + s), other], -1))
                extra.append(np.stack([other, np.full_like(other, t0 + s)], -1))
    pts = np.concatenate([pts] + extra)
    res = np.abs(np.asarray(periodic_residual(ell, gamma, pts)))
    u = np.asarray(periodic_extension_value(ell, gamma, pts))
    tags = periodic_region(omega, pts)
    counts = {}
    for t in tags:
        counts[t.value] = counts.get(t.value, 0) + 1
    center = (1 + math.sqrt(omega)) * HALF_PI
    return PeriodicReport(
        omega=omega,
        gamma=float(gamma),
        max_residual=float(res.max()),
        scale=float(max(np.abs(u).max(), 1.0)),
        branch_counts=dict(sorted(counts.items())),
        gradient_jumps={float(h): gradient_jump(ell, gamma, h, seed=seed) for h in probe_steps},
        corner_center_value=periodic_extension_value(ell, gamma, (center, center)),
        component_class=component_class(omega, gamma).value,
        positive_bounded=positive_components_bounded(omega, gamma),
    )


# --------------------------------------------------------------------------
# aggregate
# --------------------------------------------------------------------------


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        if isinstance(obj, (OmegaGamma, Sheared, Square, Scaled)):
            out = {"type": type(obj).__name__, **out}
        return out
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def to_jsonable(obj):
    """Plain JSON-compatible structure (dicts, lists, floats) for any report."""
    return _jsonable(obj)


@dataclass
class SuiteReport:
    sections: dict = field(default_factory=dict)
    hard_failures: list = field(default_factory=list)

    def check(self, name: str, ok: bool) -> None:
        if not ok:
            self.hard_failures.append(name)


def run_all(seed: int = 42, lam: float = 1.0, Lam: float = 2.0, h: float = math.pi / 16,
            W: int = 2, samples: int = 2000) -> dict:
    """Run every suite at desk-scale resolution and return a JSON-ready report."""
    ell = EllipticityPair(lam, Lam)
    omega = ell.omega()
    r = math.sqrt(omega)
    rep = SuiteReport()

    # closed-form eigenpairs on Omega(omega, gamma)
    eig_rows = []
    for g in gamma_grid(omega, 5):
        cert = certify_lower_bound(OmegaGamma(omega, g), ell, ell.lam, seed=seed, n=samples)
        eig_rows.append({"gamma": float(g), "min_slack": cert.min_slack, "max_slack": cert.max_slack})
        rep.check(f"eigenpair gamma={g:.6g}",
                  max(abs(cert.min_slack), abs(cert.max_slack)) <= RESIDUAL_TOL * cert.scale)
    rep.sections["eigenpairs"] = eig_rows

    # supersolution certificates on sheared domains
    cert_rows = []
    for a in (0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4):
        mu = ell.lam * math.pi**2 / (math.pi**2 - a * a)
        cert = certify_lower_bound(Sheared(omega, 1.0, a), ell, mu, seed=seed, n=samples)
        cert_rows.append(to_jsonable(cert) | {"passes": cert.passes})
        rep.check(f"certificate a={a:.6g}", cert.passes)
    rep.sections["certificates"] = cert_rows

    # profile identity, areas and the gamma sweep
    # near the flat top of the profile the inverse has a square-root
    # singularity, so the attainable deviation depends on (omega, gamma);
    # the hard check uses two well-conditioned reference cases
    inv = {
        "omega=4,gamma=1.3": phi_inverse_identity_check(4.0, 1.3, 1000),
        "omega=1,gamma=1": phi_inverse_identity_check(1.0, 1.0, 1000),
    }
    rep.check("phi inverse identity", max(inv.values()) <= 1e-10)
    inv[f"omega={omega:.6g},gamma={min(1.3, r):.6g} (informational)"] = \
        phi_inverse_identity_check(omega, min(1.3, r), 1000)
    rep.sections["phi_inverse_deviation"] = inv
    sweep = gamma_sweep(ell, 9)
    rep.sections["gamma_sweep"] = to_jsonable(sweep)
    rep.check("gamma sweep argmin", sweep.argmin == 1.0)
    if omega > 1.0:
        gs = gamma_grid(omega, 11)[1:-1]
        signs = [int(np.sign(area_derivative_gamma(omega, g))) for g in gs]
        rep.sections["area_derivative_signs"] = dict(zip([float(g) for g in gs], signs))
        rep.check("area derivative sign", signs == [int(np.sign(g - 1.0)) for g in gs])
    rep.sections["area_square_case"] = area(OmegaGamma(1.0, 1.0)) - 2 * math.pi**2

    # numerical cross-checks
    grid, st = build_grid(OmegaGamma(omega, 1.0), h, W)
    eig = principal_eigen(grid, st, ell)
    rep.sections["numerical_omega_gamma"] = eig.to_dict()
    rep.check("numerical eigenvalue converged", eig.converged)
    lap = EllipticityPair(1.0, 1.0)
    grid, st = build_grid(Square(math.pi / math.sqrt(2)), h, 1)
    sq = principal_eigen(grid, st, lap)
    rep.sections["numerical_square_laplacian"] = sq.to_dict()
    shear = shear_sweep(ell, 1.0, [0.0, math.pi / 2], h, W)
    rep.sections["shear_sweep"] = to_jsonable(shear)
    rep.check("shear lower bound", all(row["passes_bound"] for row in shear.rows))

    # non-separability, cone, corner, periodic extension
    ns = nonseparability_report(ell, 1000)
    rep.sections["nonseparability"] = to_jsonable(
        dataclasses.replace(ns, table=ns.table[:: max(1, len(ns.table) // 20)])
    )
    rep.check("nonseparability", ns.nonseparable != ns.separable_case)
    rep.sections["cone_pucci_plus"] = pucci_plus(cone_hessian(omega), ell)
    rep.check("cone solution", abs(rep.sections["cone_pucci_plus"]) <= 1e-12 * Lam)
    corner = corner_asymptotics_check(ell)
    rep.sections["corner"] = to_jsonable(corner)
    rep.check("corner ratio", corner.min_ratio > 0 and corner.stability < 0.05)
    per_rows = []
    for g in (0.5, 1.0, r, 3.0):
        pr = periodic_residual_suite(ell, g, samples, seed)
        per_rows.append(to_jsonable(pr) | {"passes": pr.passes})
        rep.check(f"periodic gamma={g:.6g}", pr.passes)
    rep.sections["periodic"] = per_rows

    return {
        "schema": "pucci-eig/1",
        "command": "verify",
        "seed": seed,
        "lambda": lam,
        "Lambda": Lam,
        "h": h,
        "W": W,
        "sections": to_jsonable(rep.sections),
        "hard_failures": rep.hard_failures,
        "ok": not rep.hard_failures,
    }
