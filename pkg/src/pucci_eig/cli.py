"""
Command-line front end.

Every command writes either JSON (versioned by ``"schema": "pucci-eig/1"``)
or CSV with 17 significant digits, to stdout or atomically to ``--out``.

Exit codes: 0 success, 1 usage error, 2 non-convergence, 3 verify failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile

import numpy as np

from pucci_eig import verify
from pucci_eig.closed_form import (
    OmegaGamma,
    PiecewiseEigenfunction,
    Scaled,
    Sheared,
    Square,
    area,
    period,
    periodic_extension_hessian,
    periodic_extension_value,
    periodic_region,
)
from pucci_eig.errors import IterationError, PucciError
from pucci_eig.grid_fd import build_grid, principal_eigen
from pucci_eig.pucci_core import EllipticityPair, eigenvalues

SCHEMA = "pucci-eig/1"
EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED, EXIT_VERIFY = 0, 1, 2, 3

log = logging.getLogger("pucci_eig")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def render_csv(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def render_json(obj) -> str:
    return json.dumps(verify.to_jsonable(obj), indent=2) + "\n"


def write_output(text: str, out: str | None) -> None:
    """Write to stdout, or to ``out`` via a temporary file and ``os.replace``."""
    if out is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".pucci-eig-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------


def ellipticity(args) -> EllipticityPair:
    """Resolve two of ``--lambda/--Lambda/--omega``; defaults lambda=1, omega=2."""
    lam, Lam, omega = args.lam, args.Lam, args.omega
    given = sum(v is not None for v in (lam, Lam, omega))
    if given == 3:
        if not math.isclose(Lam / lam, omega, rel_tol=1e-12):
            raise UsageError("--lambda, --Lambda and --omega are inconsistent")
        return EllipticityPair(lam, Lam)
    if lam is not None and Lam is not None:
        return EllipticityPair(lam, Lam)
    if lam is None:
        lam = Lam / omega if (Lam is not None and omega is not None) else 1.0
    if Lam is not None:
        return EllipticityPair(lam, Lam)
    return EllipticityPair.from_omega(2.0 if omega is None else omega, lam)


def domain(args, ell: EllipticityPair):
    omega = ell.omega()
    if args.square:
        if args.a is not None:
            raise UsageError("--square cannot be combined with --a")
        spec = Square(math.pi / math.sqrt(2))
    elif args.a is not None and args.a != 0.0:
        spec = Sheared(omega, args.gamma, args.a)
    else:
        spec = OmegaGamma(omega, args.gamma)
    if args.delta is not None:
        spec = Scaled(spec, args.delta)
    return spec


def _add_ell(p):
    g = p.add_argument_group("ellipticity (give at most two; default lambda=1, omega=2)")
    g.add_argument("--lambda", dest="lam", type=float, help="lower ellipticity constant")
    g.add_argument("--Lambda", dest="Lam", type=float, help="upper ellipticity constant")
    g.add_argument("--omega", type=float, help="ratio Lambda/lambda")


def _add_domain(p):
    g = p.add_argument_group("domain")
    g.add_argument("--gamma", type=float, default=1.0, help="shape parameter (default 1)")
    g.add_argument("--a", type=float, help="shear parameter, |a| < pi")
    g.add_argument("--delta", type=float, help="dilation factor")
    g.add_argument("--square", action="store_true",
                   help="axis-aligned square of side sqrt(2)*pi instead")


def _add_grid(p, h=math.pi / 32, W=3):
    g = p.add_argument_group("discretization")
    g.add_argument("--h", type=float, default=h, help=f"grid spacing (default {h:.6g})")
    g.add_argument("--W", type=int, default=W, help=f"stencil width (default {W})")
    g.add_argument("--tol", type=float, default=1e-6, help="eigenvalue tolerance (default 1e-6)")
    g.add_argument("--max-iter", type=int, default=200, help="inverse-iteration cap (default 200)")


def _add_io(p, fmt):
    p.add_argument("--out", help="output path (written atomically); stdout if omitted")
    p.add_argument("--format", choices=("csv", "json"), default=fmt, help=f"default {fmt}")
    p.add_argument("--seed", type=int, default=42, help="sampler seed (default 42)")
    p.add_argument("--samples", type=int, default=2000, help="sample count (default 2000)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="pucci-eig",
        description="Principal eigenvalues of the Pucci sup-operator on explicit plane domains.",
        allow_abbrev=False,
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eig", help="numerical principal eigenvalue",
                       description="JSON fields: mu, h, W, iterations, residual, "
                       "monotone_certificate, converged, mu_lower, mu_upper, policy_iterations, "
                       "n_interior, residual_history. CSV: one row of the scalar fields.",
                       allow_abbrev=False)
    _add_ell(p), _add_domain(p), _add_grid(p), _add_io(p, "json")

    p = sub.add_parser("verify", help="run the verification suites",
                       description="Runs every suite; exit code 3 if a hard check fails.",
                       allow_abbrev=False)
    p.add_argument("--all", action="store_true", help="run all suites (the only mode)")
    _add_ell(p), _add_grid(p, h=math.pi / 16, W=2), _add_io(p, "json")

    p = sub.add_parser("area", help="area of a domain",
                       description="CSV columns: area.", allow_abbrev=False)
    _add_ell(p), _add_domain(p), _add_io(p, "json")

    p = sub.add_parser("sweep-gamma", help="normalized eigenvalue over gamma",
                       description="CSV columns: gamma, area, normalized "
                       "[, mu_h, normalized_h with --numerical].", allow_abbrev=False)
    _add_ell(p)
    p.add_argument("--n", type=int, default=9, help="number of gamma values (odd, default 9)")
    p.add_argument("--numerical", action="store_true", help="also solve on the grid")
    _add_grid(p, h=math.pi / 16, W=2), _add_io(p, "csv")

    p = sub.add_parser("sweep-shear", help="shear lower bound against the solver",
                       description="CSV columns: a, area, bound, mu_coarse, mu_h, margin, "
                       "passes_bound, strictness, normalized_bound, normalized_h. "
                       "mu_h is computed at h/2, mu_coarse at h.", allow_abbrev=False)
    _add_ell(p)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--a-values", default="0,0.7853981633974483,1.5707963267948966",
                   help="comma-separated shear parameters")
    _add_grid(p, h=math.pi / 16, W=2), _add_io(p, "csv")

    p = sub.add_parser("render", help="plot-ready boundary and eigenfunction samples",
                       description="CSV columns: kind (boundary|sample), x, y, u, region, "
                       "concave. Samples lie on an n-by-n tensor grid clipped to the domain, "
                       "or cover two periods with --periodic.", allow_abbrev=False)
    _add_ell(p), _add_domain(p)
    p.add_argument("--n", type=int, default=101, help="tensor grid size (default 101)")
    p.add_argument("--periodic", action="store_true", help="render the plane-filling extension")
    p.add_argument("--normalize", choices=("one", "sup"), default="one",
                   help="'sup' divides by the maximum over the samples")
    _add_io(p, "csv")
    return parser


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

_EIG_COLUMNS = ["mu", "h", "W", "iterations", "residual", "monotone_certificate", "converged",
                "mu_lower", "mu_upper", "policy_iterations", "n_interior"]


def cmd_eig(args) -> int:
    ell = ellipticity(args)
    spec = domain(args, ell)
    grid, st = build_grid(spec, args.h, args.W)
    rep = principal_eigen(grid, st, ell, tol=args.tol, max_iter=args.max_iter)
    d = rep.to_dict()
    if args.format == "json":
        text = render_json({"schema": SCHEMA, "command": "eig", "domain": spec, **d})
    else:
        text = render_csv(_EIG_COLUMNS, [d])
    write_output(text, args.out)
    return EXIT_OK if rep.converged else EXIT_NONCONVERGED


def cmd_verify(args) -> int:
    ell = ellipticity(args)
    rep = verify.run_all(seed=args.seed, lam=ell.lam, Lam=ell.Lam, h=args.h, W=args.W,
                         samples=args.samples)
    if args.format == "json":
        text = render_json(rep)
    else:
        rows = [{"check": name, "ok": False} for name in rep["hard_failures"]]
        text = render_csv(["check", "ok"], rows or [{"check": "all", "ok": True}])
    write_output(text, args.out)
    return EXIT_OK if rep["ok"] else EXIT_VERIFY


def cmd_area(args) -> int:
    ell = ellipticity(args)
    spec = domain(args, ell)
    a = area(spec)
    if args.format == "json":
        text = render_json({"schema": SCHEMA, "command": "area", "domain": spec, "area": a})
    else:
        text = render_csv(["area"], [{"area": a}])
    write_output(text, args.out)
    return EXIT_OK


def _sweep_out(args, sweep, columns, command):
    if args.format == "json":
        text = render_json({"schema": SCHEMA, "command": command, **verify.to_jsonable(sweep)})
    else:
        text = render_csv(columns, sweep.rows)
    write_output(text, args.out)


def cmd_sweep_gamma(args) -> int:
    ell = ellipticity(args)
    sweep = verify.gamma_sweep(ell, args.n, numerical=args.numerical, h=args.h, W=args.W)
    cols = ["gamma", "area", "normalized"] + (["mu_h", "normalized_h"] if args.numerical else [])
    _sweep_out(args, sweep, cols, "sweep-gamma")
    return EXIT_OK


def cmd_sweep_shear(args) -> int:
    ell = ellipticity(args)
    try:
        a_values = [float(v) for v in args.a_values.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"--a-values: {exc}") from exc
    if not a_values:
        raise UsageError("--a-values is empty")
    sweep = verify.shear_sweep(ell, args.gamma, a_values, args.h, args.W)
    cols = ["a", "area", "bound", "mu_coarse", "mu_h", "margin", "passes_bound", "strictness",
            "normalized_bound", "normalized_h"]
    _sweep_out(args, sweep, cols, "sweep-shear")
    return EXIT_OK


def _render_rows(args, ell):
    n = args.n
    if n < 2:
        raise UsageError("--n must be at least 2")
    if args.periodic:
        p = period(ell.omega())
        t = np.linspace(-p, p, n)
        X, Y = np.meshgrid(t, t)
        pts = np.stack([X.ravel(), Y.ravel()], -1)
        u = np.asarray(periodic_extension_value(ell, args.gamma, pts))
        e_plus, _ = eigenvalues(periodic_extension_hessian(ell, args.gamma, pts))
        tags = periodic_region(ell.omega(), pts)
        boundary = np.empty((0, 2))
        ub = np.empty(0)
        btags = []
    else:
        spec = domain(args, ell)
        f = PiecewiseEigenfunction(spec, ell)
        x0, x1, y0, y1 = spec.bbox()
        X, Y = np.meshgrid(np.linspace(x0, x1, n), np.linspace(y0, y1, n))
        pts = np.stack([X.ravel(), Y.ravel()], -1)
        pts = pts[spec.contains(pts[:, 0], pts[:, 1])]
        u = np.asarray(f.value(pts))
        e_plus, _ = eigenvalues(f.hessian(pts))
        tags = f.region(pts)
        boundary = spec.boundary(max(n, 2))
        ub = np.asarray(f.value(boundary))
        btags = f.region(boundary)
    scale = float(np.abs(u).max()) if args.normalize == "sup" and len(u) else 1.0
    rows = []
    for (x, y), v, tag in zip(boundary, ub, btags):
        rows.append({"kind": "boundary", "x": x, "y": y, "u": v / scale, "region": tag.value,
                     "concave": ""})
    for (x, y), v, tag, ep in zip(pts, u, tags, np.asarray(e_plus)):
        rows.append({"kind": "sample", "x": x, "y": y, "u": v / scale, "region": tag.value,
                     "concave": bool(ep <= 0.0)})
    return rows


def cmd_render(args) -> int:
    ell = ellipticity(args)
    rows = _render_rows(args, ell)
    cols = ["kind", "x", "y", "u", "region", "concave"]
    if args.format == "json":
        text = render_json({"schema": SCHEMA, "command": "render", "columns": cols,
                            "rows": [[r[c] for c in cols] for r in rows]})
    else:
        text = render_csv(cols, rows)
    write_output(text, args.out)
    return EXIT_OK


COMMANDS = {
    "eig": cmd_eig,
    "verify": cmd_verify,
    "area": cmd_area,
    "sweep-gamma": cmd_sweep_gamma,
    "sweep-shear": cmd_sweep_shear,
    "render": cmd_render,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"pucci-eig {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IterationError as exc:
        print(f"pucci-eig {args.command}: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except (PucciError, ValueError) as exc:
        print(f"pucci-eig {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
