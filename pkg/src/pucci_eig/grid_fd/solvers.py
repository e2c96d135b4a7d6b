"""Howard policy iteration and inverse power iteration for the discrete operator."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import splu

from pucci_eig.errors import GridError, IterationError, ParameterError
from pucci_eig.grid_fd.grid import Grid, StencilSet
from pucci_eig.grid_fd.scheme import (
    PolicyState,
    assemble,
    discrete_pucci_plus,
    improve_policy,
)
from pucci_eig.pucci_core import EllipticityPair

log = logging.getLogger(__name__)

POLICY_TOL = 1e-9
LINEAR_RTOL = 1e-10


@dataclass
class SolveReport:
    mu: float
    eigenfield: np.ndarray
    iterations: int
    residual_history: list[float]
    h: float
    W: int
    certified_monotone: bool
    converged: bool = True
    residual: float = float("nan")
    mu_lower: float = float("nan")  # Collatz-Wielandt bracket of the last step
    mu_upper: float = float("nan")
    policy_iterations: int = 0
    n_interior: int = 0

    def to_dict(self, include_field: bool = False) -> dict:
        out = {
            "mu": self.mu,
            "h": self.h,
            "W": self.W,
            "iterations": self.iterations,
            "residual": self.residual,
            "monotone_certificate": self.certified_monotone,
            "converged": self.converged,
            "mu_lower": self.mu_lower,
            "mu_upper": self.mu_upper,
            "policy_iterations": self.policy_iterations,
            "n_interior": self.n_interior,
            "residual_history": list(self.residual_history),
        }
        if include_field:
            out["eigenfield"] = [float(v) for v in self.eigenfield]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "SolveReport":
        return cls(
            mu=d["mu"],
            eigenfield=np.asarray(d.get("eigenfield", []), dtype=float),
            iterations=d["iterations"],
            residual_history=list(d["residual_history"]),
            h=d["h"],
            W=d["W"],
            certified_monotone=d["monotone_certificate"],
            converged=d["converged"],
            residual=d["residual"],
            mu_lower=d["mu_lower"],
            mu_upper=d["mu_upper"],
            policy_iterations=d["policy_iterations"],
            n_interior=d["n_interior"],
        )


@dataclass
class _Workspace:
    """Factorization cache owned by one solve; never shared between solves."""

    policy: PolicyState | None = None
    matrix: object = None
    lu: object = None
    factorizations: int = 0
    policy_iterations: int = field(default=0)

    def factor(self, stencils, policy, n):
        if policy.same_as(self.policy):
            return
        self.matrix = assemble(stencils, policy, n).tocsc()
        self.lu = splu(self.matrix)
        self.policy = policy
        self.factorizations += 1


def _linear_solve(ws: _Workspace, rhs: np.ndarray) -> np.ndarray:
    u = ws.lu.solve(rhs)
    r = rhs - ws.matrix @ u
    # one step of iterative refinement if the direct solve is not tight enough
    if np.max(np.abs(r)) > LINEAR_RTOL * np.max(np.abs(rhs)):
        u = u + ws.lu.solve(r)
    return u


def howard_solve(
    grid: Grid,
    stencils: StencilSet,
    ell: EllipticityPair,
    rhs,
    *,
    policy: PolicyState | None = None,
    tol: float = POLICY_TOL,
    max_iter: int = 100,
    workspace: _Workspace | None = None,
) -> np.ndarray:
    """Solve ``-M+_h(u) = rhs`` with ``u = 0`` on the cut boundary.

    Policy iteration: freeze the argmax policy, solve the linear M-matrix
    system, re-improve.  Stops when the policy is stable or the nonlinear
    residual is below ``tol * max|rhs|``.

    Raises
    ------
    IterationError
        ``max_iter`` policy updates without meeting the stopping test.
    """
    rhs = np.asarray(rhs, dtype=float)
    n = grid.n_interior
    if rhs.shape != (n,):
        raise ParameterError(f"rhs must have shape ({n},), got {rhs.shape}")
    ws = workspace if workspace is not None else _Workspace()
    if policy is None:
        policy = ws.policy if ws.policy is not None else improve_policy(stencils, ell, rhs)
    scale = max(np.max(np.abs(rhs)), np.finfo(float).tiny)
    history = []
    for it in range(max_iter):
        ws.factor(stencils, policy, n)
        u = _linear_solve(ws, rhs)
        ws.policy_iterations += 1
        res = float(np.max(np.abs(-discrete_pucci_plus(grid, stencils, u, ell) - rhs)))
        history.append(res)
        new = improve_policy(stencils, ell, u)
        if res <= tol * scale or new.same_as(policy):
            if res > tol * scale:
                raise IterationError(
                    "stable policy but residual above tolerance",
                    {"residual": res, "history": history},
                )
            return u
        policy = new
    raise IterationError(
        f"policy iteration did not terminate in {max_iter} steps",
        {"residual_history": history},
    )


def _initial_iterate(stencils: StencilSet, n: int) -> np.ndarray:
    # indicator of the interior, one Jacobi sweep of the axis 5-point average
    ones = np.ones(n + 1)
    ones[n] = 0.0
    axis = [d for d, v in enumerate(stencils.vectors) if abs(v[0]) + abs(v[1]) == 1]
    total = np.ones(n)
    for d in axis:
        total += ones[stencils.nbr[d, 0]] + ones[stencils.nbr[d, 1]]
    return total / (1 + 2 * len(axis))


def principal_eigen(
    grid: Grid,
    stencils: StencilSet,
    ell: EllipticityPair,
    tol: float = 1e-6,
    max_iter: int = 200,
) -> SolveReport:
    """Principal eigenpair of ``-M+_h`` by normalized inverse power iteration.

    ``u_{k+1} = howard_solve(u_k)`` and ``mu_k = |u_k|_inf / |u_{k+1}|_inf``.
    Positive 1-homogeneity of M+ makes the normalization legitimate.  The
    report also carries the Collatz-Wielandt bracket
    ``min(u_k/u_{k+1}) <= mu <= max(u_k/u_{k+1})`` of the final step.
    """
    if not grid.connected:
        raise GridError("principal eigenvalue requires a connected interior")
    n = grid.n_interior
    ws = _Workspace()
    u = _initial_iterate(stencils, n)
    u /= u.max()
    mu_prev = math.nan
    history: list[float] = []
    converged = False
    mu = math.nan
    it = 0
    lower = upper = math.nan
    for it in range(1, max_iter + 1):
        w = howard_solve(grid, stencils, ell, u, workspace=ws)
        wmax = float(w.max())
        mu = float(u.max()) / wmax
        ratio = u / w
        lower, upper = float(ratio.min()), float(ratio.max())
        u = w / wmax
        res = float(np.max(np.abs(discrete_pucci_plus(grid, stencils, u, ell) + mu * u)))
        history.append(res)
        if it > 1 and abs(mu - mu_prev) <= tol * mu:
            converged = True
            break
        mu_prev = mu
    if not converged:
        log.warning("inverse iteration stopped after %d steps without converging", max_iter)
    return SolveReport(
        mu=mu,
        eigenfield=u,
        iterations=it,
        residual_history=history,
        h=grid.h,
        W=stencils.W,
        certified_monotone=stencils.certified_monotone,
        converged=converged,
        residual=history[-1] if history else math.nan,
        mu_lower=lower,
        mu_upper=upper,
        policy_iterations=ws.policy_iterations,
        n_interior=n,
    )


def rescale_eigenvalue(mu: float, delta: float) -> float:
    """Principal eigenvalue of ``delta * Omega`` given that of ``Omega``."""
    if not delta > 0:
        raise ParameterError(f"scale factor must be positive, got {delta}")
    return mu / delta**2


def normalized_eigenvalue(mu: float, area: float) -> float:
    """Eigenvalue of ``Omega / sqrt(|Omega|)``, i.e. ``|Omega| * mu(Omega)``."""
    return rescale_eigenvalue(mu, 1.0 / math.sqrt(area))
