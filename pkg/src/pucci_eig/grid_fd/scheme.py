"""
Monotone discretization of M+ in Bellman form.

For an orthonormal frame (e1, e2) and A = a1 e1 e1^T + a2 e2 e2^T with
a_i in {lam, Lam}, trace(A X) <= M+(X), with equality on the eigenframe.
The discrete operator replaces the frame by lattice direction pairs and the
directional curvatures by (possibly cut) second differences:

    M+_h u(p) = max_k  F(D_{v_k} u(p)) + F(D_{v_k^perp} u(p)),
    F(t) = Lam * t if t > 0 else lam * t.

A policy fixes the pair index and the two coefficients at every point, which
turns ``-M+_h`` into a linear M-matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from pucci_eig.errors import MonotonicityError
from pucci_eig.grid_fd.grid import Grid, StencilSet
from pucci_eig.pucci_core import EllipticityPair


@dataclass(frozen=True, eq=False)
class PolicyState:
    pair: np.ndarray  # (n,) index of the selected direction pair
    coef: np.ndarray  # (n, 2) coefficient in {lam, Lam} for v and v_perp

    def same_as(self, other: "PolicyState | None") -> bool:
        return (
            other is not None
            and np.array_equal(self.pair, other.pair)
            and np.array_equal(self.coef, other.coef)
        )


def second_differences(stencils: StencilSet, field: np.ndarray) -> np.ndarray:
    """Second differences along every stencil direction, shape ``(n_dir, n)``."""
    u = np.asarray(field, dtype=float)
    ext = np.append(u, 0.0)  # ghost zero at cut points
    nb = ext[stencils.nbr]  # (n_dir, 2, n)
    return np.sum(stencils.coef * (nb - u), axis=1)


def _frame_values(stencils: StencilSet, ell: EllipticityPair, field):
    d2 = second_differences(stencils, field)
    f = np.where(d2 > 0.0, ell.Lam * d2, ell.lam * d2)
    per_pair = f[stencils.pairs[:, 0]] + f[stencils.pairs[:, 1]]
    return d2, per_pair


def discrete_pucci_plus(grid: Grid, stencils: StencilSet, field, ell: EllipticityPair) -> np.ndarray:
    """``M+_h`` applied to a field given on the interior points (zero Dirichlet data)."""
    _, per_pair = _frame_values(stencils, ell, field)
    return per_pair.max(axis=0)


def improve_policy(stencils: StencilSet, ell: EllipticityPair, field) -> PolicyState:
    """Pointwise argmax of the frame values; the lowest pair index wins ties."""
    d2, per_pair = _frame_values(stencils, ell, field)
    k = np.argmax(per_pair, axis=0)
    cols = np.arange(d2.shape[1])
    dirs = stencils.pairs[k]  # (n, 2)
    chosen = d2[dirs, cols[:, None]]
    coef = np.where(chosen > 0.0, ell.Lam, ell.lam)
    return PolicyState(pair=k, coef=coef)


def assemble(stencils: StencilSet, policy: PolicyState, n: int, check: bool = True) -> sparse.csr_matrix:
    """Matrix of ``-L_policy`` (diagonal positive, off-diagonal non-positive)."""
    rows, cols, vals = [], [], []
    ar = np.arange(n)
    dirs = stencils.pairs[policy.pair]
    diag = np.zeros(n)
    for slot in range(2):
        d = dirs[:, slot]
        a = policy.coef[:, slot]
        for k in range(2):
            c = a * stencils.coef[d, k, ar]
            m = stencils.nbr[d, k, ar]
            diag += c
            live = m < n
            rows.append(ar[live])
            cols.append(m[live])
            vals.append(-c[live])
    rows.append(ar)
    cols.append(ar)
    vals.append(diag)
    mat = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    if check:
        check_m_matrix(mat)
    return mat


def check_m_matrix(mat: sparse.spmatrix) -> None:
    """Z-matrix with non-negative row sums and at least one strictly dominant row."""
    coo = mat.tocoo()
    off = coo.row != coo.col
    if np.any(coo.data[off] > 0.0):
        raise MonotonicityError("positive off-diagonal entry in assembled operator")
    d = mat.diagonal()
    if np.any(d <= 0.0):
        raise MonotonicityError("non-positive diagonal entry in assembled operator")
    row_sums = np.asarray(mat.sum(axis=1)).ravel()
    scale = d.max()
    if np.any(row_sums < -1e-12 * scale) or not np.any(row_sums > 1e-12 * scale):
        raise MonotonicityError("assembled operator is not diagonally dominant")
