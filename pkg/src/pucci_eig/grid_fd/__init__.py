"""Monotone wide-stencil finite differences for the principal eigenvalue of M+."""

from pucci_eig.grid_fd.grid import Grid, StencilSet, build_grid, direction_pairs, max_angular_gap
from pucci_eig.grid_fd.scheme import (
    PolicyState,
    assemble,
    check_m_matrix,
    discrete_pucci_plus,
    improve_policy,
    second_differences,
)
from pucci_eig.grid_fd.solvers import (
    SolveReport,
    howard_solve,
    normalized_eigenvalue,
    principal_eigen,
    rescale_eigenvalue,
)
