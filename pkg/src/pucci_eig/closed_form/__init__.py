"""Explicit domains, eigenfunctions, areas and the periodic extension."""

from pucci_eig.closed_form.area import area, area_derivative_gamma, area_omega_gamma, gamma_grid
from pucci_eig.closed_form.domains import (
    HALF_PI,
    DomainSpec,
    OmegaGamma,
    Scaled,
    Sheared,
    Square,
    check_admissible,
    contains,
    domain_omega,
    gamma_range,
    phi,
    phi_inverse_identity_check,
    shear_matrix,
    support_halfwidth,
)
from pucci_eig.closed_form.eigenfunction import (
    CornerReport,
    PiecewiseEigenfunction,
    RegionTag,
    corner_asymptotics_check,
    eigenfunction_hessian,
    eigenfunction_value,
    profile,
    region,
    residual,
    separable_candidate_residual,
)
from pucci_eig.closed_form.periodic import (
    ComponentClass,
    component_class,
    period,
    periodic_extension_gradient,
    periodic_extension_hessian,
    periodic_extension_value,
    periodic_region,
    periodic_residual,
    positive_components_bounded,
)
from pucci_eig.closed_form.sampling import sample_points

