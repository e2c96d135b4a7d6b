import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from oracles import hess_ref, phi_ref, u_ref

from pucci_eig.closed_form import (
    HALF_PI,
    OmegaGamma,
    PiecewiseEigenfunction,
    RegionTag,
    Scaled,
    Sheared,
    Square,
    contains,
    domain_omega,
    corner_asymptotics_check,
    eigenfunction_hessian,
    eigenfunction_value,
    phi,
    phi_inverse_identity_check,
    region,
    residual,
    sample_points,
    separable_candidate_residual,
    shear_matrix,
    support_halfwidth,
)
from pucci_eig.errors import DomainError, ParameterError, UnsupportedError
from pucci_eig.pucci_core import EllipticityPair, pucci_plus

SQRT2 = math.sqrt(2.0)


@st.composite
def omega_gamma(draw, omega_max=16.0):
    omega = draw(st.floats(1.0, omega_max))
    r = math.sqrt(omega)
    t = draw(st.floats(-1.0, 1.0))
    return omega, r**t  # log-uniform over the admissible range


def ell_for(omega, lam=1.0):
    return EllipticityPair.from_omega(omega, lam)


# ---------------------------------------------------------------- profile

def test_phi_examples():
    assert phi(1.0, 1.0, 0.0) == pytest.approx(math.pi, abs=1e-15)
    assert phi(1.0, 1.0, 3 * math.pi / 4) == pytest.approx(math.pi / 4, abs=1e-15)


@given(omega_gamma())
def test_phi_vanishes_at_endpoint(og):
    omega, gamma = og
    assert phi(omega, gamma, support_halfwidth(omega, gamma)) == pytest.approx(0.0, abs=1e-7)


@given(omega_gamma(), st.floats(0.0, 0.999))
def test_phi_matches_reference(og, t):
    omega, gamma = og
    x = t * support_halfwidth(omega, gamma)
    assert phi(omega, gamma, x) == pytest.approx(phi_ref(omega, gamma, x), abs=1e-13)
    assert phi(omega, gamma, -x) == phi(omega, gamma, x)
    assert phi(omega, gamma, x) > 0


def test_phi_errors():
    with pytest.raises(ParameterError):
        phi(2.0, 3.0, 0.0)
    with pytest.raises(ParameterError):
        phi(0.5, 1.0, 0.0)
    with pytest.raises(DomainError):
        phi(2.0, 1.0, support_halfwidth(2.0, 1.0) + 0.1)


@pytest.mark.parametrize("omega, gamma", [(4.0, 1.3), (1.0, 1.0), (2.0, SQRT2), (2.0, 1 / SQRT2)])
def test_phi_inverse_identity(omega, gamma):
    assert phi_inverse_identity_check(omega, gamma, 1000) <= 1e-10


def test_shear_matrix():
    c, ci = shear_matrix(0.0)
    np.testing.assert_array_equal(c, np.eye(2))
    c, ci = shear_matrix(math.pi / 2)
    np.testing.assert_allclose(c, [[math.sqrt(3) / 2, 0], [0.5, 1]], atol=1e-15)
    assert np.linalg.det(c) == pytest.approx(math.sqrt(3) / 2, rel=1e-14)
    np.testing.assert_allclose(c @ ci, np.eye(2), atol=1e-14)
    with pytest.raises(ParameterError):
        shear_matrix(math.pi)


# ---------------------------------------------------------------- domains

def test_contains_examples():
    assert contains(OmegaGamma(2.0, 1.0), (0.0, 0.0))
    sq = OmegaGamma(1.0, 1.0)
    assert not contains(sq, (math.pi, 0.0))
    # |x| + |y| = pi exactly: a boundary point of the rotated square
    assert not contains(sq, (HALF_PI, HALF_PI))
    assert contains(sq, (HALF_PI - 1e-9, HALF_PI - 1e-9))
    s = Sheared(2.0, 1.0, HALF_PI)
    p = np.array([1.0, 0.7])
    assert OmegaGamma(2.0, 1.0).contains(*p)
    assert contains(s, s.push_forward(*p))


@given(omega_gamma(), st.floats(-6, 6), st.floats(-6, 6))
def test_contains_swap_symmetry(og, x, y):
    omega, gamma = og
    a = OmegaGamma(omega, 1.0 / gamma) if 1.0 / gamma <= math.sqrt(omega) else None
    assume(a is not None)
    assert contains(a, (x, y)) == contains(OmegaGamma(omega, gamma), (y, x))


def test_rotated_square_is_l1_ball():
    rng = np.random.default_rng(1)
    pts = rng.uniform(-3.5, 3.5, (5000, 2))
    got = OmegaGamma(1.0, 1.0).contains(pts[:, 0], pts[:, 1])
    ref = np.abs(pts).sum(1) < math.pi
    margin = np.abs(np.abs(pts).sum(1) - math.pi) > 1e-12
    np.testing.assert_array_equal(got[margin], ref[margin])


def test_scaled_contains():
    base = OmegaGamma(2.0, 1.0)
    s = Scaled(base, 2.0)
    assert s.contains(2 * 2.0, 0.0) == base.contains(2.0, 0.0)
    with pytest.raises(ParameterError):
        Scaled(base, -1.0)


def test_invalid_specs():
    with pytest.raises(ParameterError):
        OmegaGamma(2.0, 2.0)
    with pytest.raises(ParameterError):
        Sheared(2.0, 1.0, 4.0)
    with pytest.raises(ParameterError):
        Square(0.0)


# ---------------------------------------------------------------- eigenfunction

def test_value_examples():
    f = PiecewiseEigenfunction(OmegaGamma(2.0, 1.0), ell_for(2.0))
    assert eigenfunction_value(f, (0.0, 0.0)) == 2.0
    g = PiecewiseEigenfunction(OmegaGamma(4.0, 2.0), ell_for(4.0))
    top = HALF_PI + 2 * math.asin(1.0)
    assert eigenfunction_value(g, (0.0, top)) == pytest.approx(0.0, abs=1e-15)


def test_rotated_square_factorization():
    f = PiecewiseEigenfunction(OmegaGamma(1.0, 1.0), ell_for(1.0))
    rng = np.random.default_rng(3)
    p = rng.uniform(-HALF_PI, HALF_PI, (200, 2))
    x, y = p[:, 0], p[:, 1]
    np.testing.assert_allclose(f.value(p), 2 * np.cos((x + y) / 2) * np.cos((x - y) / 2), atol=1e-14)


def test_hessian_examples():
    f = PiecewiseEigenfunction(OmegaGamma(2.0, 1.0), ell_for(2.0))
    H = eigenfunction_hessian(f, (0.0, 0.0))
    assert (H.xx, H.xy, H.yy) == (-1.0, 0.0, -1.0)
    H = eigenfunction_hessian(f, (HALF_PI, 0.0))
    assert H.xx == pytest.approx(0.0, abs=1e-16)
    assert H.yy == -1.0
    # the outer-branch formula gives the same limit
    assert hess_ref(2.0, 1.0, HALF_PI + 1e-12, 0.0)[0] == pytest.approx(0.0, abs=1e-12)


@given(omega_gamma(), st.floats(0.0, 0.999), st.floats(-0.999, 0.999))
def test_value_and_hessian_match_reference(og, s, t):
    omega, gamma = og
    dom = OmegaGamma(omega, gamma)
    x = s * support_halfwidth(omega, gamma)
    y = t * phi(omega, gamma, x)
    f = PiecewiseEigenfunction(dom, ell_for(omega))
    assert f.value((x, y)) == pytest.approx(u_ref(omega, gamma, x, y), abs=1e-13)
    H = f.hessian((x, y))
    hx, hy = hess_ref(omega, gamma, x, y)
    assert H.xx == pytest.approx(hx, abs=1e-13)
    assert H.yy == pytest.approx(hy, abs=1e-13)
    assert H.xy == 0.0


@pytest.mark.parametrize("spec", [OmegaGamma(2.0, 1.0), OmegaGamma(3.0, 0.7), Sheared(2.0, 1.2, 1.0),
                                  Scaled(Sheared(4.0, 0.8, -2.0), 0.5)])
def test_hessian_and_gradient_match_finite_differences(spec):
    f = PiecewiseEigenfunction(spec, ell_for(domain_omega(spec)))
    pts = sample_points(spec, 200, seed=5)[:200]
    h = 1e-4
    e1, e2 = np.array([h, 0.0]), np.array([0.0, h])
    u = lambda p: np.asarray(f.value(p))  # noqa: E731
    g = np.asarray(f.gradient(pts))
    gx = (u(pts + e1) - u(pts - e1)) / (2 * h)
    gy = (u(pts + e2) - u(pts - e2)) / (2 * h)
    inside = spec.contains(*(pts + 2 * e1).T) & spec.contains(*(pts - 2 * e1).T) \
        & spec.contains(*(pts + 2 * e2).T) & spec.contains(*(pts - 2 * e2).T)
    np.testing.assert_allclose(g[inside, 0], gx[inside], atol=1e-7)
    np.testing.assert_allclose(g[inside, 1], gy[inside], atol=1e-7)
    H = f.hessian(pts)
    hxx = (u(pts + e1) - 2 * u(pts) + u(pts - e1)) / h**2
    hyy = (u(pts + e2) - 2 * u(pts) + u(pts - e2)) / h**2
    hxy = (u(pts + e1 + e2) - u(pts + e1 - e2) - u(pts - e1 + e2) + u(pts - e1 - e2)) / (4 * h * h)
    for a, b in ((H.xx, hxx), (H.yy, hyy), (H.xy, hxy)):
        np.testing.assert_allclose(np.asarray(a)[inside], b[inside], atol=2e-4)


@given(omega_gamma(), st.floats(-math.pi + 0.01, math.pi - 0.01), st.floats(0, 0.999), st.floats(-0.999, 0.999))
def test_sheared_hessian_determinant(og, a, s, t):
    omega, gamma = og
    base = OmegaGamma(omega, gamma)
    X = s * support_halfwidth(omega, gamma)
    Y = t * phi(omega, gamma, X)
    sh = Sheared(omega, gamma, a)
    ell = ell_for(omega)
    fs = PiecewiseEigenfunction(sh, ell)
    fb = PiecewiseEigenfunction(base, ell)
    p = sh.push_forward(X, Y)
    lhs = fs.hessian(p).det
    rhs = math.pi**2 / (math.pi**2 - a * a) * fb.hessian((X, Y)).det
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)
    assert fs.value(p) == pytest.approx(fb.value((X, Y)), abs=1e-14)


DOMAINS = [OmegaGamma(2.0, 1.0), OmegaGamma(2.0, SQRT2), OmegaGamma(4.0, 0.5), OmegaGamma(1.0, 1.0),
           Sheared(2.0, 1.0, HALF_PI), Scaled(OmegaGamma(3.0, 1.2), 0.3)]


@pytest.mark.parametrize("spec", DOMAINS, ids=repr)
def test_boundary_vanishing(spec):
    f = PiecewiseEigenfunction(spec, ell_for(domain_omega(spec)))
    b = spec.boundary(25)
    assert len(b) == 100
    assert np.max(np.abs(f.value(b))) <= 1e-11


@pytest.mark.parametrize("spec", DOMAINS, ids=repr)
def test_interior_positivity(spec):
    f = PiecewiseEigenfunction(spec, ell_for(domain_omega(spec)))
    pts = sample_points(spec, 3000, seed=1)
    assert np.all(np.asarray(f.value(pts)) > 0)


@given(omega_gamma(), st.floats(0, 0.999), st.floats(-0.999, 0.999))
def test_symmetries(og, s, t):
    omega, gamma = og
    x = s * support_halfwidth(omega, gamma)
    y = t * phi(omega, gamma, x)
    f = PiecewiseEigenfunction(OmegaGamma(omega, gamma), ell_for(omega))
    v = f.value((x, y))
    assert f.value((-x, y)) == v
    assert f.value((x, -y)) == v
    g1 = PiecewiseEigenfunction(OmegaGamma(omega, 1.0), ell_for(omega))
    if OmegaGamma(omega, 1.0).contains(y, x):
        assert g1.value((y, x)) == pytest.approx(g1.value((x, y)), abs=1e-15)


@pytest.mark.parametrize("omega, gamma", [(2.0, 1.0), (4.0, 0.6), (9.0, 2.5)])
def test_c1_matching_across_interfaces(omega, gamma):
    f = PiecewiseEigenfunction(OmegaGamma(omega, gamma), ell_for(omega))
    r = math.sqrt(omega)
    along = np.linspace(-1.4, 1.4, 11)
    for side in (HALF_PI, -HALF_PI):
        pts = np.stack([np.full_like(along, side), along], -1)
        pts = pts[f.spec.contains(*pts.T)]
        # x-derivative of each branch formula at |x| = pi/2
        inner = -gamma * np.sin(pts[:, 0])
        outer = -gamma * np.sign(pts[:, 0]) * np.cos((np.abs(pts[:, 0]) - HALF_PI) / r)
        np.testing.assert_allclose(inner, outer, atol=1e-11)
        np.testing.assert_allclose(np.asarray(f.gradient(pts))[:, 0], inner, atol=1e-11)
        swapped = pts[:, ::-1]
        swapped = swapped[f.spec.contains(*swapped.T)]
        inner = -np.sin(swapped[:, 1])
        outer = -np.sign(swapped[:, 1]) * np.cos((np.abs(swapped[:, 1]) - HALF_PI) / r)
        np.testing.assert_allclose(inner, outer, atol=1e-11)
        np.testing.assert_allclose(np.asarray(f.gradient(swapped))[:, 1], inner, atol=1e-11)


@pytest.mark.parametrize("omega, gamma", [(2.0, 1.0), (4.0, 0.6)])
def test_hessian_interface_continuity(omega, gamma):
    for y in (0.0, 0.3, -0.9):
        lhs = hess_ref(omega, gamma, HALF_PI, y)
        rhs = hess_ref(omega, gamma, math.nextafter(HALF_PI, 4.0), y)
        assert lhs == pytest.approx(rhs, abs=1e-15)
        f = PiecewiseEigenfunction(OmegaGamma(omega, gamma), ell_for(omega))
        H = f.hessian((HALF_PI, y))
        assert H.xx == pytest.approx(0.0, abs=1e-15)


def test_region_tags():
    f = PiecewiseEigenfunction(OmegaGamma(2.0, 1.0), ell_for(2.0))
    assert region(f, (0.0, 0.0)) == RegionTag.CENTRAL_SQUARE
    assert region(f, (HALF_PI, 0.0)) == RegionTag.CENTRAL_SQUARE
    assert region(f, (2.0, 0.0)) == RegionTag.EAST_WEST
    assert region(f, (0.0, -2.0)) == RegionTag.NORTH_SOUTH
    assert region(f, (10.0, 0.0)) == RegionTag.OUTSIDE


def test_evaluation_errors():
    f = PiecewiseEigenfunction(OmegaGamma(2.0, 1.0), ell_for(2.0))
    with pytest.raises(DomainError):
        f.value((10.0, 0.0))
    with pytest.raises(UnsupportedError):
        PiecewiseEigenfunction(Square(1.0), ell_for(1.0))
    with pytest.raises(ParameterError):
        PiecewiseEigenfunction(OmegaGamma(2.0, 1.0), ell_for(3.0))


# ---------------------------------------------------------------- residuals

@pytest.mark.parametrize("lam", [0.5, 1.0, 3.0])
@given(og=omega_gamma())
def test_eigen_residual_vanishes(lam, og):
    omega, gamma = og
    spec = OmegaGamma(omega, gamma)
    f = PiecewiseEigenfunction(spec, ell_for(omega, lam))
    pts = sample_points(spec, 300, seed=0)
    res = np.asarray(residual(f, lam, pts))
    scale = lam * omega * np.max(np.abs(f.value(pts)))
    assert np.max(np.abs(res)) <= 1e-11 * max(scale, 1.0)


@pytest.mark.parametrize("a", [0.5, HALF_PI, -2.5])
def test_sheared_is_strict_supersolution(a):
    spec = Sheared(2.0, 1.0, a)
    ell = ell_for(2.0)
    f = PiecewiseEigenfunction(spec, ell)
    mu = math.pi**2 / (math.pi**2 - a * a)
    assert f.eigenvalue == pytest.approx(mu)
    res = np.asarray(residual(f, mu, sample_points(spec, 2000, seed=2)))
    assert res.max() <= 1e-12
    assert res.min() < -1e-3


def test_sheared_equality_when_laplacian():
    spec = Sheared(1.0, 1.0, HALF_PI)
    f = PiecewiseEigenfunction(spec, ell_for(1.0))
    res = np.asarray(residual(f, 4.0 / 3.0, sample_points(spec, 2000, seed=2)))
    assert np.max(np.abs(res)) <= 1e-12


def test_scaled_eigenvalue():
    f = PiecewiseEigenfunction(Scaled(OmegaGamma(2.0, 1.0), 2.0), ell_for(2.0))
    assert f.eigenvalue == 0.25
    pts = sample_points(f.spec, 500)
    assert np.max(np.abs(residual(f, 0.25, pts))) <= 1e-12


# ---------------------------------------------------------------- separable candidate

def _defect_oracle(lam, Lam, x):
    # Hessian of cos(x/sqrt2) cos(y/sqrt2) on the diagonal, eigenvalues by LAPACK
    c, s = math.cos(x / SQRT2), math.sin(x / SQRT2)
    H = 0.5 * np.array([[-c * c, s * s], [s * s, -c * c]])
    e = np.linalg.eigvalsh(H)
    mplus = sum(Lam * v if v > 0 else lam * v for v in e)
    return -mplus - lam * c * c


@given(st.floats(math.pi / (2 * SQRT2), math.pi / SQRT2, exclude_max=True), st.floats(1.0, 10.0))
def test_separable_defect_matches_oracle(x, omega):
    ell = EllipticityPair(1.0, omega)
    assert separable_candidate_residual(ell, x) == pytest.approx(_defect_oracle(1.0, omega, x), abs=1e-12)
    c2 = math.cos(x / SQRT2) ** 2
    assert separable_candidate_residual(ell, x) == pytest.approx((omega - 1.0) * (c2 - 0.5), abs=1e-12)


def test_separable_defect_laplacian_case():
    x = np.linspace(math.pi / (2 * SQRT2), math.pi / SQRT2, 50, endpoint=False)
    assert np.max(np.abs(separable_candidate_residual(EllipticityPair(1.0, 1.0), x))) <= 1e-15


def test_separable_defect_band():
    with pytest.raises(DomainError):
        separable_candidate_residual(EllipticityPair(1.0, 2.0), 0.1)
    with pytest.raises(DomainError):
        separable_candidate_residual(EllipticityPair(1.0, 2.0), math.pi / SQRT2)


def test_separable_defect_at_three_eighths():
    # x / sqrt2 = 3 pi / 8
    d = separable_candidate_residual(EllipticityPair(1.0, 2.0), 3 * math.pi / 8 * SQRT2)
    assert d == pytest.approx(math.cos(3 * math.pi / 8) ** 2 - 0.5, abs=1e-15)
    assert d == pytest.approx(-math.sqrt(2) / 4, abs=1e-15)


# ---------------------------------------------------------------- corner

@pytest.mark.parametrize("omega", [1.0, 2.0, 4.0, 9.0])
def test_corner_ratio_limit(omega):
    rep = corner_asymptotics_check(ell_for(omega))
    assert rep.min_ratio > 0
    assert rep.stability < 0.05
    # the ratio tends to 1/(2 sqrt(omega)) (the normal derivative of u at the corner is zero
    # and both functions are quadratic along the cone sides)
    assert rep.ratios[-1] == pytest.approx(1 / (2 * math.sqrt(omega)), rel=1e-6)


def test_corner_factorization_for_laplacian():
    # omega = 1: u = 2 cos((x+y)/2) cos((x-y)/2) near the corner (0, pi)
    f = PiecewiseEigenfunction(OmegaGamma(1.0, 1.0), ell_for(1.0))
    x, y = 1e-3, math.pi - 2e-3
    assert f.value((x, y)) == pytest.approx(2 * math.cos((x + y) / 2) * math.cos((x - y) / 2), abs=1e-15)
