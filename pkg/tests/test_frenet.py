import math

import numpy as np
import pytest

from surf4d.errors import NotGeneralType
from surf4d.frenet import (
    flat_normal_connection_test,
    frenet_coefficients,
    geometric_frame,
    integrability_residuals,
    point_residuals,
    sigma_bilinear,
)

from conftest import chart_of, full_point

GENERAL_POINTS = [
    ("rot-generic", 1.0, 2.0),
    ("rot-generic", 2.5, 0.7),
    ("clifford", 0.4, 1.1),
    ("parabolic-graph", 0.3, -0.2),
]


@pytest.mark.parametrize("name,u,v", GENERAL_POINTS)
def test_frame_is_orthonormal(name, u, v):
    fd = frenet_coefficients(chart_of(name), u, v)
    vecs = [fd.frame.x, fd.frame.y, fd.frame.b, fd.frame.l]
    for i, a in enumerate(vecs):
        for j, b in enumerate(vecs):
            want = 1.0 if i == j else 0.0
            assert float(a @ b) == pytest.approx(want, abs=1e-10)


@pytest.mark.parametrize("name,u,v", GENERAL_POINTS)
def test_tangent_normal_split(name, u, v):
    jet, met, frame, sff, wf, inv = full_point(chart_of(name), u, v)
    fd = frenet_coefficients(chart_of(name), u, v)
    # x and y live in the tangent plane, b and l in the normal plane
    for w in (fd.frame.x, fd.frame.y):
        assert abs(w @ frame.e1) + abs(w @ frame.e2) <= 1e-9
    for w in (fd.frame.b, fd.frame.l):
        assert abs(w @ jet.zu) + abs(w @ jet.zv) <= 1e-9


@pytest.mark.parametrize("name,u,v", GENERAL_POINTS)
def test_b_is_the_mean_curvature_direction(name, u, v):
    from surf4d.invariants import mean_curvature_vector

    jet, met, frame, sff, wf, inv = full_point(chart_of(name), u, v)
    fd = frenet_coefficients(chart_of(name), u, v)
    H = mean_curvature_vector(met, sff)
    np.testing.assert_allclose(fd.frame.b, H / np.linalg.norm(H), atol=1e-9)
    assert fd.mean_norm == pytest.approx(np.linalg.norm(H), rel=1e-10)


@pytest.mark.parametrize("name,u,v", GENERAL_POINTS)
def test_sigma_xx_has_no_l_component(name, u, v):
    jet, met, frame, sff, wf, inv = full_point(chart_of(name), u, v)
    fd = frenet_coefficients(chart_of(name), u, v)
    sxx = sigma_bilinear(sff, fd.frame.x_coeffs, fd.frame.x_coeffs)
    syy = sigma_bilinear(sff, fd.frame.y_coeffs, fd.frame.y_coeffs)
    assert abs(float(sxx @ fd.frame.l)) <= 1e-9 * inv.scale
    assert abs(float(syy @ fd.frame.l)) <= 1e-9 * inv.scale


@pytest.mark.parametrize("name,u,v", GENERAL_POINTS)
def test_coefficient_identities(name, u, v):
    fd = frenet_coefficients(chart_of(name), u, v)
    inv = fd.invariants
    s2 = inv.scale * inv.scale
    assert inv.k == pytest.approx(-4 * fd.nu1 * fd.nu2 * fd.mu ** 2,
                                  abs=1e-10 * s2)
    assert inv.kappa == pytest.approx((fd.nu1 - fd.nu2) * fd.mu,
                                      abs=1e-10 * s2)
    assert inv.gauss_K == pytest.approx(
        fd.nu1 * fd.nu2 - fd.lam ** 2 - fd.mu ** 2, abs=1e-10 * s2)
    disc = math.sqrt(max(inv.kappa ** 2 - inv.k, 0.0))
    assert fd.mean_norm == pytest.approx(disc / (2 * abs(fd.mu)), rel=1e-9)


def test_parabolic_origin_frozen_coefficients():
    fd = frenet_coefficients(chart_of("parabolic-graph"), 0.0, 0.0)
    assert fd.nu1 == pytest.approx(1.0, abs=1e-10)
    assert fd.nu2 == pytest.approx(0.0, abs=1e-10)
    assert fd.lam == pytest.approx(0.0, abs=1e-10)
    assert fd.mu == pytest.approx(-1.0, abs=1e-10)
    np.testing.assert_allclose(fd.frame.x, [1, 0, 0, 0], atol=1e-10)
    np.testing.assert_allclose(fd.frame.y, [0, 1, 0, 0], atol=1e-10)
    np.testing.assert_allclose(fd.frame.b, [0, 0, 0, 1], atol=1e-10)
    np.testing.assert_allclose(fd.frame.l, [0, 0, -1, 0], atol=1e-10)
    for c in (fd.beta1, fd.beta2, fd.gamma1, fd.gamma2):
        assert c == pytest.approx(0.0, abs=1e-6)


def test_frame_rejects_flat_and_minimal_points():
    jet, met, frame, sff, wf, inv = full_point(chart_of("plane"), 0.0, 0.0)
    with pytest.raises(NotGeneralType):
        geometric_frame(jet, met, wf, sff)
    jet, met, frame, sff, wf, inv = full_point(chart_of("minimal-graph"),
                                               0.0, 0.0)
    with pytest.raises(NotGeneralType):
        geometric_frame(jet, met, wf, sff)


@pytest.mark.parametrize("name,u,v", GENERAL_POINTS)
def test_point_residuals_are_small(name, u, v):
    res = point_residuals(chart_of(name), u, v)
    for key, value in res.items():
        assert abs(value) <= 1e-6, f"{key} = {value}"


def test_residuals_shrink_with_the_step():
    # in the truncation-dominated regime halving the step divides the
    # second-order error by about four
    a = point_residuals(chart_of("rot-generic"), 1.0, 2.0, h_frame=4e-3)
    b = point_residuals(chart_of("rot-generic"), 1.0, 2.0, h_frame=2e-3)
    worst_a = max(abs(x) for x in a.values())
    worst_b = max(abs(x) for x in b.values())
    assert worst_b < worst_a
    assert worst_a / worst_b > 2.5


def test_integrability_grid_report():
    rep = integrability_residuals(chart_of("rot-generic"), grid=(8, 8))
    assert rep.evaluated == 64
    assert rep.skipped == 0
    assert rep.worst <= 1e-6
    for name, value in rep.residuals.items():
        assert abs(value) <= 1e-6, name


def test_integrability_skips_flat_surface():
    rep = integrability_residuals(chart_of("plane"), grid=(3, 3))
    assert rep.evaluated == 0
    assert rep.skipped == 9


def test_integrability_accepts_explicit_points():
    rep = integrability_residuals(chart_of("clifford"),
                                  grid=[(0.5, 0.5), (1.0, 2.0)])
    assert rep.evaluated == 2
    assert rep.worst <= 1e-6


def test_normal_connection_flat_iff_kappa_vanishes():
    rep = flat_normal_connection_test(chart_of("rot-generic"), grid=(5, 5))
    assert rep.flat
    assert rep.max_abs_kappa <= 1e-12
    rep = flat_normal_connection_test(chart_of("parabolic-graph"),
                                      grid=(5, 5))
    assert not rep.flat
    assert rep.max_abs_kappa == pytest.approx(1.0, rel=0.2)


def test_sigma_bilinear_is_symmetric(rng):
    jet, met, frame, sff, wf, inv = full_point(chart_of("rot-generic"),
                                               1.2, 0.5)
    for _ in range(5):
        a = rng.normal(size=2)
        b = rng.normal(size=2)
        np.testing.assert_allclose(sigma_bilinear(sff, a, b),
                                   sigma_bilinear(sff, b, a), atol=1e-12)
