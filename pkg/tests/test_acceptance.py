"""End-to-end acceptance checks, one behaviour per test.

Run with `pytest -v tests/test_acceptance.py` to get one pass/fail line
per criterion.  Tolerances are part of the contract and are asserted
exactly as stated in each test.
"""

import math

import numpy as np
import pytest

from surf4d.catalog import (
    constant_k_family,
    get_fixture,
    rotational_closed_forms,
)
from surf4d.charts import eval_jet2, metric
from surf4d.errors import NotGeneralType
from surf4d.frenet import frenet_coefficients, integrability_residuals
from surf4d.invariants import (
    FlatVerdict,
    PointClass,
    characteristic_roots,
    flat_point_analysis,
    invariant_set,
    mean_curvature_vector,
    principal_directions,
    second_fundamental,
    weingarten,
)
from surf4d.transforms import reparametrization_at, rotated_frame

from conftest import chart_of, full_point, invariants_at

ROT = get_fixture("rot-generic")


def _rot_samples(n_u=16, n_v=4):
    us = np.linspace(*ROT.meridian.u_range, n_u + 2)[1:-1]
    vs = np.linspace(0.0, 2 * math.pi, n_v + 2)[1:-1]
    return [(float(u), float(v)) for u in us for v in vs]


def test_rotational_invariants_match_closed_forms_with_exact_jets():
    points = _rot_samples()
    assert len(points) == 64
    for u, v in points:
        cf = rotational_closed_forms(ROT.meridian, u)
        inv = invariants_at(ROT.chart, u, v)
        assert abs(inv.k - cf["k"]) <= 1e-8 * (1 + abs(cf["k"]))
        assert abs(inv.kappa - cf["kappa"]) <= 1e-8 * (1 + abs(cf["kappa"]))
        assert abs(inv.gauss_K - cf["K"]) <= 1e-8 * (1 + abs(cf["K"]))


def test_rotational_invariants_match_closed_forms_with_fd_jets():
    fd_chart = ROT.chart.with_fd()
    for u, v in _rot_samples(8, 3):
        cf = rotational_closed_forms(ROT.meridian, u)
        inv = invariants_at(fd_chart, u, v)
        assert abs(inv.k - cf["k"]) <= 1e-4 * (1 + abs(cf["k"]))
        assert abs(inv.kappa - cf["kappa"]) <= 1e-4 * (1 + abs(cf["kappa"]))
        assert abs(inv.gauss_K - cf["K"]) <= 1e-4 * (1 + abs(cf["K"]))


def test_rotational_charts_have_vanishing_kappa():
    for u, v in _rot_samples(10, 3):
        assert abs(invariants_at(ROT.chart, u, v).kappa) <= 1e-9
    ck = get_fixture("constant-k")
    for u in np.linspace(0.2, 2.8, 7):
        assert abs(invariants_at(ck.chart, float(u), 1.0).kappa) <= 1e-9


def test_torus_invariants_and_principal_tangents():
    chart = chart_of("clifford")
    for u in np.linspace(0.2, 6.0, 6):
        for v in np.linspace(0.2, 6.0, 6):
            jet, met, frame, sff, wf, inv = full_point(chart, float(u),
                                                       float(v))
            assert abs(inv.k + 1.0) <= 1e-9
            assert abs(inv.kappa) <= 1e-9
            assert abs(inv.gauss_K) <= 1e-9
            assert inv.point_class is PointClass.HYPERBOLIC
            x, y = principal_directions(met, wf)
            got = {tuple(np.round(np.abs(jet.zu * c[0] + jet.zv * c[1]), 9))
                   for c in (x, y)}
            want = {tuple(np.round(np.abs((jet.zu + jet.zv) / math.sqrt(2)),
                                   9)),
                    tuple(np.round(np.abs((jet.zu - jet.zv) / math.sqrt(2)),
                                   9))}
            assert got == want


def test_minimal_surface_discriminant_and_mean_curvature(rng):
    chart = chart_of("minimal-graph")
    for _ in range(20):
        u, v = rng.uniform(-0.95, 0.95, size=2)
        _, met, _, sff, _, inv = full_point(chart, float(u), float(v))
        s2 = inv.scale * inv.scale
        assert inv.kappa ** 2 - inv.k <= 1e-9 * s2
        assert np.linalg.norm(mean_curvature_vector(met, sff)) <= 1e-9
    for u, v in [(0.3, 0.4), (2.0, 5.0)]:
        inv = invariants_at(chart_of("clifford"), u, v)
        assert inv.kappa ** 2 - inv.k == pytest.approx(1.0, abs=1e-9)


def test_flat_point_verdicts():
    for u, v in [(0.2, 1.0), (-0.5, 3.0)]:
        rep = flat_point_analysis(chart_of("sphere"), u, v)
        assert rep.beta <= 1e-6
        assert rep.verdict is FlatVerdict.PLANAR
    for u, v in [(0.6, 1.0), (1.2, 4.0)]:
        rep = flat_point_analysis(chart_of("tangent-developable"), u, v)
        assert abs(rep.gauss_K) <= 1e-6
        assert rep.verdict is FlatVerdict.DEVELOPABLE_RULED


def test_invariance_under_normal_frame_changes(rng):
    jet, met, frame, sff, wf, inv = full_point(ROT.chart, 1.3, 2.1)
    for _ in range(20):
        theta = float(rng.uniform(0, 2 * math.pi))
        reflect = bool(rng.integers(0, 2))
        fr2 = rotated_frame(frame, theta, reflect)
        sff2 = second_fundamental(jet, fr2)
        wf2 = weingarten(met, sff2)
        inv2 = invariant_set(met, wf2, sff2)
        eps = -1.0 if reflect else 1.0
        assert abs(inv2.k - inv.k) <= 1e-9 * abs(inv.k)
        assert abs(inv2.kappa - eps * inv.kappa) <= 1e-9


def test_invariance_under_reparametrization(rng):
    u0, v0 = 1.3, 2.1
    jet0, met0, frame0, sff0, wf0, inv0 = full_point(ROT.chart, u0, v0)
    done = 0
    while done < 20:
        A = rng.uniform(-2.0, 2.0, size=(2, 2))
        if abs(np.linalg.det(A)) < 0.1:
            continue
        done += 1
        rp = reparametrization_at(ROT.chart, u0, v0, A, half_width=1e-3)
        jet = eval_jet2(rp, 0.0, 0.0)
        met = metric(jet)
        sff = second_fundamental(jet, frame0)
        wf = weingarten(met, sff)
        inv = invariant_set(met, wf, sff)
        eps = float(np.sign(np.linalg.det(A)))
        assert abs(inv.k - inv0.k) <= 1e-9 * abs(inv0.k)
        assert abs(inv.kappa - eps * inv0.kappa) <= 1e-9 * (1 + abs(inv0.kappa))


def test_characteristic_equation_and_discriminant_everywhere():
    for name in ("rot-generic", "clifford", "parabolic-graph",
                 "minimal-graph", "sphere"):
        chart = chart_of(name)
        us, vs = chart.interior_grid(6, 6)
        for u in us:
            for v in vs:
                _, met, _, sff, wf, inv = full_point(chart, float(u),
                                                     float(v))
                s2 = inv.scale * inv.scale
                assert inv.kappa ** 2 - inv.k >= -1e-12 * s2
                for nu in characteristic_roots(inv):
                    resid = nu * nu + 2 * inv.kappa * nu + inv.k
                    assert abs(resid) <= 1e-9 * s2
                eigs = np.real(np.linalg.eigvals(wf.gamma))
                for nu in eigs:
                    resid = nu * nu + 2 * inv.kappa * nu + inv.k
                    assert abs(resid) <= 1e-9 * s2


def test_frame_coefficients_reproduce_invariants():
    pts = {"rot-generic": [(1.0, 2.0), (2.7, 0.8), (4.4, 3.9)],
           "clifford": [(0.5, 1.0), (2.2, 4.0)],
           "parabolic-graph": [(0.0, 0.0), (0.4, -0.3)]}
    for name, samples in pts.items():
        for u, v in samples:
            fd = frenet_coefficients(chart_of(name), u, v)
            inv = fd.invariants
            s2 = inv.scale * inv.scale
            assert abs(inv.k + 4 * fd.nu1 * fd.nu2 * fd.mu ** 2) <= 1e-8 * s2
            assert abs(inv.kappa - (fd.nu1 - fd.nu2) * fd.mu) <= 1e-8 * s2
            assert abs(inv.gauss_K
                       - (fd.nu1 * fd.nu2 - fd.lam ** 2 - fd.mu ** 2)) \
                <= 1e-8 * s2
            want = math.sqrt(max(inv.kappa ** 2 - inv.k, 0.0)) \
                / (2 * abs(fd.mu))
            assert abs(fd.mean_norm - want) <= 1e-6 * (1 + want)


def test_moving_frame_identities_hold_on_grids():
    for name in ("rot-generic", "parabolic-graph"):
        rep = integrability_residuals(chart_of(name), grid=(16, 16),
                                      h_frame=1e-4)
        assert rep.evaluated > 200
        assert rep.worst <= 1e-3, f"{name}: worst {rep.worst}"


def test_moving_frame_residuals_shrink_with_the_step():
    # truncation-dominated regime: halving the step should divide the
    # worst residual by about four, at least three
    coarse = integrability_residuals(chart_of("rot-generic"), grid=(6, 6),
                                     h_frame=4e-3)
    fine = integrability_residuals(chart_of("rot-generic"), grid=(6, 6),
                                   h_frame=2e-3)
    assert coarse.evaluated == fine.evaluated == 36
    assert coarse.worst / fine.worst >= 3.0


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_constructed_charts_hit_prescribed_curvature(a):
    chart, _ = constant_k_family(a, "1 + 0.2*sin(u)", (0.0, 2.0))
    for u in np.linspace(0.1, 1.9, 8):
        for v in (0.5, 3.0):
            inv = invariants_at(chart, float(u), float(v))
            assert abs(inv.k + 1.0 / (a * a)) <= 1e-6


def test_fd_invariants_converge_at_second_order():
    u, v = 1.3, 2.1
    k_exact = invariants_at(ROT.chart, u, v).k

    def err(step):
        return abs(invariants_at(ROT.chart.with_fd(step), u, v).k - k_exact)

    ratio = err(0.02) / err(0.01)
    assert 3.5 <= ratio <= 4.5
