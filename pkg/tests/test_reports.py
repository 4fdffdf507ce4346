import pytest

from surf4d.expressions import compile_chart
from surf4d.reports import point_info, scan_chart, validate_chart

from conftest import chart_of


def test_scan_row_order_and_counts():
    rep = scan_chart(chart_of("clifford"), nu=4, nv=3)
    assert len(rep.rows) == 12
    assert rep.histogram == {"hyperbolic": 12}
    # v-major: the first nu rows share the lowest v
    first_vs = {row.v for row in rep.rows[:4]}
    assert first_vs == {0.0}
    us = [row.u for row in rep.rows[:4]]
    assert us == sorted(us)


def test_scan_marks_singular_points():
    pinch = compile_chart("u*u", "u*u", "v", "0", ((-1, 1), (-1, 1)),
                          name="pinch")
    rep = scan_chart(pinch, nu=3, nv=3)
    singular = [r for r in rep.rows if r.point_class == "singular"]
    assert rep.singular == len(singular) == 3  # the u = 0 column
    assert all(r.u == 0.0 for r in singular)
    assert all(r.k is None and r.E is None for r in singular)
    assert rep.histogram["singular"] == 3
    assert rep.histogram["flat"] == 6


def test_point_info_reports_reasons_not_errors():
    info = point_info(chart_of("plane"), 0.1, 0.1)
    assert info.frenet is None and info.frenet_reason
    assert info.principal is None and info.principal_reason
    assert info.flat_analysis["verdict"] == "TotallyGeodesicPlane"

    info = point_info(chart_of("clifford"), 0.5, 0.5)
    assert info.frenet is not None
    assert info.flat_analysis is None and info.flat_reason
    assert info.point_class == "hyperbolic"


def test_point_info_numbers():
    info = point_info(chart_of("clifford"), 0.0, 0.0)
    assert info.invariants["k"] == pytest.approx(-1.0, abs=1e-12)
    assert info.invariants["kappa"] == pytest.approx(0.0, abs=1e-12)
    assert info.mean_curvature["norm"] == pytest.approx(2 ** -0.5, abs=1e-12)
    assert info.characteristic_roots == pytest.approx((1.0, -1.0), abs=1e-12)
    assert info.minimal is False


def test_validate_is_deterministic():
    a = validate_chart(chart_of("clifford"), nu=5, nv=5)
    b = validate_chart(chart_of("clifford"), nu=5, nv=5)
    assert a.passed and b.passed
    assert [(c.name, c.status, c.worst) for c in a.checks] == \
        [(c.name, c.status, c.worst) for c in b.checks]


def test_validate_includes_oracle_checks_with_meridian():
    from surf4d.catalog import get_fixture

    fx = get_fixture("constant-k")
    rep = validate_chart(fx.chart, nu=5, nv=5, meridian=fx.meridian)
    names = {c.name for c in rep.checks}
    assert "rotational-oracle" in names
    assert "rotational-frame-oracle" in names
    assert rep.passed

    rep = validate_chart(chart_of("clifford"), nu=5, nv=5)
    assert "rotational-oracle" not in {c.name for c in rep.checks}
