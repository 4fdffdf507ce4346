"""Surface generators with independently known curvature data.

Rotational charts (x1(u), x2(u), r(u) cos v, r(u) sin v) built from a
unit-speed meridian admit closed-form invariants, which makes them the
reference oracle for the numeric pipeline: the two computation routes share
no code beyond the chart itself.  Ruled charts z = x(v) + u e(v) supply the
flat and developable test cases, and `fixtures` names a small stable of
surfaces used by the command line tools and the test-suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .charts import Chart
from .errors import (
    ArcLengthViolation,
    CurvatureVanishes,
    DegenerateRuling,
    EvalError,
    InfeasibleProfile,
    NonPositiveRadius,
    UnknownFixture,
)
from .expressions import (
    BinOp,
    Expr,
    Var,
    compile_chart,
    compile_scalar,
    differentiate,
    parse,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CurveJet:
    """Value and first two derivatives of a meridian (x1, x2, r) at one u."""

    c: np.ndarray
    d1: np.ndarray
    d2: np.ndarray


@dataclass(frozen=True)
class RotationalCurve:
    """A unit-speed meridian curve u -> (x1, x2, r) with r > 0.

    `jet` evaluates position and two derivatives; everything else in the
    rotational catalog derives from it.  Unit speed means
    x1'^2 + x2'^2 + r'^2 = 1 identically.
    """

    name: str
    u_range: tuple[float, float]
    jet_fn: Callable[[float], CurveJet]

    def jet(self, u: float) -> CurveJet:
        return self.jet_fn(u)

    def radius(self, u: float) -> float:
        return float(self.jet(u).c[2])

    def curvature(self, u: float) -> float:
        """Curvature of the meridian as a space curve."""
        d2 = self.jet(u).d2
        return float(np.linalg.norm(d2))

    def kappa1(self, u: float) -> float:
        """The planar component x1' x2'' - x1'' x2' of the curvature."""
        j = self.jet(u)
        return float(j.d1[0] * j.d2[1] - j.d2[0] * j.d1[1])


def _compiled_triple(exprs: tuple[Expr, Expr, Expr]):
    """Value, derivative and second-derivative evaluators of three u-expressions."""
    d1 = tuple(differentiate(e, "u") for e in exprs)
    d2 = tuple(differentiate(e, "u") for e in d1)

    def bundle(trees):
        fns = tuple(compile_scalar(t) for t in trees)

        def call(u: float) -> np.ndarray:
            try:
                return np.array([fn(u, 0.0) for fn in fns])
            except (ValueError, OverflowError, ZeroDivisionError) as exc:
                raise EvalError(f"meridian evaluation failed at u={u}: {exc}") from exc

        return call

    return bundle(exprs), bundle(d1), bundle(d2)


def _validate_meridian(curve: RotationalCurve, samples: int = 64,
                       tol: float = 1e-8) -> None:
    u0, u1 = curve.u_range
    for u in np.linspace(u0, u1, samples):
        j = curve.jet(float(u))
        speed2 = float(np.dot(j.d1, j.d1))
        if abs(speed2 - 1.0) > tol:
            raise ArcLengthViolation(
                f"meridian {curve.name!r} has |c'|^2 = {speed2:.12g} at "
                f"u={float(u):g}; expected 1 within {tol:g}")
        if j.c[2] <= 0:
            raise NonPositiveRadius(
                f"meridian {curve.name!r} has r = {j.c[2]:g} at u={float(u):g}")


def meridian_from_expressions(x1, x2, r, u_range, name: str = "meridian",
                              check: bool = True) -> RotationalCurve:
    """Unit-speed meridian from three expressions in u.

    Derivatives are exact (symbolic).  Unit speed and positivity of r are
    verified on a sample grid unless `check` is disabled.
    """
    exprs = tuple(parse(e) if isinstance(e, str) else e for e in (x1, x2, r))
    val, d1, d2 = _compiled_triple(exprs)

    def jet_fn(u: float) -> CurveJet:
        return CurveJet(c=val(u), d1=d1(u), d2=d2(u))

    curve = RotationalCurve(name=name, u_range=tuple(map(float, u_range)),
                            jet_fn=jet_fn)
    if check:
        _validate_meridian(curve)
    return curve


def meridian_by_arc_length(x1, x2, r, t_range, name: str = "meridian",
                           nodes: int = 1024) -> RotationalCurve:
    """Reparametrise an arbitrary regular meridian by arc length.

    The cumulative length s(t) is tabulated with Simpson's rule on a fine
    node grid and inverted by Newton iteration; component derivatives are
    then transformed by the chain rule.  The result satisfies the unit-speed
    contract to well below the 1e-8 validation tolerance.
    """
    exprs = tuple(parse(e) if isinstance(e, str) else e for e in (x1, x2, r))
    val, d1, d2 = _compiled_triple(exprs)
    t0, t1 = map(float, t_range)

    def speed(t: float) -> float:
        w = d1(t)
        return float(math.sqrt(np.dot(w, w)))

    ts = np.linspace(t0, t1, nodes + 1)
    speeds = np.array([speed(float(t)) for t in ts])
    if speeds.min() <= 1e-12:
        raise ArcLengthViolation(
            f"meridian {name!r} is not regular: |c'| vanishes")
    s_nodes = np.concatenate(
        ([0.0], integrate.cumulative_simpson(speeds, x=ts)))
    total = float(s_nodes[-1])

    def s_of(t: float) -> float:
        i = int(np.searchsorted(ts, t, side="right")) - 1
        i = min(max(i, 0), nodes - 1)
        local, _ = integrate.quad(speed, float(ts[i]), t, epsabs=1e-13,
                                  epsrel=1e-13)
        return float(s_nodes[i]) + local

    def t_of(s: float) -> float:
        t = t0 + (t1 - t0) * (s / total)
        for _ in range(60):
            err = s_of(t) - s
            if abs(err) <= 1e-12 * max(total, 1.0):
                return t
            t -= err / speed(t)
            t = min(max(t, t0), t1)
        return t

    def jet_fn(u: float) -> CurveJet:
        t = t_of(u)
        w = speed(t)
        c1 = d1(t)
        c2 = d2(t)
        wprime = float(np.dot(c1, c2)) / w
        return CurveJet(
            c=val(t),
            d1=c1 / w,
            d2=c2 / (w * w) - c1 * (wprime / w ** 3),
        )

    curve = RotationalCurve(name=name, u_range=(0.0, total), jet_fn=jet_fn)
    _validate_meridian(curve)
    return curve


def rotational_chart(curve: RotationalCurve,
                     v_range: tuple[float, float] = (0.0, TWO_PI),
                     name: str | None = None) -> Chart:
    """The surface of revolution of a meridian, with exact jets."""

    def position(u: float, v: float) -> np.ndarray:
        c = curve.jet(u).c
        return np.array([c[0], c[1], c[2] * math.cos(v), c[2] * math.sin(v)])

    def zu(u, v):
        d = curve.jet(u).d1
        return np.array([d[0], d[1], d[2] * math.cos(v), d[2] * math.sin(v)])

    def zv(u, v):
        c = curve.jet(u).c
        return np.array([0.0, 0.0, -c[2] * math.sin(v), c[2] * math.cos(v)])

    def zuu(u, v):
        d = curve.jet(u).d2
        return np.array([d[0], d[1], d[2] * math.cos(v), d[2] * math.sin(v)])

    def zuv(u, v):
        d = curve.jet(u).d1
        return np.array([0.0, 0.0, -d[2] * math.sin(v), d[2] * math.cos(v)])

    def zvv(u, v):
        c = curve.jet(u).c
        return np.array([0.0, 0.0, -c[2] * math.cos(v), -c[2] * math.sin(v)])

    return Chart(
        name=name or f"rotational:{curve.name}",
        position=position,
        domain=(curve.u_range, tuple(map(float, v_range))),
        partials=(zu, zv, zuu, zuv, zvv),
    )


def rotational_closed_forms(curve: RotationalCurve, u: float) -> dict[str, float]:
    """Closed-form invariants and frame coefficients of a rotational chart.

    Independent of the numeric pipeline: everything is expressed through
    the meridian data r, r'', the curvature kappa and its planar part
    kappa1.  Keys: k, kappa, K, nu, lam, mu, gamma1, gamma2.  The pair
    (lam, mu) and the common value of (gamma1, gamma2) are fixed only up to
    the sign conventions of the frame, so comparisons should use their
    absolute values (and the equality gamma1 = gamma2).

    Raises CurvatureVanishes where the meridian curvature is zero, since
    the frame coefficient formulas divide by it.
    """
    j = curve.jet(u)
    r = float(j.c[2])
    rp = float(j.d1[2])
    rpp = float(j.d2[2])
    kappa1 = float(j.d1[0] * j.d2[1] - j.d2[0] * j.d1[1])
    kappa_c = float(np.linalg.norm(j.d2))

    out = {
        "k": -(kappa1 * kappa1) / (r * r),
        "kappa": 0.0,
        "K": -rpp / r,
    }
    if kappa_c <= 1e-12:
        raise CurvatureVanishes(
            f"meridian curvature vanishes at u={u:g}; frame coefficients "
            "are undefined there")
    A = kappa_c * kappa_c * r - rpp
    S = A * A + kappa1 * kappa1
    root = math.sqrt(S)
    out["nu"] = root / (2.0 * kappa_c * r)
    out["lam"] = (kappa_c ** 4 * r * r - rpp * rpp - kappa1 * kappa1) / (
        2.0 * kappa_c * r * root)
    out["mu"] = kappa_c * kappa1 / root
    out["gamma1"] = out["gamma2"] = -(math.sqrt(2.0) / 2.0) * rp / r
    return out


def constant_k_family(a: float, kappa1, u_range,
                      name: str | None = None,
                      nodes: int = 4096) -> tuple[Chart, RotationalCurve]:
    """Rotational surfaces with k identically equal to -1/a^2.

    The invariant k of a rotational chart is -(kappa1/r)^2, so prescribing
    the planar curvature component kappa1(u) > 0 of the meridian and taking
    r = a * kappa1 pins k = -1/a^2 exactly.  The remaining meridian
    components are recovered by integrating

        phi' = kappa1 / s^2,   x1' = s cos(phi),   x2' = s sin(phi)

    with s = sqrt(1 - r'^2), which keeps the parametrisation unit-speed by
    construction.  A fixed-step Runge-Kutta grid of `nodes` steps is cached;
    queries integrate at most one partial step from the nearest node.

    Raises InfeasibleProfile when |a * kappa1'| reaches 1 (no real profile)
    and NonPositiveRadius when kappa1 is not positive.
    """
    if a <= 0:
        raise NonPositiveRadius(f"scale a = {a:g} must be positive")
    k1_expr = parse(kappa1) if isinstance(kappa1, str) else kappa1
    k1 = compile_scalar(k1_expr)
    k1p = compile_scalar(differentiate(k1_expr, "u"))
    k1pp = compile_scalar(differentiate(differentiate(k1_expr, "u"), "u"))
    u0, u1 = map(float, u_range)

    def s2_of(u: float) -> float:
        rp = a * k1p(u, 0.0)
        return 1.0 - rp * rp

    for u in np.linspace(u0, u1, 257):
        uu = float(u)
        if k1(uu, 0.0) <= 0:
            raise NonPositiveRadius(
                f"kappa1({uu:g}) = {k1(uu, 0.0):g} must be positive")
        if s2_of(uu) <= 1e-10:
            raise InfeasibleProfile(
                f"|a*kappa1'| reaches 1 near u={uu:g}: no unit-speed profile")

    def rhs(u: float, state: np.ndarray) -> np.ndarray:
        s2 = s2_of(u)
        s = math.sqrt(s2)
        phi = state[0]
        return np.array([k1(u, 0.0) / s2, s * math.cos(phi), s * math.sin(phi)])

    def rk4_step(u: float, state: np.ndarray, h: float) -> np.ndarray:
        k1_ = rhs(u, state)
        k2_ = rhs(u + h / 2, state + h / 2 * k1_)
        k3_ = rhs(u + h / 2, state + h / 2 * k2_)
        k4_ = rhs(u + h, state + h * k3_)
        return state + (h / 6.0) * (k1_ + 2 * k2_ + 2 * k3_ + k4_)

    h_grid = (u1 - u0) / nodes
    cache = np.empty((nodes + 1, 3))
    cache[0] = (0.0, 0.0, 0.0)
    for i in range(nodes):
        cache[i + 1] = rk4_step(u0 + i * h_grid, cache[i], h_grid)

    def state_at(u: float) -> np.ndarray:
        i = int((u - u0) / h_grid)
        i = min(max(i, 0), nodes)
        du = u - (u0 + i * h_grid)
        if du == 0.0:
            return cache[i]
        return rk4_step(u0 + i * h_grid, cache[i], du)

    def jet_fn(u: float) -> CurveJet:
        phi, x1, x2 = state_at(u)
        kap = k1(u, 0.0)
        kapp = k1p(u, 0.0)
        kappp = k1pp(u, 0.0)
        r, rp, rpp = a * kap, a * kapp, a * kappp
        s2 = 1.0 - rp * rp
        s = math.sqrt(s2)
        sp = -rp * rpp / s
        phip = kap / s2
        cph, sph = math.cos(phi), math.sin(phi)
        return CurveJet(
            c=np.array([x1, x2, r]),
            d1=np.array([s * cph, s * sph, rp]),
            d2=np.array([sp * cph - s * phip * sph,
                         sp * sph + s * phip * cph, rpp]),
        )

    label = name or f"constant-k(a={a:g})"
    curve = RotationalCurve(name=label, u_range=(u0, u1), jet_fn=jet_fn)
    _validate_meridian(curve)
    return rotational_chart(curve), curve


# --- ruled charts -------------------------------------------------------------


@dataclass(frozen=True)
class RuledData:
    """Decomposition of a ruled chart z = x(v) + u e(v) at one v.

    p and q are the components of x' along e and e'; the chart is
    developable at v when {x', e, e'} has rank at most two (the tangent
    plane is then constant along the ruling), and the striction point sits
    at u = -q.  planar_residual measures whether directions sampled near v
    stay inside a three-dimensional subspace; zero means the piece of
    surface fits in a hyperplane.
    """

    p: float
    q: float
    striction_u: float | None
    developable: bool
    director_speed: float
    planar_residual: float


def _parse_four(components) -> tuple[Expr, Expr, Expr, Expr]:
    out = tuple(parse(c) if isinstance(c, str) else c for c in components)
    if len(out) != 4:
        raise ValueError("expected exactly four coordinate components")
    return out


def ruled_chart(directrix, director, u_range, v_range,
                name: str = "ruled") -> Chart:
    """The chart z(u, v) = x(v) + u e(v) with a unit director e.

    `directrix` and `director` are four expressions in v each.  Jets are
    exact (symbolic).  Raises DegenerateRuling when the director is not
    unit length along the chart.
    """
    x = _parse_four(directrix)
    e = _parse_four(director)
    e_fns = [compile_scalar(c) for c in e]
    v0, v1 = map(float, v_range)
    for v in np.linspace(v0, v1, 64):
        norm2 = sum(fn(0.0, float(v)) ** 2 for fn in e_fns)
        if abs(norm2 - 1.0) > 1e-8:
            raise DegenerateRuling(
                f"director of {name!r} has |e|^2 = {norm2:.10g} at "
                f"v={float(v):g}; expected a unit field")
    position = tuple(
        BinOp("+", xi, BinOp("*", Var("u"), ei)) for xi, ei in zip(x, e))
    return compile_chart(*position, domain=(tuple(map(float, u_range)),
                                            (v0, v1)), name=name)


def ruled_data(directrix, director, v: float, tol: float = 1e-9,
               span_width: float = 0.3) -> RuledData:
    """Striction and developability data of a ruled chart at one v."""
    x = _parse_four(directrix)
    e = _parse_four(director)
    x_fns = [compile_scalar(differentiate(c, "v")) for c in x]
    e_fns = [compile_scalar(c) for c in e]
    ep_fns = [compile_scalar(differentiate(c, "v")) for c in e]

    xp = np.array([fn(0.0, v) for fn in x_fns])
    ev = np.array([fn(0.0, v) for fn in e_fns])
    ep = np.array([fn(0.0, v) for fn in ep_fns])
    speed = float(np.linalg.norm(ep))
    p = float(np.dot(xp, ev))

    # {x', e, e'} of rank <= 2 keeps the tangent plane fixed along a ruling
    svals = np.linalg.svd(np.vstack([xp, ev, ep]), compute_uv=False)
    developable = svals[2] <= tol * (1.0 + svals[0])

    if speed <= tol:
        q, striction = 0.0, None
    else:
        q = float(np.dot(xp, ep)) / (speed * speed)
        striction = -q

    # hyperplane test: tangent and ruling directions sampled around v
    rows = []
    for vi in v + np.linspace(-span_width, span_width, 7):
        rows.append([fn(0.0, float(vi)) for fn in x_fns])
        rows.append([fn(0.0, float(vi)) for fn in e_fns])
    span = np.linalg.svd(np.array(rows), compute_uv=False)
    planar_residual = float(span[3] / max(1.0, span[0]))

    return RuledData(p=p, q=q, striction_u=striction,
                     developable=bool(developable), director_speed=speed,
                     planar_residual=planar_residual)


# --- fixtures -----------------------------------------------------------------


@dataclass(frozen=True)
class Fixture:
    """A named chart with a short description and optional meridian oracle."""

    name: str
    chart: Chart
    description: str
    meridian: RotationalCurve | None = None


def _sqrt2_over(s: str) -> str:
    return f"({s})/sqrt(2)"


def _build_fixtures() -> dict[str, Fixture]:
    items: list[Fixture] = []

    items.append(Fixture(
        name="plane",
        chart=compile_chart("u", "v", "0", "0",
                            domain=((-1.0, 1.0), (-1.0, 1.0)), name="plane"),
        description="affine plane; every point flat, second form zero"))

    items.append(Fixture(
        name="clifford",
        chart=compile_chart("cos(u)", "sin(u)", "cos(v)", "sin(v)",
                            domain=((0.0, TWO_PI), (0.0, TWO_PI)),
                            name="clifford"),
        description="product of two unit circles; k = -1, kappa = 0, K = 0"))

    items.append(Fixture(
        name="minimal-graph",
        chart=compile_chart("u", "v", "u^2-v^2", "2*u*v",
                            domain=((-1.0, 1.0), (-1.0, 1.0)),
                            name="minimal-graph"),
        description="graph of the complex square; minimal, elliptic k > 0"))

    items.append(Fixture(
        name="parabolic-graph",
        chart=compile_chart("u", "v", "u*v", "u^2/2",
                            domain=((-1.0, 1.0), (-1.0, 1.0)),
                            name="parabolic-graph"),
        description="graph with k = 0 and kappa != 0: parabolic points"))

    items.append(Fixture(
        name="sphere",
        chart=compile_chart("cos(u)*cos(v)", "cos(u)*sin(v)", "sin(u)", "0",
                            domain=((-1.2, 1.2), (0.0, TWO_PI)),
                            name="sphere"),
        description="round sphere inside a 3-dimensional subspace; flat "
                    "with Planar verdict, K = 1"))

    rot_generic = meridian_from_expressions(
        "cos(0.4)*cos(u)", "sin(u)", "2+sin(0.4)*cos(u)",
        u_range=(0.0, TWO_PI), name="rot-generic")
    items.append(Fixture(
        name="rot-generic",
        chart=rotational_chart(rot_generic),
        description="rotational chart with varying k < 0, K != 0 and "
                    "closed-form oracle data",
        meridian=rot_generic))

    tan_dev_directrix = tuple(map(_sqrt2_over, (
        "sin(v)", "-cos(v)", "sin(2*v)/2", "-cos(2*v)/2")))
    tan_dev_director = tuple(map(_sqrt2_over, (
        "cos(v)", "sin(v)", "cos(2*v)", "sin(2*v)")))
    items.append(Fixture(
        name="tangent-developable",
        chart=ruled_chart(tan_dev_directrix, tan_dev_director,
                          u_range=(0.3, 1.5), v_range=(0.0, TWO_PI),
                          name="tangent-developable"),
        description="tangent developable of a curve spanning all four "
                    "dimensions; flat with DevelopableRuled verdict"))

    items.append(Fixture(
        name="cylinder",
        chart=ruled_chart(("0", "0", "cos(v)", "sin(v)"),
                          ("1", "0", "0", "0"),
                          u_range=(-1.0, 1.0), v_range=(0.0, TWO_PI),
                          name="cylinder"),
        description="circular cylinder inside a hyperplane; flat, Planar"))

    chart_ck, curve_ck = constant_k_family(
        1.0, "1+0.2*sin(u)", (0.0, 3.0), name="constant-k")
    items.append(Fixture(
        name="constant-k",
        chart=chart_ck,
        description="rotational chart constructed so that k = -1 exactly",
        meridian=curve_ck))

    return {f.name: f for f in items}


_FIXTURES: dict[str, Fixture] | None = None


def fixtures() -> dict[str, Fixture]:
    """All named fixtures, built once per process."""
    global _FIXTURES
    if _FIXTURES is None:
        _FIXTURES = _build_fixtures()
    return _FIXTURES


def get_fixture(name: str) -> Fixture:
    table = fixtures()
    if name not in table:
        known = ", ".join(sorted(table))
        raise UnknownFixture(f"no fixture named {name!r}; known: {known}")
    return table[name]
