"""The distinguished moving frame {x, y, b, l} and its coefficient functions.

At every point that is neither flat nor minimal ("general type") the surface
carries a canonical orthonormal frame: the two principal tangent directions
x, y, the unit mean-curvature direction b, and the normal l completing a
positively oriented basis of R^4.  Eight scalar functions (nu1, nu2, lambda,
mu; beta1, beta2, gamma1, gamma2) describe the derivatives of the frame and
satisfy a closed system of first-order identities; their residuals are the
strongest whole-pipeline consistency check this package offers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .charts import Chart, Jet2, Metric, eval_jet2, metric
from .errors import (
    DegenerateMetric,
    EvalError,
    GaugeBreak,
    InternalInconsistency,
    NotGeneralType,
    PrincipalUndefined,
)
from .invariants import (
    InvariantSet,
    PointClass,
    SecondFundamental,
    WeingartenForm,
    invariant_set,
    is_minimal,
    mean_curvature_vector,
    normal_frame,
    principal_directions,
    second_fundamental,
    tangent_vector,
    weingarten,
)
from .vectors import cross4, unit


@dataclass(frozen=True)
class FrenetFrame:
    """Orthonormal frame at a general-type point.

    x, y are the principal tangents (x carries the larger diagonal
    coefficient nu1), b is the mean-curvature direction, and l completes a
    positively oriented basis.  x_coeffs / y_coeffs express the tangents in
    the (z_u, z_v) basis.
    """

    x: np.ndarray
    y: np.ndarray
    b: np.ndarray
    l: np.ndarray
    x_coeffs: np.ndarray
    y_coeffs: np.ndarray


@dataclass(frozen=True)
class FrenetData:
    """Frame plus all eight coefficient functions at one point.

    nu1, nu2, lam, mu come from pointwise projections of the second
    fundamental tensor; beta1, beta2, gamma1, gamma2 are derivatives of the
    frame fields obtained by finite differences with the step recorded in
    `h_frame`.
    """

    frame: FrenetFrame
    nu1: float
    nu2: float
    lam: float
    mu: float
    beta1: float
    beta2: float
    gamma1: float
    gamma2: float
    invariants: InvariantSet
    mean_norm: float
    h_frame: float


@dataclass(frozen=True)
class ResidualReport:
    """Maximum absolute residuals of the frame identities over a grid."""

    residuals: dict[str, float]
    worst: float
    evaluated: int
    skipped: int
    skip_reasons: dict[str, int]
    h_frame: float


@dataclass(frozen=True)
class NormalConnectionReport:
    """Grid test of kappa = 0, the criterion for a flat normal connection."""

    flat: bool
    max_abs_kappa: float
    evaluated: int


def sigma_bilinear(sff: SecondFundamental, a: np.ndarray, b: np.ndarray
                   ) -> np.ndarray:
    """sigma(X, Y) for tangents given by coefficient pairs a and b."""
    return (a[0] * b[0] * sff.sigma_uu
            + (a[0] * b[1] + a[1] * b[0]) * sff.sigma_uv
            + a[1] * b[1] * sff.sigma_vv)


def geometric_frame(jet: Jet2, met: Metric, wf: WeingartenForm,
                    sff: SecondFundamental, tol: float = 1e-9) -> FrenetFrame:
    """The canonical frame at a general-type point.

    Raises NotGeneralType at flat or minimal points, where no such frame
    exists.
    """
    inv = invariant_set(met, wf, sff, tol=tol)
    if inv.point_class is PointClass.FLAT:
        raise NotGeneralType("flat point: the frame is undefined")
    if is_minimal(inv, tol=tol):
        raise NotGeneralType("minimal point: the frame is undefined")
    try:
        xc, yc = principal_directions(met, wf, tol=tol)
    except PrincipalUndefined as exc:
        raise NotGeneralType(str(exc)) from exc

    H = mean_curvature_vector(met, sff)
    nH = float(np.linalg.norm(H))
    if nH <= 1e-300:
        raise NotGeneralType("mean curvature vector vanishes")
    b = H / nH

    nu1 = float(np.dot(sigma_bilinear(sff, xc, xc), b))
    nu2 = float(np.dot(sigma_bilinear(sff, yc, yc), b))
    if nu1 < nu2 and nu2 - nu1 > tol * inv.scale:
        # ordering safeguard; keeps (x, y) positively oriented
        xc, yc = yc, -xc
    if abs(xc[0]) > 1e-12 * (abs(xc[0]) + abs(xc[1])):
        lead = xc[0]
    else:
        lead = xc[1]
    if lead < 0:
        xc, yc = -xc, -yc

    x = tangent_vector(jet, xc)
    y = tangent_vector(jet, yc)
    l = unit(cross4(x, y, b))
    return FrenetFrame(x=x, y=y, b=b, l=l, x_coeffs=xc, y_coeffs=yc)


def _frame_at(chart: Chart, u: float, v: float, tol: float):
    jet = eval_jet2(chart, u, v)
    met = metric(jet)
    nframe = normal_frame(jet)
    sff = second_fundamental(jet, nframe)
    wf = weingarten(met, sff)
    inv = invariant_set(met, wf, sff, tol=tol)
    frame = geometric_frame(jet, met, wf, sff, tol=tol)
    return jet, met, sff, inv, frame


def _align(frame: FrenetFrame, ref: FrenetFrame) -> FrenetFrame:
    """Match the tangent gauge of `frame` to a reference at a nearby point.

    The principal pair is defined up to a joint sign; flip it when it points
    against the reference.  If the frame no longer resembles the reference
    (the principal branches crossed between the two points) raise GaugeBreak.
    """
    dxx = float(np.dot(frame.x, ref.x))
    dxy = float(np.dot(frame.x, ref.y))
    if abs(dxx) < abs(dxy):
        raise GaugeBreak("principal directions switched branches between "
                         "stencil points")
    if float(np.dot(frame.b, ref.b)) < 0:
        raise GaugeBreak("mean curvature direction flipped between stencil "
                         "points")
    if dxx < 0:
        # joint tangent flip leaves b and l unchanged
        return FrenetFrame(x=-frame.x, y=-frame.y, b=frame.b, l=frame.l,
                           x_coeffs=-frame.x_coeffs, y_coeffs=-frame.y_coeffs)
    return frame


_STENCIL5 = ((-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0))


def _field_derivatives(chart: Chart, u: float, v: float, coeffs: np.ndarray,
                       ref: FrenetFrame, h: float, tol: float
                       ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stencil derivatives of the (x, y, b) fields along one tangent direction."""
    dx = np.zeros(4)
    dy = np.zeros(4)
    db = np.zeros(4)
    for step, weight in _STENCIL5:
        uu = u + step * h * float(coeffs[0])
        vv = v + step * h * float(coeffs[1])
        try:
            frame_q = _frame_at(chart, uu, vv, tol)[4]
        except NotGeneralType as exc:
            raise GaugeBreak(f"frame undefined inside stencil: {exc}") from exc
        frame_q = _align(frame_q, ref)
        dx += weight * frame_q.x
        dy += weight * frame_q.y
        db += weight * frame_q.b
    return dx / (12.0 * h), dy / (12.0 * h), db / (12.0 * h)


def frenet_coefficients(chart: Chart, u: float, v: float, tol: float = 1e-9,
                        h_frame: float = 1e-4,
                        align_to: FrenetFrame | None = None) -> FrenetData:
    """Frame and all eight coefficients at a general-type point.

    The four pointwise coefficients are projections of the second
    fundamental tensor on the frame; the four derivative coefficients use
    fourth-order central differences of the frame fields with parameter
    step h_frame along each principal direction (the coefficient pairs are
    metric-unit, so the geometric step is h_frame as well).

    `align_to` matches the tangent gauge to a reference frame from a nearby
    point, for use inside outer difference stencils.
    """
    jet, met, sff, inv, frame = _frame_at(chart, u, v, tol)
    if align_to is not None:
        frame = _align(frame, align_to)

    nu1 = float(np.dot(sigma_bilinear(sff, frame.x_coeffs, frame.x_coeffs),
                       frame.b))
    nu2 = float(np.dot(sigma_bilinear(sff, frame.y_coeffs, frame.y_coeffs),
                       frame.b))
    sig_xy = sigma_bilinear(sff, frame.x_coeffs, frame.y_coeffs)
    lam = float(np.dot(sig_xy, frame.b))
    mu = float(np.dot(sig_xy, frame.l))

    # sigma(x, x) and sigma(y, y) may have no component along l; a residue
    # here means the principal solve and the projections disagree
    stray = max(
        abs(float(np.dot(sigma_bilinear(sff, frame.x_coeffs, frame.x_coeffs),
                         frame.l))),
        abs(float(np.dot(sigma_bilinear(sff, frame.y_coeffs, frame.y_coeffs),
                         frame.l))))
    if stray > 1e-6 * inv.scale:
        raise InternalInconsistency(
            f"second fundamental tensor has stray l-component {stray:g}")

    dx_x, _, db_x = _field_derivatives(chart, u, v, frame.x_coeffs, frame,
                                       h_frame, tol)
    _, dy_y, db_y = _field_derivatives(chart, u, v, frame.y_coeffs, frame,
                                       h_frame, tol)
    gamma1 = float(np.dot(dx_x, frame.y))
    gamma2 = float(np.dot(dy_y, frame.x))
    beta1 = float(np.dot(db_x, frame.l))
    beta2 = float(np.dot(db_y, frame.l))

    H = mean_curvature_vector(met, sff)
    return FrenetData(frame=frame, nu1=nu1, nu2=nu2, lam=lam, mu=mu,
                      beta1=beta1, beta2=beta2, gamma1=gamma1, gamma2=gamma2,
                      invariants=inv, mean_norm=float(np.linalg.norm(H)),
                      h_frame=h_frame)


_SKIPPABLE = (NotGeneralType, GaugeBreak, PrincipalUndefined, DegenerateMetric,
              EvalError)


def _directional(chart: Chart, u: float, v: float, coeffs: np.ndarray,
                 ref: FrenetFrame, h: float, tol: float, h_frame: float
                 ) -> dict[str, float]:
    """Central difference of the coefficient functions along one direction."""
    plus = frenet_coefficients(chart, u + h * float(coeffs[0]),
                               v + h * float(coeffs[1]), tol=tol,
                               h_frame=h_frame, align_to=ref)
    minus = frenet_coefficients(chart, u - h * float(coeffs[0]),
                                v - h * float(coeffs[1]), tol=tol,
                                h_frame=h_frame, align_to=ref)
    out = {}
    for name in ("nu1", "nu2", "lam", "mu", "beta1", "beta2",
                 "gamma1", "gamma2"):
        out[name] = (getattr(plus, name) - getattr(minus, name)) / (2.0 * h)
    return out


def point_residuals(chart: Chart, u: float, v: float, tol: float = 1e-9,
                    h_frame: float = 1e-4) -> dict[str, float]:
    """Residuals of the frame identities at a single general-type point.

    The identities couple first derivatives of the eight coefficient
    functions; all residuals vanish for an exact immersion, so their size
    measures the combined truncation and modelling error.
    """
    data = frenet_coefficients(chart, u, v, tol=tol, h_frame=h_frame)
    ref = data.frame
    dX = _directional(chart, u, v, ref.x_coeffs, ref, h_frame, tol, h_frame)
    dY = _directional(chart, u, v, ref.y_coeffs, ref, h_frame, tol, h_frame)

    nu1, nu2 = data.nu1, data.nu2
    lam, mu = data.lam, data.mu
    b1, b2 = data.beta1, data.beta2
    g1, g2 = data.gamma1, data.gamma2
    inv = data.invariants

    res = {
        "gauss": (dX["gamma2"] + dY["gamma1"] - g1 * g1 - g2 * g2
                  - (nu1 * nu2 - lam * lam - mu * mu)),
        "mu_x": dX["mu"] - 2 * mu * g2 - nu1 * b2 + lam * b1,
        "mu_y": dY["mu"] - 2 * mu * g1 + lam * b2 - nu2 * b1,
        "codazzi_x": (dX["lam"] - dY["nu1"] - 2 * lam * g2 - mu * b1
                      + (nu1 - nu2) * g1),
        "codazzi_y": (dY["lam"] - dX["nu2"] - 2 * lam * g1 - mu * b2
                      - (nu1 - nu2) * g2),
        "normal": (dY["beta1"] - dX["beta2"] - g1 * b1 + g2 * b2
                   - (nu1 - nu2) * mu),
        "kappa_id": inv.kappa + dX["beta2"] - dY["beta1"] + g1 * b1 - g2 * b2,
        "mean_norm_id": (data.mean_norm
                         - math.sqrt(max(inv.kappa ** 2 - inv.k, 0.0))
                         / (2.0 * abs(mu))) if mu != 0 else float("nan"),
    }
    return res


def _as_points(chart: Chart, grid) -> list[tuple[float, float]]:
    if (isinstance(grid, tuple) and len(grid) == 2
            and all(isinstance(n, int) for n in grid)):
        us, vs = chart.interior_grid(*grid)
        return [(float(u), float(v)) for v in vs for u in us]
    return [(float(u), float(v)) for u, v in grid]


def integrability_residuals(chart: Chart, grid=(16, 16),
                            h_frame: float = 1e-4,
                            tol: float = 1e-9) -> ResidualReport:
    """Maximum identity residuals over a parameter grid.

    `grid` is either (nu, nv) for an interior grid or an iterable of
    explicit (u, v) points.  Points where the frame does not exist or
    cannot be tracked through the stencils are skipped and counted by
    failure kind.
    """
    points = _as_points(chart, grid)
    maxima: dict[str, float] = {}
    skipped: dict[str, int] = {}
    evaluated = 0
    for u, v in points:
        try:
            res = point_residuals(chart, u, v, tol=tol, h_frame=h_frame)
        except _SKIPPABLE as exc:
            key = type(exc).__name__
            skipped[key] = skipped.get(key, 0) + 1
            continue
        evaluated += 1
        for name, value in res.items():
            if math.isnan(value):
                continue
            maxima[name] = max(maxima.get(name, 0.0), abs(value))
    worst = max(maxima.values()) if maxima else float("nan")
    return ResidualReport(residuals=maxima, worst=worst, evaluated=evaluated,
                          skipped=sum(skipped.values()), skip_reasons=skipped,
                          h_frame=h_frame)


def flat_normal_connection_test(chart: Chart, grid=(8, 8),
                                tol: float = 1e-9) -> NormalConnectionReport:
    """Check kappa = 0 across a grid, the flat-normal-connection criterion."""
    points = _as_points(chart, grid)
    worst = 0.0
    evaluated = 0
    flat = True
    for u, v in points:
        try:
            jet = eval_jet2(chart, u, v)
            met = metric(jet)
            nframe = normal_frame(jet)
            sff = second_fundamental(jet, nframe)
            wf = weingarten(met, sff)
            inv = invariant_set(met, wf, sff, tol=tol)
        except (DegenerateMetric, EvalError):
            continue
        evaluated += 1
        worst = max(worst, abs(inv.kappa))
        if abs(inv.kappa) > tol * inv.scale:
            flat = False
    return NormalConnectionReport(flat=flat, max_abs_kappa=worst,
                                  evaluated=evaluated)
