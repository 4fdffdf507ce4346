"""Curvature invariants of a surface patch in 4-space.

The pipeline at one parameter point runs

    jet -> metric -> normal_frame -> second_fundamental -> weingarten
        -> invariant_set

yielding the pair of scalar invariants (k, kappa) that classify the point,
the Gauss curvature, and everything principal-direction related.  The two
invariants are the determinant and half-trace (negated) of a Weingarten-type
linear map built from the second fundamental tensor, and they satisfy
kappa^2 - k >= 0 everywhere, with equality exactly at points where the mean
curvature vanishes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .charts import Chart, Jet2, Metric, eval_jet2, metric
from .errors import (
    FrameUndefined,
    GaugeBreak,
    InternalInconsistency,
    NotFlatPoint,
    PrincipalUndefined,
)
from .vectors import cross4, gram_schmidt_pair, unit


class PointClass(str, enum.Enum):
    FLAT = "flat"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


class FlatVerdict(str, enum.Enum):
    TOTALLY_GEODESIC_PLANE = "TotallyGeodesicPlane"
    PLANAR = "Planar"
    DEVELOPABLE_RULED = "DevelopableRuled"
    GENERIC_FLAT = "GenericFlat"


@dataclass(frozen=True)
class NormalFrame:
    """Orthonormal basis (e1, e2) of the normal plane.

    `orientation` is +1 when (xhat, yhat, e1, e2) is positively oriented in
    R^4 for the oriented tangent basis, -1 for a reversed frame.  The
    canonical construction always yields +1; rotated or reflected frames
    used in validation may carry -1.
    """

    e1: np.ndarray
    e2: np.ndarray
    orientation: int = 1


@dataclass(frozen=True)
class SecondFundamental:
    """Second-order data at a point, relative to a normal frame.

    c11, c12, c22 are the components of the second fundamental tensor on
    the frame: c11 = (<z_uu, e1>, <z_uu, e2>) and so on.  sigma_uu,
    sigma_uv, sigma_vv are the frame-independent normal components of the
    second parameter derivatives.
    """

    c11: tuple[float, float]
    c12: tuple[float, float]
    c22: tuple[float, float]
    sigma_uu: np.ndarray
    sigma_uv: np.ndarray
    sigma_vv: np.ndarray


@dataclass(frozen=True)
class WeingartenForm:
    """The Weingarten-type map and its ingredients.

    L, M, N are the coefficients 2*delta1/W, delta2/W, 2*delta3/W where
    delta_i are the pairwise determinants of the columns c11, c12, c22.
    `gamma` is the 2x2 matrix of the map in the (z_u, z_v) coefficient
    basis, gamma = -g^{-1} h with g the metric matrix and h = [[L, M],
    [M, N]].
    """

    L: float
    M: float
    N: float
    delta1: float
    delta2: float
    delta3: float
    gamma: np.ndarray


@dataclass(frozen=True)
class InvariantSet:
    """Scalar invariants and the point classification.

    k and kappa are determinant and minus-half-trace of the Weingarten-type
    map; gauss_K is the Gauss (sectional) curvature of the induced metric.
    `scale` is 1 + |sigma|^2, the natural square-curvature scale used to
    make tolerance tests dimensionless.
    """

    k: float
    kappa: float
    gauss_K: float
    scale: float
    point_class: PointClass


@dataclass(frozen=True)
class FlatPointReport:
    """Outcome of the refined analysis available where k = kappa = 0."""

    beta: float
    beta1: float
    beta2: float
    gauss_K: float
    verdict: FlatVerdict


def tangent_basis(jet: Jet2) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal tangent pair (xhat, yhat) spanning (z_u, z_v), same orientation."""
    return gram_schmidt_pair(jet.zu, jet.zv)


def tangent_vector(jet: Jet2, coeffs: np.ndarray) -> np.ndarray:
    """Realise a coefficient pair (a, b) as the 4-vector a*z_u + b*z_v."""
    return coeffs[0] * jet.zu + coeffs[1] * jet.zv


def normal_frame(jet: Jet2, tol: float = 1e-12) -> NormalFrame:
    """Deterministic orthonormal frame of the normal plane at a jet.

    The ambient coordinate directions are projected onto the normal plane;
    the two projections of largest norm (ties broken by coordinate index)
    are orthonormalised and the second vector is flipped if needed so that
    (xhat, yhat, e1, e2) is positively oriented.
    """
    xhat, yhat = tangent_basis(jet)
    eye = np.eye(4)
    proj = [eye[i] - np.dot(eye[i], xhat) * xhat - np.dot(eye[i], yhat) * yhat
            for i in range(4)]
    norms = [float(np.linalg.norm(p)) for p in proj]
    order = sorted(range(4), key=lambda i: (-norms[i], i))

    first = order[0]
    if norms[first] <= tol:
        raise FrameUndefined("normal plane projections all degenerate")
    e1 = proj[first] / norms[first]
    e2 = None
    for j in order[1:]:
        cand = proj[j] - np.dot(proj[j], e1) * e1
        n = float(np.linalg.norm(cand))
        if n > tol:
            e2 = cand / n
            break
    if e2 is None:
        raise FrameUndefined("could not complete the normal frame")
    if np.linalg.det(np.column_stack([xhat, yhat, e1, e2])) < 0:
        e2 = -e2
    return NormalFrame(e1=e1, e2=e2, orientation=1)


def second_fundamental(jet: Jet2, frame: NormalFrame) -> SecondFundamental:
    """Second fundamental tensor components on a normal frame."""
    xhat, yhat = tangent_basis(jet)

    def normal_part(w):
        return w - np.dot(w, xhat) * xhat - np.dot(w, yhat) * yhat

    def comp(w):
        return (float(np.dot(w, frame.e1)), float(np.dot(w, frame.e2)))

    return SecondFundamental(
        c11=comp(jet.zuu), c12=comp(jet.zuv), c22=comp(jet.zvv),
        sigma_uu=normal_part(jet.zuu),
        sigma_uv=normal_part(jet.zuv),
        sigma_vv=normal_part(jet.zvv),
    )


def weingarten(met: Metric, sff: SecondFundamental) -> WeingartenForm:
    """The Weingarten-type map built from pairwise column determinants."""

    def det2(a, b):
        return a[0] * b[1] - a[1] * b[0]

    d1 = det2(sff.c11, sff.c12)
    d2 = det2(sff.c11, sff.c22)
    d3 = det2(sff.c12, sff.c22)
    L = 2.0 * d1 / met.W
    M = d2 / met.W
    N = 2.0 * d3 / met.W
    g = np.array([[met.E, met.F], [met.F, met.G]])
    h = np.array([[L, M], [M, N]])
    gamma = -np.linalg.solve(g, h)
    return WeingartenForm(L=L, M=M, N=N, delta1=d1, delta2=d2, delta3=d3,
                          gamma=gamma)


def orthonormal_sigma(met: Metric, sff: SecondFundamental
                      ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """sigma evaluated on the orthonormal tangent pair (xhat, yhat)."""
    E, F, W = met.E, met.F, met.W
    s_xx = sff.sigma_uu / E
    s_xy = (E * sff.sigma_uv - F * sff.sigma_uu) / (E * W)
    s_yy = (E * E * sff.sigma_vv - 2 * E * F * sff.sigma_uv
            + F * F * sff.sigma_uu) / (E * W * W)
    return s_xx, s_xy, s_yy


def sigma_scale(met: Metric, sff: SecondFundamental) -> float:
    """1 + |sigma|^2, where |sigma|^2 is the squared norm of the tensor."""
    s_xx, s_xy, s_yy = orthonormal_sigma(met, sff)
    return 1.0 + float(np.dot(s_xx, s_xx) + 2 * np.dot(s_xy, s_xy)
                       + np.dot(s_yy, s_yy))


def invariant_set(met: Metric, wf: WeingartenForm, sff: SecondFundamental,
                  tol: float = 1e-9) -> InvariantSet:
    """Scalar invariants k, kappa, Gauss curvature and the point class.

    Classification thresholds are made dimensionless with the scale
    s = 1 + |sigma|^2: the point is flat when |k| <= tol*s^2 and
    |kappa| <= tol*s, elliptic when k > tol*s^2, hyperbolic when
    k < -tol*s^2, and parabolic otherwise (k ~ 0, kappa != 0).
    """
    W2 = met.W * met.W
    k = (wf.L * wf.N - wf.M * wf.M) / W2
    kappa = (met.E * wf.N + met.G * wf.L - 2 * met.F * wf.M) / (2 * W2)
    gauss = (float(np.dot(sff.sigma_uu, sff.sigma_vv))
             - float(np.dot(sff.sigma_uv, sff.sigma_uv))) / W2
    s = sigma_scale(met, sff)
    if abs(k) <= tol * s * s and abs(kappa) <= tol * s:
        cls = PointClass.FLAT
    elif k > tol * s * s:
        cls = PointClass.ELLIPTIC
    elif k < -tol * s * s:
        cls = PointClass.HYPERBOLIC
    else:
        cls = PointClass.PARABOLIC
    return InvariantSet(k=k, kappa=kappa, gauss_K=gauss, scale=s,
                        point_class=cls)


def characteristic_roots(inv: InvariantSet, tol: float = 1e-9
                         ) -> tuple[float, float]:
    """The two real roots of nu^2 + 2*kappa*nu + k = 0, descending.

    The discriminant kappa^2 - k is nonnegative in exact arithmetic; small
    negative values are clamped, a significantly negative one reports a
    computation bug rather than bad input.
    """
    disc = inv.kappa * inv.kappa - inv.k
    if disc < 0:
        if disc < -tol * inv.scale * inv.scale:
            raise InternalInconsistency(
                f"kappa^2 - k = {disc:g} is negative beyond tolerance")
        disc = 0.0
    root = math.sqrt(disc)
    return (-inv.kappa + root, -inv.kappa - root)


def second_form_value(wf: WeingartenForm, a: float, b: float) -> float:
    """Value of the associated quadratic form on the tangent coefficients (a, b)."""
    return wf.L * a * a + 2.0 * wf.M * a * b + wf.N * b * b


def mean_curvature_vector(met: Metric, sff: SecondFundamental) -> np.ndarray:
    """Trace of sigma with respect to the metric, halved."""
    return (met.G * sff.sigma_uu - 2.0 * met.F * sff.sigma_uv
            + met.E * sff.sigma_vv) / (2.0 * met.W * met.W)


def is_minimal(inv: InvariantSet, tol: float = 1e-9) -> bool:
    """True when kappa^2 - k vanishes, i.e. the mean curvature vector is zero."""
    return inv.kappa * inv.kappa - inv.k <= tol * inv.scale * inv.scale


def _g_norm(met: Metric, a: float, b: float) -> float:
    return math.sqrt(max(met.E * a * a + 2 * met.F * a * b + met.G * b * b, 0.0))


def principal_directions(met: Metric, wf: WeingartenForm, tol: float = 1e-9
                         ) -> tuple[np.ndarray, np.ndarray]:
    """The distinguished orthogonal tangent directions, as coefficient pairs.

    Solves (E*M - F*L) a^2 + (E*N - G*L) a b + (F*N - G*M) b^2 = 0 for the
    two directions that the Weingarten-type map leaves invariant.  Returns
    g-orthonormal coefficient pairs (x, y) in the (z_u, z_v) basis with a
    deterministic convention:

    * x is the eigendirection whose eigenvalue is the smaller one when
      kappa > 0 and the larger one when kappa < 0 (ties resolved to the
      larger), which makes x the direction with the larger diagonal
      coefficient of the second fundamental tensor;
    * (x, y) is positively oriented with respect to (z_u, z_v);
    * the leading significant coefficient of x is positive.

    Raises PrincipalUndefined when the equation vanishes identically, i.e.
    every direction is principal.
    """
    E, F, G = met.E, met.F, met.G
    L, M, N = wf.L, wf.M, wf.N
    P = E * M - F * L
    Q = E * N - G * L
    R = F * N - G * M
    m = max(abs(P), abs(Q), abs(R))
    hg = (abs(E) + abs(F) + abs(G)) * (abs(L) + abs(M) + abs(N))
    if m <= tol * max(hg, 1e-300):
        raise PrincipalUndefined("every tangent direction is principal here")

    if max(abs(P), abs(R)) <= 1e-14 * m:
        # equation reduces to a*b = 0: the parameter directions
        dirs = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    else:
        disc = Q * Q - 4.0 * P * R
        if disc < 0:
            if disc < -1e-8 * m * m:
                raise InternalInconsistency(
                    f"principal equation discriminant {disc:g} is negative")
            disc = 0.0
        root = math.sqrt(disc)
        if abs(P) >= abs(R):
            # roots in t = a/b
            if Q >= 0:
                q = -(Q + root) / 2.0
            else:
                q = -(Q - root) / 2.0
            if q != 0.0:
                t1, t2 = q / P, (R / q if abs(R) > 0 else 0.0)
            else:  # Q == 0 and P*R == 0 handled above; here R/P <= 0
                t1 = math.sqrt(max(-R / P, 0.0))
                t2 = -t1
            dirs = [np.array([t1, 1.0]), np.array([t2, 1.0])]
        else:
            # roots in s = b/a
            if Q >= 0:
                q = -(Q + root) / 2.0
            else:
                q = -(Q - root) / 2.0
            if q != 0.0:
                s1, s2 = q / R, (P / q if abs(P) > 0 else 0.0)
            else:
                s1 = math.sqrt(max(-P / R, 0.0))
                s2 = -s1
            dirs = [np.array([1.0, s1]), np.array([1.0, s2])]

    dirs = [d / _g_norm(met, d[0], d[1]) for d in dirs]

    gxy = (E * dirs[0][0] * dirs[1][0] + G * dirs[0][1] * dirs[1][1]
           + F * (dirs[0][0] * dirs[1][1] + dirs[0][1] * dirs[1][0]))
    if abs(gxy) > 1e-10:
        # the two roots collapsed: the map is (numerically) a multiple of
        # the identity and no distinguished pair exists
        raise PrincipalUndefined(
            f"principal directions collapse: g(x, y) = {gxy:g}")

    # eigenvalue along a g-unit direction d is -h(d, d)
    alpha = [-second_form_value(wf, d[0], d[1]) for d in dirs]
    tie = 1e-12 * max(abs(alpha[0]), abs(alpha[1]), 1e-300)
    kappa = (E * N + G * L - 2 * F * M) / (2 * met.W * met.W)
    if kappa > tie:
        first = 0 if alpha[0] <= alpha[1] else 1
    else:
        first = 0 if alpha[0] >= alpha[1] else 1
    x, y = dirs[first], dirs[1 - first]

    if x[0] * y[1] - x[1] * y[0] < 0:
        y = -y
    lead = x[0] if abs(x[0]) > 1e-12 * (abs(x[0]) + abs(x[1])) else x[1]
    if lead < 0:
        x, y = -x, -y
    return x, y


# --- flat-point analysis -----------------------------------------------------


def _point_data(chart: Chart, u: float, v: float, tol: float):
    jet = eval_jet2(chart, u, v)
    met = metric(jet)
    frame = normal_frame(jet)
    sff = second_fundamental(jet, frame)
    wf = weingarten(met, sff)
    inv = invariant_set(met, wf, sff, tol=tol)
    return jet, met, frame, sff, wf, inv


def _flat_b_field(chart: Chart, u: float, v: float, tol: float):
    """The distinguished unit normal at a point of a flat patch.

    All three normal components of the second derivatives are parallel
    where k = kappa = 0; return the direction of the largest, or None when
    all vanish.
    """
    jet = eval_jet2(chart, u, v)
    met = metric(jet)
    frame = normal_frame(jet)
    sff = second_fundamental(jet, frame)
    s_list = orthonormal_sigma(met, sff)
    norms = [float(np.linalg.norm(s)) for s in s_list]
    i = int(np.argmax(norms))
    if norms[i] <= tol:
        return None
    return s_list[i] / norms[i]


_STENCIL5 = ((-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0))


def _directional_b_derivative(chart: Chart, u: float, v: float,
                              coeffs: tuple[float, float], b_center: np.ndarray,
                              h: float, tol: float) -> np.ndarray:
    """Fourth-order stencil derivative of the aligned b field along a direction."""
    acc = np.zeros(4)
    for step, weight in _STENCIL5:
        b_q = _flat_b_field(chart, u + step * h * coeffs[0],
                            v + step * h * coeffs[1], tol)
        if b_q is None:
            raise GaugeBreak(
                "normal direction field vanishes inside the stencil")
        if float(np.dot(b_q, b_center)) < 0:
            b_q = -b_q
        acc += weight * b_q
    return acc / (12.0 * h)


def flat_point_analysis(chart: Chart, u: float, v: float, tol: float = 1e-9,
                        h_frame: float = 1e-4,
                        verdict_tol: float = 1e-6) -> FlatPointReport:
    """Refined classification at a point where both invariants vanish.

    Computes the derivative invariant beta = sqrt(beta1^2 + beta2^2) of the
    distinguished normal direction field by finite differences with step
    `h_frame`, then reports, in order of specificity:

    * TotallyGeodesicPlane  - the second fundamental tensor vanishes;
    * Planar                - beta <= verdict_tol: the patch lies in a
                              3-dimensional affine subspace;
    * DevelopableRuled      - additionally |gauss_K| <= verdict_tol * scale^2
                              fails for Planar but holds here;
    * GenericFlat           - everything else.

    Raises NotFlatPoint where the invariants do not both vanish.
    """
    jet, met, frame, sff, wf, inv = _point_data(chart, u, v, tol)
    if inv.point_class is not PointClass.FLAT:
        raise NotFlatPoint(
            f"point ({u}, {v}) classifies as {inv.point_class.value}")

    s_list = orthonormal_sigma(met, sff)
    norms = [float(np.linalg.norm(s)) for s in s_list]
    if max(norms) <= tol:
        return FlatPointReport(beta=0.0, beta1=0.0, beta2=0.0,
                               gauss_K=inv.gauss_K,
                               verdict=FlatVerdict.TOTALLY_GEODESIC_PLANE)

    b = None
    for s, n in zip(s_list, norms):
        if n > tol:
            b = s / n
            break
    xhat, yhat = tangent_basis(jet)
    ell = unit(cross4(xhat, yhat, b))

    E, F, W = met.E, met.F, met.W
    x_coeffs = (1.0 / math.sqrt(E), 0.0)
    y_coeffs = (-F / (math.sqrt(E) * W), E / (math.sqrt(E) * W))
    db_x = _directional_b_derivative(chart, u, v, x_coeffs, b, h_frame, tol)
    db_y = _directional_b_derivative(chart, u, v, y_coeffs, b, h_frame, tol)
    beta1 = float(np.dot(db_x, ell))
    beta2 = float(np.dot(db_y, ell))
    beta = math.hypot(beta1, beta2)

    if beta <= verdict_tol:
        verdict = FlatVerdict.PLANAR
    elif abs(inv.gauss_K) <= verdict_tol * inv.scale * inv.scale:
        verdict = FlatVerdict.DEVELOPABLE_RULED
    else:
        verdict = FlatVerdict.GENERIC_FLAT
    return FlatPointReport(beta=beta, beta1=beta1, beta2=beta2,
                           gauss_K=inv.gauss_K, verdict=verdict)
