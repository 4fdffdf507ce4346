"""Grid scans, single-point reports and the self-validation suite.

These functions produce plain dataclasses that the HTTP service serialises
directly; the command line client renders the same data as CSV or text.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import RotationalCurve, rotational_closed_forms
from .charts import Chart, eval_jet2, metric
from .errors import (
    DegenerateMetric,
    DomainError,
    EvalError,
    GaugeBreak,
    GeometryError,
    NotFlatPoint,
    NotGeneralType,
    PrincipalUndefined,
)
from .frenet import (
    flat_normal_connection_test,
    frenet_coefficients,
    integrability_residuals,
)
from .invariants import (
    PointClass,
    characteristic_roots,
    flat_point_analysis,
    invariant_set,
    is_minimal,
    mean_curvature_vector,
    normal_frame,
    principal_directions,
    second_form_value,
    second_fundamental,
    weingarten,
)
from .transforms import reparametrization_at, rotated_frame

SCAN_COLUMNS = ("u", "v", "E", "F", "G", "L", "M", "N", "k", "kappa", "K",
                "class")


@dataclass(frozen=True)
class ScanRow:
    """One grid point of a scan; numeric fields are None on singular points."""

    u: float
    v: float
    E: float | None
    F: float | None
    G: float | None
    L: float | None
    M: float | None
    N: float | None
    k: float | None
    kappa: float | None
    K: float | None
    point_class: str


@dataclass(frozen=True)
class ScanReport:
    chart: str
    nu: int
    nv: int
    rows: list[ScanRow]
    histogram: dict[str, int]
    singular: int


def _pipeline(chart: Chart, u: float, v: float, tol: float):
    jet = eval_jet2(chart, u, v)
    met = metric(jet)
    frame = normal_frame(jet)
    sff = second_fundamental(jet, frame)
    wf = weingarten(met, sff)
    inv = invariant_set(met, wf, sff, tol=tol)
    return jet, met, frame, sff, wf, inv


def scan_chart(chart: Chart, nu: int = 16, nv: int = 16,
               tol: float = 1e-9) -> ScanReport:
    """Invariants over an nu x nv grid including the domain boundary.

    Rows are emitted v-major (v in the outer loop, u in the inner one).
    Points where the metric degenerates or evaluation fails yield a row of
    class "singular" with empty numeric fields.
    """
    us, vs = chart.grid(nu, nv)
    rows: list[ScanRow] = []
    histogram: dict[str, int] = {}
    singular = 0
    for v in vs:
        for u in us:
            uu, vv = float(u), float(v)
            try:
                _, met, _, _, wf, inv = _pipeline(chart, uu, vv, tol)
            except (DegenerateMetric, EvalError):
                singular += 1
                rows.append(ScanRow(u=uu, v=vv, E=None, F=None, G=None,
                                    L=None, M=None, N=None, k=None,
                                    kappa=None, K=None,
                                    point_class="singular"))
                continue
            cls = inv.point_class.value
            histogram[cls] = histogram.get(cls, 0) + 1
            rows.append(ScanRow(u=uu, v=vv, E=met.E, F=met.F, G=met.G,
                                L=wf.L, M=wf.M, N=wf.N, k=inv.k,
                                kappa=inv.kappa, K=inv.gauss_K,
                                point_class=cls))
    if singular:
        histogram["singular"] = singular
    return ScanReport(chart=chart.name, nu=nu, nv=nv, rows=rows,
                      histogram=histogram, singular=singular)


@dataclass(frozen=True)
class PointReport:
    """Everything the pipeline can say about one parameter point."""

    chart: str
    u: float
    v: float
    position: list[float]
    metric: dict[str, float]
    normal_frame: dict[str, list[float]]
    second_fundamental: dict[str, list[float]]
    weingarten: dict[str, object]
    invariants: dict[str, float]
    point_class: str
    characteristic_roots: list[float]
    mean_curvature: dict[str, object]
    minimal: bool
    principal: dict[str, object] | None
    principal_reason: str | None
    frenet: dict[str, object] | None
    frenet_reason: str | None
    flat_analysis: dict[str, object] | None
    flat_reason: str | None


def point_info(chart: Chart, u: float, v: float, tol: float = 1e-9,
               h_frame: float = 1e-4) -> PointReport:
    """Full single-point report.

    Sections that do not apply at the point (principal directions at a
    point where every direction is principal, the moving frame at a flat
    or minimal point, flat analysis at a non-flat point) come back as None
    together with a one-line reason.
    """
    jet, met, frame, sff, wf, inv = _pipeline(chart, u, v, tol)
    roots = characteristic_roots(inv, tol=tol)
    H = mean_curvature_vector(met, sff)

    principal = principal_reason = None
    try:
        x, y = principal_directions(met, wf, tol=tol)
        principal = {"x_coeffs": list(map(float, x)),
                     "y_coeffs": list(map(float, y)),
                     "x": list(map(float, x[0] * jet.zu + x[1] * jet.zv)),
                     "y": list(map(float, y[0] * jet.zu + y[1] * jet.zv))}
    except (PrincipalUndefined, GeometryError) as exc:
        principal_reason = str(exc)

    frenet_block = frenet_reason = None
    try:
        try:
            fd = frenet_coefficients(chart, u, v, tol=tol, h_frame=h_frame)
        except DomainError as exc:
            raise NotGeneralType(
                "frame derivatives need room inside the domain "
                f"({exc})") from exc
        frenet_block = {
            "x": list(map(float, fd.frame.x)),
            "y": list(map(float, fd.frame.y)),
            "b": list(map(float, fd.frame.b)),
            "l": list(map(float, fd.frame.l)),
            "nu1": fd.nu1, "nu2": fd.nu2, "lam": fd.lam, "mu": fd.mu,
            "beta1": fd.beta1, "beta2": fd.beta2,
            "gamma1": fd.gamma1, "gamma2": fd.gamma2,
            "h_frame": fd.h_frame,
        }
    except (NotGeneralType, GaugeBreak, PrincipalUndefined) as exc:
        frenet_reason = str(exc)

    flat_block = flat_reason = None
    try:
        fr = flat_point_analysis(chart, u, v, tol=tol, h_frame=h_frame)
        flat_block = {"beta": fr.beta, "beta1": fr.beta1, "beta2": fr.beta2,
                      "gauss_K": fr.gauss_K, "verdict": fr.verdict.value}
    except NotFlatPoint as exc:
        flat_reason = str(exc)
    except (GaugeBreak, GeometryError) as exc:
        flat_reason = f"analysis failed: {exc}"

    return PointReport(
        chart=chart.name, u=u, v=v,
        position=list(map(float, jet.p)),
        metric={"E": met.E, "F": met.F, "G": met.G, "W": met.W},
        normal_frame={"e1": list(map(float, frame.e1)),
                      "e2": list(map(float, frame.e2))},
        second_fundamental={
            "c11": list(sff.c11), "c12": list(sff.c12), "c22": list(sff.c22),
            "sigma_uu": list(map(float, sff.sigma_uu)),
            "sigma_uv": list(map(float, sff.sigma_uv)),
            "sigma_vv": list(map(float, sff.sigma_vv))},
        weingarten={"L": wf.L, "M": wf.M, "N": wf.N,
                    "gamma": [[float(wf.gamma[0, 0]), float(wf.gamma[0, 1])],
                              [float(wf.gamma[1, 0]), float(wf.gamma[1, 1])]]},
        invariants={"k": inv.k, "kappa": inv.kappa, "K": inv.gauss_K,
                    "scale": inv.scale},
        point_class=inv.point_class.value,
        characteristic_roots=[roots[0], roots[1]],
        mean_curvature={"vector": list(map(float, H)),
                        "norm": float(np.linalg.norm(H))},
        minimal=is_minimal(inv, tol=tol),
        principal=principal, principal_reason=principal_reason,
        frenet=frenet_block, frenet_reason=frenet_reason,
        flat_analysis=flat_block, flat_reason=flat_reason,
    )


@dataclass(frozen=True)
class CheckRow:
    """One validation check: status is pass, fail, info or skip."""

    name: str
    status: str
    worst: float | None
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    chart: str
    checks: list[CheckRow]
    passed: bool


def _sample_points(chart: Chart, n: int = 5) -> list[tuple[float, float]]:
    us, vs = chart.interior_grid(n, n, margin=0.05)
    return [(float(u), float(v)) for v in vs for u in us]


def validate_chart(chart: Chart, nu: int = 16, nv: int = 16,
                   tol: float = 1e-9, h_frame: float = 1e-4,
                   meridian: RotationalCurve | None = None,
                   seed: int = 12345) -> ValidationReport:
    """Self-consistency suite for one chart.

    Every check compares two independent computation routes (or a computed
    value against a structural requirement).  With a `meridian` attached
    the numeric pipeline is additionally compared against closed forms.
    """
    rng = np.random.default_rng(seed)
    checks: list[CheckRow] = []
    points = _sample_points(chart)

    usable = []
    for u, v in points:
        try:
            usable.append((u, v) + _pipeline(chart, u, v, tol))
        except (DegenerateMetric, EvalError):
            continue
    if not usable:
        return ValidationReport(chart=chart.name, checks=[CheckRow(
            "pipeline", "fail", None,
            "no regular sample points in the domain interior")], passed=False)

    # spectral structure of the Weingarten-type map
    worst_char = worst_disc = 0.0
    for u, v, jet, met, frame, sff, wf, inv in usable:
        s2 = inv.scale * inv.scale
        eigs = np.linalg.eigvals(wf.gamma)
        worst_char = max(worst_char, max(
            abs(e * e + 2 * inv.kappa * e + inv.k) / s2
            for e in map(float, np.real(eigs))))
        worst_disc = max(worst_disc, -(inv.kappa ** 2 - inv.k) / s2)
    checks.append(CheckRow(
        "spectral-characteristic", "pass" if worst_char <= 1e-9 else "fail",
        worst_char,
        "eigenvalues of the map satisfy its characteristic equation"))
    checks.append(CheckRow(
        "discriminant-nonnegative",
        "pass" if worst_disc <= 1e-12 else "fail", worst_disc,
        "kappa^2 - k >= 0 at every sample"))

    # quadratic form route agrees with the matrix route
    worst = 0.0
    for u, v, jet, met, frame, sff, wf, inv in usable[:8]:
        g = np.array([[met.E, met.F], [met.F, met.G]])
        for _ in range(4):
            d = rng.normal(size=2)
            lhs = second_form_value(wf, float(d[0]), float(d[1]))
            rhs = -float(d @ g @ wf.gamma @ d)
            worst = max(worst, abs(lhs - rhs) / inv.scale)
    checks.append(CheckRow(
        "form-vs-matrix", "pass" if worst <= 1e-10 else "fail", worst,
        "quadratic form equals -g(gamma X, X)"))

    # invariance under rotations and reflections of the normal frame
    worst = 0.0
    for u, v, jet, met, frame, sff, wf, inv in usable[:5]:
        for _ in range(4):
            theta = float(rng.uniform(0, 2 * math.pi))
            reflect = bool(rng.integers(0, 2))
            fr2 = rotated_frame(frame, theta, reflect)
            sff2 = second_fundamental(jet, fr2)
            wf2 = weingarten(met, sff2)
            inv2 = invariant_set(met, wf2, sff2, tol=tol)
            eps = -1.0 if reflect else 1.0
            s2 = inv.scale * inv.scale
            worst = max(worst, abs(inv2.k - inv.k) / s2,
                        abs(inv2.kappa - eps * inv.kappa) / inv.scale)
    checks.append(CheckRow(
        "frame-invariance", "pass" if worst <= 1e-10 else "fail", worst,
        "k invariant, kappa changes sign with frame orientation"))

    # invariance under affine reparametrisation (normal frame held fixed)
    u0, v0 = usable[len(usable) // 2][:2]
    jet0, met0, frame0, sff0, wf0, inv0 = usable[len(usable) // 2][2:]
    worst = 0.0
    tried = 0
    while tried < 8:
        A = rng.uniform(-1.5, 1.5, size=(2, 2))
        if abs(np.linalg.det(A)) < 0.1:
            continue
        tried += 1
        try:
            rp = reparametrization_at(chart, u0, v0, A, half_width=1e-3)
            jet2 = eval_jet2(rp, 0.0, 0.0)
            met2 = metric(jet2)
            sff2 = second_fundamental(jet2, frame0)
            wf2 = weingarten(met2, sff2)
            inv2 = invariant_set(met2, wf2, sff2, tol=tol)
        except (DegenerateMetric, EvalError):
            continue
        eps = float(np.sign(np.linalg.det(A)))
        s2 = inv0.scale * inv0.scale
        worst = max(worst, abs(inv2.k - inv0.k) / s2,
                    abs(inv2.kappa - eps * inv0.kappa) / inv0.scale)
    checks.append(CheckRow(
        "reparametrization-invariance",
        "pass" if worst <= 1e-9 else "fail", worst,
        "k invariant, kappa follows the parameter orientation"))

    # vanishing of the form coefficients exactly where both invariants vanish
    agree = True
    for u, v, jet, met, frame, sff, wf, inv in usable:
        hnorm = (abs(wf.L) + abs(wf.M) + abs(wf.N)) / (met.E + met.G)
        flat_inv = inv.point_class is PointClass.FLAT
        flat_form = hnorm <= 10 * tol * inv.scale
        if flat_inv != flat_form:
            agree = False
    checks.append(CheckRow(
        "flat-equivalence", "pass" if agree else "fail", None,
        "k = kappa = 0 exactly where L = M = N = 0"))

    # at non-flat points, a vanishing discriminant is equivalent to a
    # vanishing mean curvature vector (at flat points both invariants are
    # zero while H is unconstrained, so those are excluded)
    agree = True
    nonflat = 0
    for u, v, jet, met, frame, sff, wf, inv in usable:
        if inv.point_class is PointClass.FLAT:
            continue
        nonflat += 1
        H = mean_curvature_vector(met, sff)
        h2 = float(np.dot(H, H))
        if is_minimal(inv, tol=tol) != (h2 <= tol * inv.scale ** 2):
            agree = False
    if nonflat:
        checks.append(CheckRow(
            "minimal-consistency", "pass" if agree else "fail", None,
            "kappa^2 - k = 0 exactly where the mean curvature vanishes "
            f"({nonflat} non-flat samples)"))
    else:
        checks.append(CheckRow(
            "minimal-consistency", "skip", None,
            "no non-flat samples to test"))

    # pointwise frame identities at general-type samples
    worst = None
    tested = 0
    for u, v, jet, met, frame, sff, wf, inv in usable:
        try:
            fd = frenet_coefficients(chart, u, v, tol=tol, h_frame=h_frame)
        except (NotGeneralType, GaugeBreak, PrincipalUndefined):
            continue
        tested += 1
        s2 = inv.scale * inv.scale
        errs = [
            abs(inv.k + 4 * fd.nu1 * fd.nu2 * fd.mu ** 2) / s2,
            abs(inv.kappa - (fd.nu1 - fd.nu2) * fd.mu) / s2,
            abs(inv.gauss_K - (fd.nu1 * fd.nu2 - fd.lam ** 2 - fd.mu ** 2))
            / s2,
        ]
        if fd.mu != 0:
            hh = math.sqrt(max(inv.kappa ** 2 - inv.k, 0.0)) / (2 * abs(fd.mu))
            errs.append(abs(fd.mean_norm - hh) / max(fd.mean_norm, 1e-12))
        worst = max([worst or 0.0] + errs)
        if tested >= 6:
            break
    if tested:
        checks.append(CheckRow(
            "frame-identities", "pass" if worst <= 1e-6 else "fail", worst,
            f"invariants match frame coefficient combinations at {tested} "
            "general-type samples"))
    else:
        checks.append(CheckRow(
            "frame-identities", "skip", None,
            "no general-type samples (surface is flat or minimal)"))

    # integrability of the coefficient system
    rep = integrability_residuals(chart, grid=(nu, nv), h_frame=h_frame,
                                  tol=tol)
    if rep.evaluated:
        checks.append(CheckRow(
            "integrability", "pass" if rep.worst <= 1e-3 else "fail",
            rep.worst,
            f"moving-frame identities on {rep.evaluated} points "
            f"({rep.skipped} skipped)"))
    else:
        checks.append(CheckRow(
            "integrability", "skip", None,
            f"no general-type grid points ({rep.skip_reasons})"))

    # closed-form oracle for rotational charts
    if meridian is not None:
        worst = 0.0
        us = np.linspace(*meridian.u_range, 18)[1:-1]
        vs = np.linspace(*chart.domain[1], 5)[1:-1]
        for u in us:
            cf = rotational_closed_forms(meridian, float(u))
            for v in vs:
                _, met, _, sff, wf, inv = _pipeline(chart, float(u), float(v),
                                                    tol)
                s2 = inv.scale * inv.scale
                worst = max(worst,
                            abs(inv.k - cf["k"]) / s2,
                            abs(inv.kappa - cf["kappa"]) / inv.scale,
                            abs(inv.gauss_K - cf["K"]) / s2)
        checks.append(CheckRow(
            "rotational-oracle", "pass" if worst <= 1e-8 else "fail", worst,
            "pipeline invariants match meridian closed forms"))

        worst = 0.0
        for u in np.linspace(*meridian.u_range, 7)[1:-1]:
            cf = rotational_closed_forms(meridian, float(u))
            try:
                fd = frenet_coefficients(chart, float(u),
                                         float(np.mean(chart.domain[1])),
                                         tol=tol, h_frame=h_frame)
            except (NotGeneralType, GaugeBreak):
                continue
            worst = max(worst,
                        abs(fd.nu1 - cf["nu"]), abs(fd.nu2 - cf["nu"]),
                        abs(abs(fd.lam) - abs(cf["lam"])),
                        abs(abs(fd.mu) - abs(cf["mu"])),
                        abs(abs(fd.gamma1) - abs(cf["gamma1"])),
                        abs(abs(fd.gamma2) - abs(cf["gamma2"])))
        checks.append(CheckRow(
            "rotational-frame-oracle",
            "pass" if worst <= 1e-5 else "fail", worst,
            "frame coefficients match meridian closed forms up to gauge"))

    # informational rows
    ncr = flat_normal_connection_test(chart, grid=(min(nu, 8), min(nv, 8)),
                                      tol=tol)
    checks.append(CheckRow(
        "normal-connection", "info", ncr.max_abs_kappa,
        f"normal connection {'flat' if ncr.flat else 'not flat'} "
        f"(max |kappa| over {ncr.evaluated} points)"))
    histogram: dict[str, int] = {}
    for u, v, jet, met, frame, sff, wf, inv in usable:
        histogram[inv.point_class.value] = histogram.get(
            inv.point_class.value, 0) + 1
    checks.append(CheckRow(
        "classification", "info", None,
        "sample classes: " + ", ".join(
            f"{k}={n}" for k, n in sorted(histogram.items()))))

    passed = all(c.status != "fail" for c in checks)
    return ValidationReport(chart=chart.name, checks=checks, passed=passed)
