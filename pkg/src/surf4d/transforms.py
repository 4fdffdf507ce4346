"""Chart transformations used by the validation suite.

These wrap a chart in a rigid motion of the ambient space or an affine
change of parameters, keeping exact jets exact.  They exist to test the
transformation laws of the invariants: k must not change under any of
them, while kappa changes sign with the orientation of the parameter
change or of the normal frame.
"""

from __future__ import annotations

import numpy as np

from .charts import Chart
from .invariants import NormalFrame


def rigid_motion(chart: Chart, rotation: np.ndarray,
                 translation: np.ndarray | None = None) -> Chart:
    """Compose a chart with an orthogonal map and a translation of R^4."""
    Q = np.asarray(rotation, dtype=float)
    if Q.shape != (4, 4):
        raise ValueError("rotation must be a 4x4 matrix")
    if not np.allclose(Q.T @ Q, np.eye(4), atol=1e-12):
        raise ValueError("rotation must be orthogonal")
    t = np.zeros(4) if translation is None else np.asarray(translation, float)

    def moved(fn, shift):
        def call(u: float, v: float) -> np.ndarray:
            return Q @ fn(u, v) + shift
        return call

    partials = None
    if chart.partials is not None:
        partials = tuple(moved(fn, 0.0) for fn in chart.partials)
    return Chart(name=f"{chart.name}[moved]",
                 position=moved(chart.position, t),
                 domain=chart.domain, partials=partials,
                 fd_step=chart.fd_step)


def affine_reparametrization(chart: Chart, A: np.ndarray, shift: np.ndarray,
                             new_domain) -> Chart:
    """The chart in new parameters (s, t) with (u, v) = A (s, t) + shift.

    `new_domain` must map into the original domain; the caller is
    responsible for choosing it small enough.  Exact jets transform by the
    chain rule (A is constant, so no curvature of the parameter change
    enters).
    """
    A = np.asarray(A, dtype=float)
    shift = np.asarray(shift, dtype=float)
    if A.shape != (2, 2) or abs(np.linalg.det(A)) < 1e-12:
        raise ValueError("parameter change must be an invertible 2x2 matrix")
    a, b, c, d = A[0, 0], A[0, 1], A[1, 0], A[1, 1]

    def map_point(s: float, t: float) -> tuple[float, float]:
        return (a * s + b * t + shift[0], c * s + d * t + shift[1])

    def position(s: float, t: float) -> np.ndarray:
        return chart.position(*map_point(s, t))

    partials = None
    if chart.partials is not None:
        zu, zv, zuu, zuv, zvv = chart.partials

        def d_s(s, t):
            u, v = map_point(s, t)
            return a * zu(u, v) + c * zv(u, v)

        def d_t(s, t):
            u, v = map_point(s, t)
            return b * zu(u, v) + d * zv(u, v)

        def d_ss(s, t):
            u, v = map_point(s, t)
            return (a * a * zuu(u, v) + 2 * a * c * zuv(u, v)
                    + c * c * zvv(u, v))

        def d_st(s, t):
            u, v = map_point(s, t)
            return (a * b * zuu(u, v) + (a * d + b * c) * zuv(u, v)
                    + c * d * zvv(u, v))

        def d_tt(s, t):
            u, v = map_point(s, t)
            return (b * b * zuu(u, v) + 2 * b * d * zuv(u, v)
                    + d * d * zvv(u, v))

        partials = (d_s, d_t, d_ss, d_st, d_tt)

    return Chart(name=f"{chart.name}[reparam]", position=position,
                 domain=tuple((float(lo), float(hi)) for lo, hi in new_domain),
                 partials=partials, fd_step=chart.fd_step)


def reparametrization_at(chart: Chart, u0: float, v0: float, A: np.ndarray,
                         half_width: float = 0.05) -> Chart:
    """Reparametrised chart whose new origin (0, 0) maps to (u0, v0)."""
    A = np.asarray(A, dtype=float)
    shift = np.array([u0, v0])
    return affine_reparametrization(
        chart, A, shift,
        new_domain=((-half_width, half_width), (-half_width, half_width)))


def rotated_frame(frame: NormalFrame, theta: float,
                  reflect: bool = False) -> NormalFrame:
    """A new orthonormal normal frame, rotated by theta and optionally reflected.

    Reflection reverses the orientation of the normal frame, which flips
    the sign of kappa computed against it.
    """
    c, s = np.cos(theta), np.sin(theta)
    e1 = c * frame.e1 + s * frame.e2
    e2 = -s * frame.e1 + c * frame.e2
    orientation = frame.orientation
    if reflect:
        e2 = -e2
        orientation = -orientation
    return NormalFrame(e1=e1, e2=e2, orientation=orientation)
