"""Surface charts: positions, 2-jets and the first fundamental form.

A Chart bundles a position map (u, v) -> R^4 over a closed parameter
rectangle with either exact partial-derivative evaluators or a finite
difference step.  eval_jet2 is the single entry point that everything
downstream uses to obtain position and derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateMetric, DomainError, EvalError

VectorFn = Callable[[float, float], np.ndarray]

#: default relative tolerance for metric regularity tests
DEFAULT_REG_TOL = 1e-12


@dataclass(frozen=True)
class Jet2:
    """Position and derivatives through second order at one parameter point."""

    u: float
    v: float
    p: np.ndarray
    zu: np.ndarray
    zv: np.ndarray
    zuu: np.ndarray
    zuv: np.ndarray
    zvv: np.ndarray


@dataclass(frozen=True)
class Metric:
    """Coefficients of the first fundamental form; W = sqrt(EG - F^2) > 0."""

    E: float
    F: float
    G: float
    W: float


@dataclass(frozen=True)
class Chart:
    """A parametrised surface patch over a closed rectangle.

    `partials`, when present, holds exact evaluators (zu, zv, zuu, zuv, zvv)
    and the chart is called exact.  Otherwise jets fall back to central
    finite differences of `position` with step `fd_step`.
    """

    name: str
    position: VectorFn
    domain: tuple[tuple[float, float], tuple[float, float]]
    partials: tuple[VectorFn, VectorFn, VectorFn, VectorFn, VectorFn] | None = None
    fd_step: float | None = None

    def __post_init__(self):
        (ul, uh), (vl, vh) = self.domain
        if not (math.isfinite(ul) and math.isfinite(uh) and ul < uh
                and math.isfinite(vl) and math.isfinite(vh) and vl < vh):
            raise ValueError(f"invalid domain {self.domain!r}")
        if self.partials is not None and len(self.partials) != 5:
            raise ValueError("partials must be (zu, zv, zuu, zuv, zvv)")
        if self.fd_step is None and self.partials is None:
            object.__setattr__(self, "fd_step", 1e-4 * max(1.0, self.extent))
        if self.fd_step is not None and not self.fd_step > 0:
            raise ValueError("fd_step must be positive")

    @property
    def extent(self) -> float:
        (ul, uh), (vl, vh) = self.domain
        return max(uh - ul, vh - vl)

    @property
    def is_exact(self) -> bool:
        return self.partials is not None

    def with_fd(self, step: float | None = None) -> "Chart":
        """The same position map as a finite-difference chart (exact jets dropped)."""
        return Chart(name=f"{self.name}[fd]", position=self.position,
                     domain=self.domain, partials=None, fd_step=step)

    def contains(self, u: float, v: float) -> bool:
        (ul, uh), (vl, vh) = self.domain
        return ul <= u <= uh and vl <= v <= vh

    def grid(self, nu: int, nv: int) -> tuple[np.ndarray, np.ndarray]:
        """Uniform sample values including both endpoints of each interval."""
        if nu < 1 or nv < 1:
            raise ValueError("grid sizes must be at least 1")
        (ul, uh), (vl, vh) = self.domain
        return np.linspace(ul, uh, nu), np.linspace(vl, vh, nv)

    def interior_grid(self, nu: int, nv: int, margin: float = 0.02
                      ) -> tuple[np.ndarray, np.ndarray]:
        """Uniform samples shrunk away from the boundary by `margin` of each extent."""
        (ul, uh), (vl, vh) = self.domain
        du, dv = margin * (uh - ul), margin * (vh - vl)
        return (np.linspace(ul + du, uh - du, nu),
                np.linspace(vl + dv, vh - dv, nv))


def _checked(vec: np.ndarray, what: str, u: float, v: float) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (4,):
        raise EvalError(f"{what} at ({u}, {v}) has shape {vec.shape}, expected (4,)")
    if not np.all(np.isfinite(vec)):
        raise EvalError(f"non-finite {what} at ({u}, {v})")
    return vec


def eval_jet2(chart: Chart, u: float, v: float) -> Jet2:
    """Position and first/second partials at an admissible parameter point.

    Boundary points of the closed rectangle are admissible.  For finite
    difference charts the stencil may sample the position map slightly
    outside the rectangle; the map itself must tolerate that.
    """
    if not chart.contains(u, v):
        raise DomainError(
            f"({u}, {v}) outside domain {chart.domain} of chart {chart.name!r}")
    if chart.is_exact:
        zu_fn, zv_fn, zuu_fn, zuv_fn, zvv_fn = chart.partials
        return Jet2(
            u=u, v=v,
            p=_checked(chart.position(u, v), "position", u, v),
            zu=_checked(zu_fn(u, v), "zu", u, v),
            zv=_checked(zv_fn(u, v), "zv", u, v),
            zuu=_checked(zuu_fn(u, v), "zuu", u, v),
            zuv=_checked(zuv_fn(u, v), "zuv", u, v),
            zvv=_checked(zvv_fn(u, v), "zvv", u, v),
        )

    h = chart.fd_step
    pos = chart.position

    def at(du: float, dv: float) -> np.ndarray:
        return _checked(pos(u + du, v + dv), "position", u + du, v + dv)

    c = at(0, 0)
    pu, mu_ = at(h, 0), at(-h, 0)
    pv, mv = at(0, h), at(0, -h)
    pp, pm, mp, mm = at(h, h), at(h, -h), at(-h, h), at(-h, -h)
    return Jet2(
        u=u, v=v, p=c,
        zu=(pu - mu_) / (2 * h),
        zv=(pv - mv) / (2 * h),
        zuu=(pu - 2 * c + mu_) / (h * h),
        zvv=(pv - 2 * c + mv) / (h * h),
        zuv=(pp - pm - mp + mm) / (4 * h * h),
    )


def metric(jet: Jet2, tol: float = DEFAULT_REG_TOL) -> Metric:
    """First fundamental form at a jet; raises DegenerateMetric when singular."""
    E = float(np.dot(jet.zu, jet.zu))
    F = float(np.dot(jet.zu, jet.zv))
    G = float(np.dot(jet.zv, jet.zv))
    disc = E * G - F * F
    if disc <= tol * (E + G) ** 2:
        raise DegenerateMetric(
            f"EG-F^2 = {disc:g} at ({jet.u}, {jet.v}) fails the regularity "
            f"threshold {tol:g}*(E+G)^2")
    return Metric(E=E, F=F, G=G, W=math.sqrt(disc))


def regularity(jet: Jet2, tol: float = DEFAULT_REG_TOL) -> bool:
    """True when the immersion is regular at the jet under the same test as metric()."""
    E = float(np.dot(jet.zu, jet.zu))
    F = float(np.dot(jet.zu, jet.zv))
    G = float(np.dot(jet.zv, jet.zv))
    return E * G - F * F > tol * (E + G) ** 2
