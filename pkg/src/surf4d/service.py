"""HTTP service exposing scans, point reports and validation runs.

The command line tool talks to this app in process by default, so the
service is the single place where requests are parsed and errors are
mapped to status codes:

* 400 for bad input (unknown fixture, malformed expression, point outside
  the domain, inconsistent request fields),
* 422 for geometric degeneracy discovered while computing (metric rank
  drop, non-finite evaluation).
"""

from __future__ import annotations

from dataclasses import asdict
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .catalog import RotationalCurve, fixtures, get_fixture
from .charts import Chart
from .errors import (
    DomainError,
    ExprSyntaxError,
    GeometryError,
    SpecFileError,
    UnknownFixture,
    UnknownIdentifier,
)
from .reports import point_info, scan_chart, validate_chart
from .specfile import SurfaceSpec, build_chart

app = FastAPI(title="surf4d", version="0.1.0")

_INPUT_ERRORS = (ExprSyntaxError, UnknownIdentifier, UnknownFixture,
                 DomainError, SpecFileError, ValueError)


@app.exception_handler(GeometryError)
async def _geometry_error(request: Request, exc: GeometryError):
    status = 400 if isinstance(exc, _INPUT_ERRORS) else 422
    return JSONResponse(status_code=status, content={
        "error": type(exc).__name__, "message": str(exc)})


@app.exception_handler(ValueError)
async def _value_error(request: Request, exc: ValueError):
    return JSONResponse(status_code=400, content={
        "error": type(exc).__name__, "message": str(exc)})


@app.exception_handler(RequestValidationError)
async def _request_error(request: Request, exc: RequestValidationError):
    first = exc.errors()[0] if exc.errors() else {}
    loc = ".".join(str(p) for p in first.get("loc", ()) if p != "body")
    msg = first.get("msg", "invalid request")
    return JSONResponse(status_code=400, content={
        "error": "ValidationError",
        "message": f"{loc}: {msg}" if loc else msg})


class ChartSpec(BaseModel):
    """A surface patch given by four coordinate expressions in u and v."""

    name: str = "chart"
    x1: str
    x2: str
    x3: str
    x4: str
    u_range: tuple[float, float]
    v_range: tuple[float, float]


class SurfaceRequest(BaseModel):
    chart: ChartSpec | None = None
    fixture: str | None = None
    jets: Literal["analytic", "fd"] = "analytic"
    fd_step: float | None = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _exactly_one_source(self):
        if (self.chart is None) == (self.fixture is None):
            raise ValueError(
                "provide exactly one of 'chart' or 'fixture'")
        if self.fd_step is not None and self.jets != "fd":
            raise ValueError("fd_step only applies when jets='fd'")
        return self


class ScanRequest(SurfaceRequest):
    nu: int = Field(default=16, ge=1, le=512)
    nv: int = Field(default=16, ge=1, le=512)
    tol: float = Field(default=1e-9, gt=0)


class InfoRequest(SurfaceRequest):
    u: float
    v: float
    tol: float = Field(default=1e-9, gt=0)
    h_frame: float = Field(default=1e-4, gt=0)


class ValidateRequest(SurfaceRequest):
    nu: int = Field(default=16, ge=2, le=128)
    nv: int = Field(default=16, ge=2, le=128)
    tol: float = Field(default=1e-9, gt=0)
    h_frame: float = Field(default=1e-4, gt=0)


class ScanRowModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

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
    point_class: str = Field(alias="class")


class ScanResponse(BaseModel):
    chart: str
    nu: int
    nv: int
    rows: list[ScanRowModel]
    histogram: dict[str, int]
    singular: int


class CheckRowModel(BaseModel):
    name: str
    status: str
    worst: float | None
    detail: str


class ValidateResponse(BaseModel):
    chart: str
    checks: list[CheckRowModel]
    passed: bool


class CatalogEntry(BaseModel):
    name: str
    description: str
    domain: tuple[tuple[float, float], tuple[float, float]]


def _resolve(req: SurfaceRequest) -> tuple[Chart, RotationalCurve | None]:
    """Turn a request into a chart plus an optional closed-form meridian."""
    if req.fixture is not None:
        fx = get_fixture(req.fixture)
        chart, meridian = fx.chart, fx.meridian
        if req.jets == "fd":
            chart = chart.with_fd(req.fd_step)
        return chart, meridian
    cs = req.chart
    spec = SurfaceSpec(name=cs.name, coords=(cs.x1, cs.x2, cs.x3, cs.x4),
                       u_range=cs.u_range, v_range=cs.v_range)
    return build_chart(spec, jets=req.jets, fd_step=req.fd_step), None


@app.get("/health")
async def health() -> dict:
    return {"status": "ok", "version": app.version}


@app.get("/catalog", response_model=list[CatalogEntry])
async def catalog() -> list[CatalogEntry]:
    return [CatalogEntry(name=fx.name, description=fx.description,
                         domain=fx.chart.domain)
            for fx in fixtures().values()]


@app.post("/scan", response_model=ScanResponse)
async def scan(req: ScanRequest) -> ScanResponse:
    chart, _ = _resolve(req)
    rep = scan_chart(chart, nu=req.nu, nv=req.nv, tol=req.tol)
    rows = [ScanRowModel(point_class=r.point_class, **{
        f: getattr(r, f) for f in
        ("u", "v", "E", "F", "G", "L", "M", "N", "k", "kappa", "K")})
        for r in rep.rows]
    return ScanResponse(chart=rep.chart, nu=rep.nu, nv=rep.nv, rows=rows,
                        histogram=rep.histogram, singular=rep.singular)


@app.post("/info")
async def info(req: InfoRequest) -> dict:
    chart, _ = _resolve(req)
    if not chart.contains(req.u, req.v):
        raise DomainError(
            f"point ({req.u}, {req.v}) is outside the chart domain")
    return asdict(point_info(chart, req.u, req.v, tol=req.tol,
                             h_frame=req.h_frame))


@app.post("/validate", response_model=ValidateResponse)
async def validate(req: ValidateRequest) -> ValidateResponse:
    chart, meridian = _resolve(req)
    rep = validate_chart(chart, nu=req.nu, nv=req.nv, tol=req.tol,
                         h_frame=req.h_frame, meridian=meridian)
    return ValidateResponse(chart=rep.chart, passed=rep.passed,
                            checks=[CheckRowModel(**asdict(c))
                                    for c in rep.checks])
