"""Plain-text surface description files.

A surface file is line based: blank lines and lines starting with # are
ignored, every other line is `key = value`.  Coordinate expressions may be
wrapped in single or double quotes; ranges are two comma-separated values,
each a constant expression (so `0, 2*pi` works).

    # a sphere inside a hyperplane
    name = sphere
    x1 = "cos(u)*cos(v)"
    x2 = "cos(u)*sin(v)"
    x3 = "sin(u)"
    x4 = "0"
    u_range = -1.2, 1.2
    v_range = 0, 2*pi
"""

from __future__ import annotations

from dataclasses import dataclass

from .charts import Chart
from .errors import SpecFileError
from .expressions import compile_chart, evaluate, parse, variables

_REQUIRED = ("x1", "x2", "x3", "x4", "u_range", "v_range")
_KNOWN = set(_REQUIRED) | {"name"}


@dataclass(frozen=True)
class SurfaceSpec:
    """Parsed content of a surface description file."""

    name: str
    coords: tuple[str, str, str, str]
    u_range: tuple[float, float]
    v_range: tuple[float, float]


def _unquote(value: str) -> str:
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
        return value[1:-1]
    return value


def _constant(text: str, key: str, line_no: int) -> float:
    try:
        tree = parse(text)
    except Exception as exc:
        raise SpecFileError(
            f"line {line_no}: cannot parse {key} bound {text!r}: {exc}") from exc
    if variables(tree):
        raise SpecFileError(
            f"line {line_no}: {key} bound {text!r} must be constant")
    return evaluate(tree, 0.0, 0.0)


def _range(value: str, key: str, line_no: int) -> tuple[float, float]:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != 2:
        raise SpecFileError(
            f"line {line_no}: {key} must be two comma-separated values")
    lo, hi = (_constant(p, key, line_no) for p in parts)
    if not lo < hi:
        raise SpecFileError(
            f"line {line_no}: {key} = ({lo:g}, {hi:g}) is not an interval")
    return (lo, hi)


def parse_spec_text(text: str, default_name: str = "surface") -> SurfaceSpec:
    """Parse surface-file content; raises SpecFileError on any malformation."""
    seen: dict[str, tuple[str, int]] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SpecFileError(f"line {line_no}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in _KNOWN:
            raise SpecFileError(f"line {line_no}: unknown key {key!r}")
        if key in seen:
            raise SpecFileError(f"line {line_no}: duplicate key {key!r}")
        if not value:
            raise SpecFileError(f"line {line_no}: empty value for {key!r}")
        seen[key] = (value, line_no)

    missing = [k for k in _REQUIRED if k not in seen]
    if missing:
        raise SpecFileError(f"missing required keys: {', '.join(missing)}")

    coords = tuple(_unquote(seen[k][0]) for k in ("x1", "x2", "x3", "x4"))
    for k, c in zip(("x1", "x2", "x3", "x4"), coords):
        try:
            parse(c)
        except Exception as exc:
            raise SpecFileError(f"cannot parse {k} = {c!r}: {exc}") from exc
    name = seen.get("name", (default_name, 0))[0]
    uval, uline = seen["u_range"]
    vval, vline = seen["v_range"]
    return SurfaceSpec(
        name=_unquote(name),
        coords=coords,
        u_range=_range(uval, "u_range", uline),
        v_range=_range(vval, "v_range", vline),
    )


def load_spec_file(path: str) -> SurfaceSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecFileError(f"cannot read {path!r}: {exc}") from exc
    default = path.rsplit("/", 1)[-1].rsplit(".", 1)[0]
    return parse_spec_text(text, default_name=default)


def build_chart(spec: SurfaceSpec, jets: str = "analytic",
                fd_step: float | None = None) -> Chart:
    """Chart from a parsed spec; `jets` picks exact or finite-difference mode."""
    chart = compile_chart(*spec.coords, domain=(spec.u_range, spec.v_range),
                          name=spec.name)
    if jets == "analytic":
        return chart
    if jets == "fd":
        return chart.with_fd(fd_step)
    raise SpecFileError(f"jets must be 'analytic' or 'fd', not {jets!r}")
