"""Exception hierarchy shared by the whole package.

Every failure that callers are expected to handle derives from
GeometryError, so `except GeometryError` at a service boundary catches
exactly the domain failures and nothing else.
"""


class GeometryError(Exception):
    """Base class for all domain-level failures."""


class ExprSyntaxError(GeometryError):
    """Raised by the expression parser; carries the byte offset of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnknownIdentifier(GeometryError):
    """An identifier in an expression is not a known function or variable."""


class EvalError(GeometryError):
    """Numeric evaluation failed or produced a non-finite value."""


class DomainError(GeometryError):
    """A parameter point lies outside the chart's domain rectangle."""


class DegenerateMetric(GeometryError):
    """The first fundamental form is singular at the requested point."""


class NotFlatPoint(GeometryError):
    """Flat-point analysis was requested at a point that is not flat."""


class NotGeneralType(GeometryError):
    """The moving frame is undefined: the point is flat or minimal."""


class PrincipalUndefined(GeometryError):
    """Every tangent direction is principal; no distinguished pair exists."""


class FrameUndefined(GeometryError):
    """No usable normal frame could be constructed."""


class GaugeBreak(GeometryError):
    """Frame fields at neighbouring stencil points could not be aligned."""


class ArcLengthViolation(GeometryError):
    """A generator curve declared unit-speed is not parametrised by arc length."""


class NonPositiveRadius(GeometryError):
    """The profile's distance to the rotation axis is not strictly positive."""


class InfeasibleProfile(GeometryError):
    """No real unit-speed profile curve realises the requested data."""


class DegenerateRuling(GeometryError):
    """A ruled chart's director degenerates (zero or non-unit length)."""


class CurvatureVanishes(GeometryError):
    """A closed form requiring nonzero generator curvature was evaluated where it vanishes."""


class UnknownFixture(GeometryError):
    """Requested catalog fixture name does not exist."""


class SpecFileError(GeometryError):
    """A surface description file is malformed or incomplete."""


class InternalInconsistency(GeometryError):
    """Two internal computation routes disagree beyond tolerance; a bug, not bad input."""
