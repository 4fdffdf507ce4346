"""Curvature invariants and moving frames for surfaces in 4-space."""

__version__ = "0.1.0"

from .charts import Chart, Jet2, Metric, eval_jet2, metric, regularity
from .errors import GeometryError
from .expressions import compile_chart, differentiate, evaluate, parse, to_text
from .invariants import (
    FlatPointReport,
    FlatVerdict,
    InvariantSet,
    NormalFrame,
    PointClass,
    SecondFundamental,
    WeingartenForm,
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
from .frenet import (
    FrenetData,
    FrenetFrame,
    ResidualReport,
    flat_normal_connection_test,
    frenet_coefficients,
    geometric_frame,
    integrability_residuals,
)
from .catalog import (
    Fixture,
    RotationalCurve,
    RuledData,
    constant_k_family,
    fixtures,
    get_fixture,
    meridian_by_arc_length,
    meridian_from_expressions,
    rotational_chart,
    rotational_closed_forms,
    ruled_chart,
    ruled_data,
)
from .transforms import (
    affine_reparametrization,
    reparametrization_at,
    rigid_motion,
    rotated_frame,
)
from .specfile import SurfaceSpec, build_chart, load_spec_file, parse_spec_text
from .reports import (
    CheckRow,
    PointReport,
    ScanReport,
    ScanRow,
    ValidationReport,
    point_info,
    scan_chart,
    validate_chart,
)
