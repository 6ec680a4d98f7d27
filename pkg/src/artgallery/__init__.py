"""Exact-arithmetic art gallery guarding toolkit.

Coordinates are rational throughout (``fractions.Fraction``); predicates,
perturbations, visibility, coverage verification and guard solving are all
exact.  See the README for the CLI and the experiment harness.
"""

from .coverage import (
    CoverageReport,
    GuardSet,
    coverage_sampling_oracle,
    verify_guard_set,
    witness_points,
)
from .errors import (
    BudgetExceeded,
    GalleryError,
    GenerationFailed,
    GuardOutsidePolygon,
    InfeasibleCandidates,
    InvalidResult,
    NonPythagoreanEdge,
    OffsetTooLarge,
    PointOutsidePolygon,
    PolygonSyntaxError,
    ValidityError,
    ZeroLengthEdge,
)
from .geometry import (
    Line,
    Location,
    Orientation,
    Point,
    Polygon,
    Segment,
    ValidityReport,
    orientation,
    point_in_polygon,
    pt,
    segment_intersection,
    validate_polygon,
)
from .perturb import (
    Model,
    PerturbationSpec,
    Pointedness,
    SampleRecord,
    check_pointedness_lemma,
    edge_inflate,
    edge_perturb,
    offset_line,
    pointedness,
    sample,
    vertex_perturb,
)
from .polyfile import emit_polygon, parse_guards, parse_polygon
from .solve import (
    BitCost,
    CandidateGrid,
    CoverInstance,
    NaiveResult,
    build_cover_instance,
    check_rounding_lemma,
    guard_bits,
    naive_algorithm,
    round_to_grid,
    solve_exact,
    solve_greedy,
    solve_polygon,
)
from .visibility import VisibilityPolygon, angle_sort_key, sees, visibility_polygon

__version__ = "0.1.0"
