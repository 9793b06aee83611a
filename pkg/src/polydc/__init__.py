"""Exact-arithmetic toolkit for polyhedral DC optimization.

Minimize g - h over a polyhedral set C, where g and h are max-affine
functions with rational data.  Everything is decided by exact rational
linear programs: point classification (critical / stationary / local /
global), decomposition of the local and global solution sets into
(semi-closed) polyhedral pieces, DCA runs with cycle detection, and
Toland-Singer duality checks.
"""

from .exactlp import (
    ExtendedRational,
    LinearProgram,
    LpOutcome,
    LpStatus,
    MINUS_INF,
    PLUS_INF,
    Vector,
    lp_feasible,
    lp_solve,
    max_slack,
    optimality_certificate,
    row_space_basis,
)
from .model import (
    ConvexBody,
    DcProblem,
    DimensionMismatch,
    EmptyIntersection,
    ImproperFunction,
    InternalCheckFailed,
    MaxAffine,
    OutsideDomain,
    PolydcError,
    PolyhedralSet,
    contains_set,
    restrict_sum,
)
from .optimality import (
    Classification,
    GlobalStatus,
    HypothesisFlags,
    LocalStatus,
    bodies_intersect,
    body_in_body,
    classify,
    is_critical,
    is_local_solution,
    is_stationary,
)
from .structure import (
    Component,
    EnumerationCapExceeded,
    HypothesisNotMet,
    LinearizationResult,
    SemiClosedPiece,
    SolutionStructure,
    components,
    global_solutions,
    local_pieces,
    segment_path,
    solution_structure,
    solve_linearization,
)
from .dca import (
    ByActiveSetTable,
    DcaTrace,
    Iterate,
    MaxIndexActive,
    MinIndexActive,
    Scripted,
    SelectionRule,
    Termination,
    TerminationKind,
    TraceValidation,
    run,
    select_subgradient,
    solve_subproblem,
    validate_trace,
)
from .duality import DualReport, dual_objective, toland_singer_check
from .gridcheck import GridReport, grid_cross_check
from .cli import parse_problem, serialize_problem

__version__ = "0.1.0"

__all__ = [
    "ByActiveSetTable",
    "Classification",
    "Component",
    "ConvexBody",
    "DcProblem",
    "DcaTrace",
    "DimensionMismatch",
    "DualReport",
    "EmptyIntersection",
    "EnumerationCapExceeded",
    "ExtendedRational",
    "GlobalStatus",
    "GridReport",
    "HypothesisFlags",
    "HypothesisNotMet",
    "ImproperFunction",
    "InternalCheckFailed",
    "Iterate",
    "LinearProgram",
    "LinearizationResult",
    "LocalStatus",
    "LpOutcome",
    "LpStatus",
    "MaxAffine",
    "MaxIndexActive",
    "MinIndexActive",
    "MINUS_INF",
    "OutsideDomain",
    "PLUS_INF",
    "PolydcError",
    "PolyhedralSet",
    "Scripted",
    "SelectionRule",
    "SemiClosedPiece",
    "SolutionStructure",
    "Termination",
    "TerminationKind",
    "TraceValidation",
    "Vector",
    "bodies_intersect",
    "body_in_body",
    "classify",
    "components",
    "contains_set",
    "dual_objective",
    "global_solutions",
    "grid_cross_check",
    "is_critical",
    "is_local_solution",
    "is_stationary",
    "local_pieces",
    "lp_feasible",
    "lp_solve",
    "max_slack",
    "optimality_certificate",
    "parse_problem",
    "restrict_sum",
    "row_space_basis",
    "run",
    "segment_path",
    "select_subgradient",
    "serialize_problem",
    "solution_structure",
    "solve_linearization",
    "solve_subproblem",
    "toland_singer_check",
    "validate_trace",
]
