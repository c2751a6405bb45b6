"""Reduction of Artin-Schreier defining equations over Laurent series
fields by ramified base changes and p-th-root replacements, with
independently checkable reduction certificates."""

from .errors import InternalInvariantError, ParseError, PreconditionError
from .fields import FieldParams, FqElem, Poly, RatFunc, format_ratfunc, parse_ratfunc, poly_gcd
from .equation import (
    ASEquation,
    PassPlan,
    PassRecord,
    ReductionTrace,
    SetsIJ,
    TerminalState,
    TerminalTag,
    apply_pass,
    choose_nu,
    classify,
    compute_mu,
    compute_sets,
    plan_pass,
    ramify,
    reduce,
)
from .certificate import (
    LaurentPoly,
    Violation,
    as_operator,
    trace_from_json,
    trace_to_json,
    verify_pass,
    verify_trace,
)
from .diffcheck import (
    DiffReport,
    GenConfig,
    differential_campaign,
    generate_equation,
    make_collision_family,
    run_single_pass_claim,
)

__version__ = "0.1.0"
