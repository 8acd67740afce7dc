"""Exact decision procedures and certificates for Smyth tuples.

The package decides whether a coefficient tuple admits balanced multisets
over F_q[t], the integers, or a quadratic number ring, and emits certificates
that can be re-verified independently of the search that produced them.
"""
from .algebra import FieldParams, Poly, parse_poly
from .bounds import (
    ExtremalInstance,
    OrderBoundCertificate,
    construct_extremal_fqt,
    construct_extremal_int,
    min_balanced_search,
    order_bound_fqt,
    order_bound_int,
    verify_extremal,
)
from .core import (
    DEFAULT_BUDGET,
    BalancedMultiset,
    CoeffTuple,
    PermutationCertificate,
    balanced_from_certificate,
    balanced_multiset,
    certificate_from_balanced,
    check_criteria,
    enumerate_solutions,
    fiber_count,
    verify_certificate,
)
from .errors import (
    BridgeError,
    BudgetExceededError,
    EqualityHypothesisError,
    NonUnitError,
    NoRelationError,
    NotSmythTupleError,
    ParseError,
    PrecisionError,
    RelationViolationError,
    SmythError,
    TupleArityError,
)
from .heuristic import GroupFamily, limit_scan, monte_carlo, p_n_closed_form
from .numfield import (
    NumfieldCertificate,
    birkhoff_decompose,
    covering_radius_squared,
    lattice_rounding_step,
    numfield_pipeline,
    perron_bridge,
    rou_relation_search,
    rou_twist,
    strong_criteria_check,
    unimodular_extract,
    verify_numfield_certificate,
)
from .quadratic import CycInt, QuadField, QuadInt, SqrtSum, cyclotomic_poly
from .serialize import canonical_json, extremal_doc, multiset_doc, numfield_doc, verify_doc

__version__ = "0.1.0"

__all__ = [
    "BalancedMultiset",
    "BridgeError",
    "BudgetExceededError",
    "CoeffTuple",
    "CycInt",
    "DEFAULT_BUDGET",
    "EqualityHypothesisError",
    "ExtremalInstance",
    "FieldParams",
    "GroupFamily",
    "NonUnitError",
    "NoRelationError",
    "NotSmythTupleError",
    "NumfieldCertificate",
    "OrderBoundCertificate",
    "ParseError",
    "PermutationCertificate",
    "Poly",
    "PrecisionError",
    "QuadField",
    "QuadInt",
    "RelationViolationError",
    "SmythError",
    "SqrtSum",
    "TupleArityError",
    "balanced_from_certificate",
    "balanced_multiset",
    "birkhoff_decompose",
    "canonical_json",
    "certificate_from_balanced",
    "check_criteria",
    "construct_extremal_fqt",
    "construct_extremal_int",
    "covering_radius_squared",
    "cyclotomic_poly",
    "enumerate_solutions",
    "extremal_doc",
    "fiber_count",
    "lattice_rounding_step",
    "limit_scan",
    "min_balanced_search",
    "monte_carlo",
    "multiset_doc",
    "numfield_doc",
    "numfield_pipeline",
    "order_bound_fqt",
    "order_bound_int",
    "p_n_closed_form",
    "parse_poly",
    "perron_bridge",
    "rou_relation_search",
    "rou_twist",
    "strong_criteria_check",
    "unimodular_extract",
    "verify_certificate",
    "verify_doc",
    "verify_extremal",
    "verify_numfield_certificate",
]
