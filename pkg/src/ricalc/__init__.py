"""Exact rearrangement calculus for step functions and Lorentz-Zygmund norms."""

from .euclid import (
    InfiniteRearrangement,
    LineStepFunction,
    empirical_rearrangement,
    fractional_maximal_function,
    hilbert_transform,
    maximal_function,
    riesz_potential,
)
from .lzspaces import LZParams, NotInTable, associate_params, fundamental_function, lz_norm, lz_value
from .operators import (
    apply_P,
    apply_Q,
    apply_R,
    apply_R_prime,
    apply_S,
    apply_S_alpha,
    apply_T_alpha,
    check_PQ_duality,
)
from .optimal import (
    ClassicalOperator,
    OptimalPartnerResult,
    T_boundedness_predicate,
    lemma_lenka_check,
    lemma_unsup_check,
    optimal_partner_lookup,
)
from .piecewise import PiecewiseExpr, Term
from .stepfn import StepFunction, dilate, distribution, doublestar, hlp_compare, integrate, rearrange

__version__ = "0.1.0"

__all__ = [
    "apply_P",
    "apply_Q",
    "apply_R",
    "apply_R_prime",
    "apply_S",
    "apply_S_alpha",
    "apply_T_alpha",
    "associate_params",
    "check_PQ_duality",
    "ClassicalOperator",
    "dilate",
    "distribution",
    "doublestar",
    "empirical_rearrangement",
    "fractional_maximal_function",
    "fundamental_function",
    "hilbert_transform",
    "hlp_compare",
    "InfiniteRearrangement",
    "integrate",
    "lemma_lenka_check",
    "lemma_unsup_check",
    "LineStepFunction",
    "lz_norm",
    "lz_value",
    "LZParams",
    "maximal_function",
    "NotInTable",
    "optimal_partner_lookup",
    "OptimalPartnerResult",
    "PiecewiseExpr",
    "rearrange",
    "riesz_potential",
    "StepFunction",
    "T_boundedness_predicate",
    "Term",
]
