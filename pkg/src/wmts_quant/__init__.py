"""Quantitative specification theory for weighted modal transition systems."""

from .distance import (
    DEFAULT_LAMBDA,
    DEFAULT_TOL,
    DistTable,
    RefinementFamily,
    check_refinement_family,
    family_from_table,
    finite_pairs,
    impl_dist,
    impl_label_dist,
    label_dist,
    modal_dist,
    refines_eps,
)
from .games import GameGraph, Strategy, discounted_value, game_modal_dist, reduce_to_game
from .io import dump, dumps, load, loads
from .logic import Box, Diamond, Ff, Or, Tt, evaluate, format_formula, is_disjunction_free, parse_formula
from .logic import And as AndF
from .model import (
    Diagnostics,
    ImplLabel,
    SpecLabel,
    WeightInterval,
    Wmts,
    is_deterministic,
    is_implementation,
    label,
    label_refines,
    validate,
)
from .operators import (
    NotDeterministicError,
    compose,
    conjoin,
    determinize,
    is_relaxation,
    label_conj,
    label_minus,
    label_plus,
    prune,
    quotient,
    widen,
)
from .thorough import DistEstimate, UnrollBudget, enum_implementations, in_extended_semantics, thorough_dist_approx, truncate

__version__ = "0.1.0"
