"""Derivative-free minimization of black-box functions over convex hulls of atoms."""

from .core import (
    AtomSet,
    BudgetedObjective,
    BudgetExhausted,
    DfSimplexConfig,
    DropRule,
    NonFiniteValue,
    OrdConfig,
    SimplexWeights,
    combine,
    feasible_step_bound,
)
from .dfsimplex import DfSimplexResult, StopReason, df_simplex_solve
from .linesearch import LineSearchOutcome, line_search
from .ord import OrdResult, OrdStop, PoisednessFailure, ord_solve

__all__ = [
    "AtomSet",
    "BudgetedObjective",
    "BudgetExhausted",
    "DfSimplexConfig",
    "DfSimplexResult",
    "DropRule",
    "LineSearchOutcome",
    "NonFiniteValue",
    "OrdConfig",
    "OrdResult",
    "OrdStop",
    "PoisednessFailure",
    "SimplexWeights",
    "StopReason",
    "combine",
    "df_simplex_solve",
    "feasible_step_bound",
    "line_search",
    "ord_solve",
]

__version__ = "0.1.0"
