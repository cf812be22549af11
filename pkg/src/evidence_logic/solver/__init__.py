"""Satisfiability of the quantifier-free static fragments."""

from .search import (
    FRESH_HYPOTHESIS,
    FRESH_OBSERVATION,
    SatResult,
    SolverOptions,
    SolverStats,
    Verdict,
    augment_signature,
    solve,
)
