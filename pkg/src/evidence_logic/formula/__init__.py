"""Syntax of the evidence logic: trees, parser, printer and structural queries."""

from .ast import (
    And,
    Compare,
    ForAll,
    HypAtom,
    Monomial,
    Next,
    Not,
    ObsAtom,
    Op,
    Posterior,
    Prior,
    Signature,
    Var,
    Weight,
)
from .analysis import Fragment, classify_fragment, free_vars, intension, next_depth, occurring_names
from .parser import DYNAMIC, STATIC, parse, parse_file_text
from .printer import to_text
