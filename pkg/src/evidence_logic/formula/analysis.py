"""Structural queries on formulas: intensions, fragments, names and variables."""

from __future__ import annotations

import enum
from typing import Iterator

from .ast import (
    And,
    Compare,
    ForAll,
    HypAtom,
    Next,
    Not,
    ObsAtom,
    Posterior,
    Prior,
    Signature,
    Var,
    Weight,
)


class Fragment(enum.Enum):
    LW = "L^w"
    LEV = "L^ev"
    FOEV = "L^fo-ev"
    DYN = "L^fo-ev_dyn"


def intension(rho, sig: Signature) -> frozenset[str]:
    """The hypotheses at which the hypothesis formula ``rho`` holds."""
    if isinstance(rho, HypAtom):
        return frozenset((rho.name,))
    if isinstance(rho, Not):
        return frozenset(sig.hypotheses) - intension(rho.body, sig)
    if isinstance(rho, And):
        return intension(rho.left, sig) & intension(rho.right, sig)
    raise TypeError(f"not a hypothesis formula: {rho!r}")


def subformulas(f) -> Iterator:
    """Pre-order walk over formula nodes (terms are not entered)."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, (Not, ForAll, Next)):
            stack.append(g.body)
        elif isinstance(g, And):
            stack.extend((g.right, g.left))


def factors(f) -> Iterator:
    for g in subformulas(f):
        if isinstance(g, Compare):
            for m in g.poly:
                yield from m.factors


def free_vars(f) -> frozenset[str]:
    if isinstance(f, Compare):
        return frozenset(x.name for m in f.poly for x in m.factors if isinstance(x, Var))
    if isinstance(f, (Not, Next)):
        return free_vars(f.body)
    if isinstance(f, And):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, ForAll):
        return free_vars(f.body) - {f.var}
    return frozenset()


def next_depth(f) -> int:
    """Maximum nesting of the next-time operator."""
    if isinstance(f, Next):
        return 1 + next_depth(f.body)
    if isinstance(f, (Not, ForAll)):
        return next_depth(f.body)
    if isinstance(f, And):
        return max(next_depth(f.left), next_depth(f.right))
    return 0


def _hyp_names(rho, out: dict) -> None:
    for g in subformulas(rho):
        if isinstance(g, HypAtom):
            out[g.name] = None


def occurring_names(f) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Hypothesis and observation names mentioned in ``f``, in order of first occurrence."""
    hyps: dict[str, None] = {}
    obs: dict[str, None] = {}
    for g in subformulas(f):
        if isinstance(g, HypAtom):
            hyps[g.name] = None
        elif isinstance(g, ObsAtom):
            obs[g.name] = None
        elif isinstance(g, Compare):
            for m in g.poly:
                for x in m.factors:
                    if isinstance(x, (Prior, Posterior)):
                        _hyp_names(x.rho, hyps)
                    elif isinstance(x, Weight):
                        obs.update(dict.fromkeys(x.seq))
                        hyps[x.h] = None
    return tuple(hyps), tuple(obs)


def classify_fragment(f) -> Fragment:
    """Smallest of the four languages that contains ``f``."""
    nodes = list(subformulas(f))
    if any(isinstance(g, Next) for g in nodes) or any(
        isinstance(x, Weight) and len(x.seq) > 1 for x in factors(f)
    ):
        return Fragment.DYN
    if any(isinstance(g, ForAll) for g in nodes) or any(isinstance(x, Var) for x in factors(f)):
        return Fragment.FOEV
    for g in nodes:
        if isinstance(g, Compare):
            for m in g.poly:
                if len(m.factors) > 1 or not isinstance(m.factors[0], Weight):
                    return Fragment.LEV
    return Fragment.LW


def size(f) -> int:
    """Number of symbols, counting each factor occurrence once (the |f| measure)."""
    n = 0
    for g in subformulas(f):
        n += 1
        if isinstance(g, Compare):
            n += sum(1 + len(m.factors) for m in g.poly)
    return n
