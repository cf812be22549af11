"""Canonical concrete syntax; ``parse(to_text(f), sig) == f`` for parsed formulas."""

from __future__ import annotations

from .ast import (
    And,
    Compare,
    ForAll,
    HypAtom,
    Monomial,
    Next,
    Not,
    ObsAtom,
    Posterior,
    Prior,
    Var,
    Weight,
)


def factor_text(f) -> str:
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Prior):
        return f"Pr0({to_text(f.rho)})"
    if isinstance(f, Posterior):
        return f"Pr({to_text(f.rho)})"
    if isinstance(f, Weight):
        if len(f.seq) == 1:
            return f"w({f.seq[0]}, {f.h})"
        return f"w([{', '.join(f.seq)}], {f.h})"
    raise TypeError(f"not a factor: {f!r}")


def monomial_text(m: Monomial) -> str:
    body = "*".join(factor_text(f) for f in m.factors)
    if m.coef == 1:
        return body
    if m.coef == -1:
        return "-" + body
    return f"{m.coef}*{body}"


def poly_text(poly) -> str:
    return " + ".join(monomial_text(m) for m in poly) if poly else "0"


def to_text(f) -> str:
    if isinstance(f, (HypAtom, ObsAtom)):
        return f.name
    if isinstance(f, Not):
        inner = to_text(f.body)
        return f"!({inner})" if isinstance(f.body, Compare) else "!" + inner
    if isinstance(f, And):
        return f"({to_text(f.left)} & {to_text(f.right)})"
    if isinstance(f, Compare):
        return f"{poly_text(f.poly)} {f.op.value} {f.constant}"
    if isinstance(f, ForAll):
        return f"forall {f.var} ({to_text(f.body)})"
    if isinstance(f, Next):
        return f"X({to_text(f.body)})"
    raise TypeError(f"not a formula: {f!r}")
