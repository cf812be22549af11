"""Immutable syntax trees for the evidence logic.

Formulas are built from hypothesis and observation atoms, comparisons of a
polynomial against an integer, negation, binary conjunction, universal
quantification and (in the dynamic dialect) next-time.  Every other
connective is an abbreviation expanded by the parser.

Polynomials are tuples of monomials.  A monomial carries an integer
coefficient and a sorted tuple of factors; constants never appear on the
left of a comparison because the parser moves them to the right.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

from ..errors import InvalidStructure


@dataclass(frozen=True)
class Signature:
    hypotheses: tuple[str, ...]
    observations: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        object.__setattr__(self, "observations", tuple(self.observations))
        for what, names in (("hypotheses", self.hypotheses), ("observations", self.observations)):
            if not names:
                raise InvalidStructure(f"signature needs at least one of {what}")
            if len(set(names)) != len(names):
                raise InvalidStructure(f"duplicate {what} in signature")
        if set(self.hypotheses) & set(self.observations):
            raise InvalidStructure("hypothesis and observation names overlap")

    @classmethod
    def of_space(cls, space) -> "Signature":
        return cls(space.hypotheses, space.observations)

    def __contains__(self, name: str) -> bool:
        return name in self.hypotheses or name in self.observations


# -- formulas -------------------------------------------------------------------------


@dataclass(frozen=True)
class HypAtom:
    name: str


@dataclass(frozen=True)
class ObsAtom:
    name: str


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


class Op(enum.Enum):
    GE = ">="
    GT = ">"
    EQ = "="


@dataclass(frozen=True)
class Compare:
    """``poly op constant`` with integer coefficients and constant."""

    poly: "Poly"
    op: Op
    constant: int


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Next:
    body: "Formula"


Formula = Union[HypAtom, ObsAtom, Not, And, Compare, ForAll, Next]
HypFormula = Formula  # restricted to HypAtom, Not, And


# -- terms -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Prior:
    rho: HypFormula


@dataclass(frozen=True)
class Posterior:
    rho: HypFormula


@dataclass(frozen=True)
class Weight:
    seq: tuple[str, ...]
    h: str


@dataclass(frozen=True)
class Var:
    name: str


Factor = Union[Prior, Posterior, Weight, Var]


@dataclass(frozen=True)
class Monomial:
    coef: int
    factors: tuple[Factor, ...]


Poly = tuple[Monomial, ...]


def neg(f: Formula) -> Formula:
    """Negation that cancels an outer negation instead of stacking one."""
    return f.body if isinstance(f, Not) else Not(f)


def disj(a: Formula, b: Formula) -> Formula:
    return neg(And(neg(a), neg(b)))


def implies(a: Formula, b: Formula) -> Formula:
    return neg(And(a, neg(b)))


def iff(a: Formula, b: Formula) -> Formula:
    return And(implies(a, b), implies(b, a))


def exists(var: str, body: Formula) -> Formula:
    return neg(ForAll(var, neg(body)))


def conj(*parts: Formula) -> Formula:
    """Left-nested conjunction of one or more formulas."""
    if not parts:
        raise ValueError("conj needs at least one formula")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def true_formula(sig: Signature) -> Formula:
    h = HypAtom(sig.hypotheses[0])
    return disj(h, Not(h))


def false_formula(sig: Signature) -> Formula:
    return neg(true_formula(sig))
