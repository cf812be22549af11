"""The polynomial feasibility problem behind one satisfiability branch.

A branch fixes the true hypothesis and observation and a set of comparison
literals that must hold.  Its unknowns are

* ``x[h]`` prior, ``y[h]`` posterior (only when the formula mentions them),
* ``z[o,h]`` weights of evidence for every observation and hypothesis,
* ``s[o]`` scalars witnessing that ``z`` is a weight function, and ``t``,
  a lower bound on the scalars that must end up strictly positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..formula.analysis import intension
from ..formula.ast import Compare, Op, Posterior, Prior, Signature, Var, Weight
from ..formula.printer import to_text
from . import poly as P

EQ, GE, GT = "=", ">=", ">"


@dataclass(frozen=True)
class Constraint:
    poly: dict = field(hash=False, compare=False)
    kind: str
    family: str

    def residual(self, point) -> Fraction | float:
        """Amount of violation; zero when satisfied (strict ones count the boundary as zero)."""
        v = P.evaluate(self.poly, point)
        if self.kind == EQ:
            return abs(v)
        return max(-v, 0)

    def holds(self, point) -> bool:
        v = P.evaluate(self.poly, point)
        return v == 0 if self.kind == EQ else (v >= 0 if self.kind == GE else v > 0)


@dataclass
class FeasibilityProblem:
    names: list[str]
    lower: list[Fraction]
    upper: list[Fraction]
    constraints: list[Constraint]
    hypothesis: str
    observation: str
    literals: tuple = ()

    def index(self, name: str) -> int:
        return self.names.index(name)

    def residual(self, point) -> float:
        return max((float(c.residual(point)) for c in self.constraints), default=0.0)


Literal = tuple  # (Compare, polarity)


def literal_constraints(lit: Literal) -> list[list[tuple[str, int]]]:
    """Alternatives, each a list of (kind, sign) with sign applied to ``p - c``.

    A negated equality splits into two strict alternatives.
    """
    cmp, positive = lit
    if positive:
        kind = {Op.GE: GE, Op.GT: GT, Op.EQ: EQ}[cmp.op]
        return [[(kind, 1)]]
    if cmp.op is Op.GE:
        return [[(GT, -1)]]
    if cmp.op is Op.GT:
        return [[(GE, -1)]]
    return [[(GT, 1)], [(GT, -1)]]


class VariableLayout:
    """Index assignment for the problem variables over a signature."""

    def __init__(self, sig: Signature, with_prior: bool, with_posterior: bool):
        self.sig = sig
        self.names: list[str] = []
        self.lower: list[Fraction] = []
        self.upper: list[Fraction] = []
        nh = len(sig.hypotheses)
        self.with_prior = with_prior or with_posterior
        self.with_posterior = with_posterior
        self.x = {h: self._add(f"x[{h}]", 0, 1) for h in sig.hypotheses} if self.with_prior else {}
        self.y = {h: self._add(f"y[{h}]", 0, 1) for h in sig.hypotheses} if with_posterior else {}
        self.z = {
            (o, h): self._add(f"z[{o},{h}]", 0, 1) for o in sig.observations for h in sig.hypotheses
        }
        self.s = {o: self._add(f"s[{o}]", 0, nh) for o in sig.observations}
        self.t = self._add("t", 0, nh)

    def _add(self, name, lo, hi) -> int:
        self.names.append(name)
        self.lower.append(Fraction(lo))
        self.upper.append(Fraction(hi))
        return len(self.names) - 1

    def term(self, factor) -> dict:
        sig = self.sig
        if isinstance(factor, Prior):
            return P.total([P.var(self.x[h]) for h in sig.hypotheses if h in intension(factor.rho, sig)])
        if isinstance(factor, Posterior):
            return P.total([P.var(self.y[h]) for h in sig.hypotheses if h in intension(factor.rho, sig)])
        if isinstance(factor, Weight):
            return P.var(self.z[(factor.seq[0], factor.h)])
        if isinstance(factor, Var):
            raise TypeError("variables are not allowed in satisfiability queries")
        raise TypeError(f"not a factor: {factor!r}")

    def comparison_poly(self, cmp: Compare) -> dict:
        """``p - c`` for the comparison's polynomial ``p`` and constant ``c``."""
        acc = []
        for m in cmp.poly:
            term = P.const(m.coef)
            for f in m.factors:
                term = P.mul(term, self.term(f))
            acc.append(term)
        return P.add(P.total(acc), P.const(-cmp.constant))

    def structural_constraints(self, ob: str) -> list[Constraint]:
        sig = self.sig
        out: list[Constraint] = []
        one = P.const(1)
        if self.with_prior:
            out.append(Constraint(P.sub(P.total([P.var(i) for i in self.x.values()]), one), EQ, "prior-simplex"))
        if self.with_posterior:
            normalizer = P.total([P.mul(P.var(self.x[h]), P.var(self.z[(ob, h)])) for h in sig.hypotheses])
            out.append(Constraint(normalizer, GT, "normalizer"))
            out.append(Constraint(P.sub(P.total([P.var(i) for i in self.y.values()]), one), EQ, "posterior-simplex"))
            for h in sig.hypotheses:
                upd = P.sub(
                    P.mul(P.var(self.y[h]), normalizer),
                    P.mul(P.var(self.x[h]), P.var(self.z[(ob, h)])),
                )
                out.append(Constraint(upd, EQ, "update"))
        for o in sig.observations:
            row = P.total([P.var(self.z[(o, h)]) for h in sig.hypotheses])
            out.append(Constraint(P.sub(row, one), EQ, "weight-simplex"))
        for h in sig.hypotheses:
            col = P.total([P.mul(P.var(self.z[(o, h)]), P.var(self.s[o])) for o in sig.observations])
            out.append(Constraint(P.sub(col, one), EQ, "scalars"))
        scal = P.total([P.var(i) for i in self.s.values()])
        out.append(Constraint(P.sub(scal, P.const(len(sig.hypotheses))), EQ, "scalar-sum"))
        for o in sig.observations:
            out.append(Constraint(P.sub(P.var(self.s[o]), P.var(self.t)), GE, "scalar-bound"))
        out.append(Constraint(P.var(self.t), GT, "scalar-positive"))
        return out


def build_problem(
    layout: VariableLayout, h: str, ob: str, literals: list[tuple[Compare, int, str]]
) -> FeasibilityProblem:
    """``literals`` are (comparison, sign, kind): ``sign * (p - c) kind 0``."""
    cons = layout.structural_constraints(ob)
    for cmp, sign, kind in literals:
        body = P.scale(layout.comparison_poly(cmp), sign)
        cons.append(Constraint(body, kind, ("" if sign > 0 else "-") + f"[{to_text(cmp)}]"))
    return FeasibilityProblem(
        list(layout.names), list(layout.lower), list(layout.upper), cons, h, ob, tuple(literals)
    )
