"""Sparse multivariate polynomials over numbered real variables.

A polynomial is a ``dict`` from monomials to Fraction coefficients, where a
monomial is a sorted tuple of variable indices (repetition means a power).
The empty tuple is the constant monomial.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

Poly = dict


def const(c) -> Poly:
    c = Fraction(c)
    return {(): c} if c else {}


def var(i: int) -> Poly:
    return {(i,): Fraction(1)}


def add(*polys: Mapping) -> Poly:
    out: dict = {}
    for p in polys:
        for m, c in p.items():
            out[m] = out.get(m, Fraction(0)) + c
    return {m: c for m, c in out.items() if c}


def scale(p: Mapping, c) -> Poly:
    c = Fraction(c)
    return {m: v * c for m, v in p.items()} if c else {}


def sub(a: Mapping, b: Mapping) -> Poly:
    return add(a, scale(b, -1))


def mul(a: Mapping, b: Mapping) -> Poly:
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = tuple(sorted(ma + mb))
            out[m] = out.get(m, Fraction(0)) + ca * cb
    return {m: c for m, c in out.items() if c}


def total(polys: Sequence[Mapping]) -> Poly:
    return add(*polys) if polys else {}


def evaluate(p: Mapping, point: Sequence) -> Fraction | float:
    """Value at ``point``; exact when the point holds Fractions."""
    acc = 0
    for m, c in p.items():
        term = c
        for i in m:
            term = term * point[i]
        acc = acc + term
    return acc


def degree(p: Mapping) -> int:
    return max((len(m) for m in p), default=0)


def variables(p: Mapping) -> set[int]:
    return {i for m in p for i in m}


class CompiledPoly:
    """Float evaluation and gradient of a fixed polynomial."""

    __slots__ = ("terms", "constant")

    def __init__(self, p: Mapping):
        self.constant = float(p.get((), 0))
        self.terms = [(float(c), m) for m, c in p.items() if m]

    def value(self, v: Sequence[float]) -> float:
        acc = self.constant
        for c, m in self.terms:
            for i in m:
                c *= v[i]
            acc += c
        return acc

    def gradient_into(self, v: Sequence[float], row, weight: float = 1.0) -> None:
        for c, m in self.terms:
            c *= weight
            for k, i in enumerate(m):
                g = c
                for j, other in enumerate(m):
                    if j != k:
                        g *= v[other]
                row[i] += g
