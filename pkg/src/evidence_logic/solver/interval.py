"""Closed float intervals with outward rounding, and a constraint contractor.

Every operation widens its result by one ulp on each side, so the computed
interval always contains the exact real result.  That is what makes a
pruned box a proof: if the enclosure of a constraint misses its target,
no point of the box satisfies the constraint.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

INF = math.inf
Interval = tuple[float, float]
EMPTY = None


def down(x: float) -> float:
    return math.nextafter(x, -INF) if math.isfinite(x) else x


def up(x: float) -> float:
    return math.nextafter(x, INF) if math.isfinite(x) else x


def enclose(q) -> Interval:
    """Tightest float interval around an exact rational."""
    f = float(q)
    if Fraction(f) == Fraction(q):
        return (f, f)
    return (down(f), up(f))


def _clean(lo: float, hi: float) -> Interval:
    if math.isnan(lo):
        lo = -INF
    if math.isnan(hi):
        hi = INF
    return (lo, hi)


def add(a: Interval, b: Interval) -> Interval:
    return _clean(down(a[0] + b[0]), up(a[1] + b[1]))


def neg(a: Interval) -> Interval:
    return (-a[1], -a[0])


def sub(a: Interval, b: Interval) -> Interval:
    return add(a, neg(b))


def _products(a: Interval, b: Interval) -> list[float]:
    out = []
    for x in a:
        for y in b:
            if (x == 0 and math.isinf(y)) or (y == 0 and math.isinf(x)):
                out.append(0.0)
            else:
                out.append(x * y)
    return out


def mul(a: Interval, b: Interval) -> Interval:
    ps = _products(a, b)
    return _clean(down(min(ps)), up(max(ps)))


def contains_zero(a: Interval) -> bool:
    return a[0] <= 0 <= a[1]


def div(a: Interval, b: Interval) -> Interval:
    """``a / b`` for ``b`` not containing zero."""
    if contains_zero(b):
        return (-INF, INF)
    qs = []
    for x in a:
        for y in b:
            qs.append(x / y)
    return _clean(down(min(qs)), up(max(qs)))


def power(a: Interval, k: int) -> Interval:
    if k == 1:
        return a
    lo, hi = a
    if k % 2 == 1:
        return _clean(down(lo**k), up(hi**k))
    if lo >= 0:
        return (down(lo**k), up(hi**k))
    if hi <= 0:
        return (down(hi**k), up(lo**k))
    return (0.0, up(max(lo**k, hi**k)))


def intersect(a: Interval, b: Interval) -> Interval | None:
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    return (lo, hi) if lo <= hi else EMPTY


def width(a: Interval) -> float:
    return a[1] - a[0]


def midpoint(a: Interval) -> float:
    return a[0] + (a[1] - a[0]) / 2


class IntervalConstraint:
    """``sum of coef * monomial`` constrained to ``[0, 0]`` or ``[0, inf)``.

    Strict constraints are relaxed to their closure: pruning a box because of
    a strict constraint needs the closed version to fail, which keeps every
    pruning decision sound.  A positive ``floor`` instead demands a margin,
    which prunes more but only refutes models with at least that slack.
    """

    __slots__ = ("terms", "target")

    def __init__(self, poly: dict, equality: bool, floor: float = 0.0):
        self.terms = []
        for m, c in poly.items():
            powers: dict[int, int] = {}
            for i in m:
                powers[i] = powers.get(i, 0) + 1
            self.terms.append((enclose(c), tuple(powers.items())))
        self.target = (0.0, 0.0) if equality else (floor, INF)

    @staticmethod
    def _monomial(powers, box) -> Interval:
        out = (1.0, 1.0)
        for i, k in powers:
            out = mul(out, power(box[i], k))
        return out

    def enclosure(self, box: Sequence[Interval]) -> Interval:
        acc = (0.0, 0.0)
        for c, powers in self.terms:
            acc = add(acc, mul(c, self._monomial(powers, box)))
        return acc

    def violated(self, box) -> bool:
        return intersect(self.enclosure(box), self.target) is EMPTY

    def contract(self, box: list) -> bool:
        """Narrow ``box`` in place; return False when it becomes empty."""
        vals = [mul(c, self._monomial(powers, box)) for c, powers in self.terms]
        n = len(vals)
        prefix = [(0.0, 0.0)]
        for v in vals:
            prefix.append(add(prefix[-1], v))
        if intersect(prefix[-1], self.target) is EMPTY:
            return False
        suffix = [(0.0, 0.0)] * (n + 1)
        for k in range(n - 1, -1, -1):
            suffix[k] = add(suffix[k + 1], vals[k])
        for k, (c, powers) in enumerate(self.terms):
            if not powers:
                continue
            rest = add(prefix[k], suffix[k + 1])
            allowed = intersect(vals[k], sub(self.target, rest))
            if allowed is EMPTY:
                return False
            if contains_zero(c):
                continue
            mono = div(allowed, c)
            for idx, (i, p) in enumerate(powers):
                other = (1.0, 1.0)
                for j, (i2, p2) in enumerate(powers):
                    if j != idx:
                        other = mul(other, power(box[i2], p2))
                if contains_zero(other):
                    continue
                target = div(mono, other)
                if p == 1:
                    cand = target
                elif p == 2 and box[i][0] >= 0:
                    if target[1] < 0:
                        return False
                    lo = math.sqrt(max(target[0], 0.0))
                    hi = math.sqrt(target[1]) if math.isfinite(target[1]) else INF
                    cand = (down(lo), up(hi))
                else:
                    continue
                narrowed = intersect(box[i], cand)
                if narrowed is EMPTY:
                    return False
                box[i] = narrowed
        return True
