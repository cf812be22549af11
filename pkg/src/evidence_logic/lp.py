"""Exact two-phase simplex over the rationals.

Problems here are tiny (tens of variables) so a dense tableau of Fractions
is fine.  Bland's rule picks both the entering and the leaving variable,
which rules out cycling and makes results reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)


class LPStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None


def _pivot(T, b, basis, r, k):
    piv = T[r][k]
    row = T[r]
    for j in range(len(row)):
        row[j] /= piv
    b[r] /= piv
    for i in range(len(T)):
        if i != r and T[i][k] != 0:
            f = T[i][k]
            Ti = T[i]
            for j in range(len(Ti)):
                if row[j]:
                    Ti[j] -= f * row[j]
            b[i] -= f * b[r]
    basis[r] = k


def _minimize(T, b, basis, cost, allowed):
    """Run Bland's-rule simplex on a tableau already in canonical form."""
    while True:
        entering = None
        for j in allowed:
            if j in basis:
                continue
            reduced = cost[j] - sum(cost[basis[i]] * T[i][j] for i in range(len(T)) if T[i][j])
            if reduced < 0:
                entering = j
                break
        if entering is None:
            return True
        best = None
        for i in range(len(T)):
            a = T[i][entering]
            if a > 0:
                ratio = b[i] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return False
        _pivot(T, b, basis, best[1], entering)


def solve_lp(
    c: Sequence,
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    maximize: bool = False,
) -> LPResult:
    """Optimize ``c @ x`` subject to ``A_eq x = b_eq``, ``A_ub x <= b_ub``, ``x >= 0``."""
    n = len(c)
    rows = [[Fraction(a) for a in r] for r in A_eq]
    rhs = [Fraction(v) for v in b_eq]
    n_slack = len(A_ub)
    for r in rows:
        r.extend([ZERO] * n_slack)
    for k, (r, v) in enumerate(zip(A_ub, b_ub)):
        row = [Fraction(a) for a in r] + [ZERO] * n_slack
        row[n + k] = Fraction(1)
        rows.append(row)
        rhs.append(Fraction(v))
    width = n + n_slack
    if any(len(r) != width for r in rows):
        raise ValueError("constraint rows do not match the number of variables")
    for i in range(len(rows)):
        if rhs[i] < 0:
            rows[i] = [-a for a in rows[i]]
            rhs[i] = -rhs[i]
    m = len(rows)
    # phase one: one artificial per row
    T = [r + [Fraction(int(i == k)) for k in range(m)] for i, r in enumerate(rows)]
    basis = [width + i for i in range(m)]
    cost1 = [ZERO] * width + [Fraction(1)] * m
    _minimize(T, rhs, basis, cost1, range(width + m))
    if sum(rhs[i] for i in range(m) if basis[i] >= width) != 0:
        return LPResult(LPStatus.INFEASIBLE)
    # drive remaining artificials out, dropping redundant rows
    i = 0
    while i < len(T):
        if basis[i] >= width:
            k = next((j for j in range(width) if T[i][j] != 0), None)
            if k is None:
                del T[i], rhs[i], basis[i]
                continue
            _pivot(T, rhs, basis, i, k)
        i += 1
    for r in T:
        del r[width:]
    sign = -1 if maximize else 1
    cost2 = [sign * Fraction(v) for v in c] + [ZERO] * n_slack
    if not _minimize(T, rhs, basis, cost2, range(width)):
        return LPResult(LPStatus.UNBOUNDED)
    x = [ZERO] * width
    for i, j in enumerate(basis):
        x[j] = rhs[i]
    value = sum(Fraction(cj) * xj for cj, xj in zip(c, x))
    return LPResult(LPStatus.OPTIMAL, tuple(x[:n]), value)


def solve_linear_system(A: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...] | None:
    """Some exact solution of ``A x = b`` (free sign), or None if inconsistent."""
    m = len(A)
    n = len(A[0]) if m else 0
    M = [[Fraction(a) for a in row] + [Fraction(v)] for row, v in zip(A, b)]
    pivots = []
    r = 0
    for col in range(n):
        p = next((i for i in range(r, m) if M[i][col] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        pv = M[r][col]
        M[r] = [a / pv for a in M[r]]
        for i in range(m):
            if i != r and M[i][col] != 0:
                f = M[i][col]
                M[i] = [a - f * c for a, c in zip(M[i], M[r])]
        pivots.append(col)
        r += 1
    if any(all(a == 0 for a in M[i][:n]) and M[i][n] != 0 for i in range(r, m)):
        return None
    x = [ZERO] * n
    for i, col in enumerate(pivots):
        x[col] = M[i][n]
    return tuple(x)
