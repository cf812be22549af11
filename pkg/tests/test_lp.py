from fractions import Fraction

import numpy as np
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from evidence_logic.lp import LPStatus, solve_linear_system, solve_lp

F = Fraction


def test_small_maximization():
    # maximize x + y with x + 2y <= 4, 3x + y <= 6
    res = solve_lp([1, 1], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6], maximize=True)
    assert res.status is LPStatus.OPTIMAL
    assert res.x == (F(8, 5), F(6, 5))
    assert res.value == F(14, 5)


def test_infeasible_and_unbounded():
    assert solve_lp([1], A_eq=[[1]], b_eq=[-1]).status is LPStatus.INFEASIBLE
    assert solve_lp([1, 0], A_ub=[[1, -1]], b_ub=[0], maximize=True).status is LPStatus.UNBOUNDED


def test_redundant_equalities_are_dropped():
    res = solve_lp([1, 2], A_eq=[[1, 1], [2, 2]], b_eq=[1, 2])
    assert res.status is LPStatus.OPTIMAL and res.x == (1, 0)


def test_linear_system():
    assert solve_linear_system([[1, 1], [1, -1]], [2, 0]) == (1, 1)
    assert solve_linear_system([[1, 1], [2, 2]], [1, 3]) is None


small = st.integers(-4, 4)


@given(
    st.integers(1, 4).flatmap(
        lambda n: st.tuples(
            st.lists(small, min_size=n, max_size=n),
            st.lists(st.lists(small, min_size=n, max_size=n), min_size=1, max_size=3),
            st.lists(st.integers(0, 6), min_size=3, max_size=3),
        )
    )
)
def test_agrees_with_floating_point_solver(args):
    """Bounded boxes x <= 5 keep every instance feasible and bounded."""
    c, rows, rhs = args
    n = len(c)
    a_ub = rows + [[int(i == k) for i in range(n)] for k in range(n)]
    b_ub = rhs[: len(rows)] + [5] * n
    exact = solve_lp(c, A_ub=a_ub, b_ub=b_ub)
    ref = linprog(c, A_ub=np.array(a_ub, float), b_ub=np.array(b_ub, float), bounds=[(0, None)] * n)
    assert exact.status is LPStatus.OPTIMAL and ref.status == 0
    assert abs(float(exact.value) - ref.fun) < 1e-7
    for row, b in zip(a_ub, b_ub):
        assert sum(F(a) * x for a, x in zip(row, exact.x)) <= b
    assert all(x >= 0 for x in exact.x)
