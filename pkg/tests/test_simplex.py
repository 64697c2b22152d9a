import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from bushgeo.simplex import LPInfeasible, LPUnbounded, solve_lp

F = Fraction


def test_one_constraint():
    # min x + y on x + 2y = 4: objective = 4 - y, minimized at y = 2
    sol = solve_lp([1, 1], [[1, 2]], [4])
    assert sol.value == 2
    assert sol.x == [F(0), F(2)]


def test_negative_cost():
    sol = solve_lp([-1, 0], [[1, 1]], [1])
    assert sol.value == -1
    assert sol.x[0] == 1


def test_degenerate_redundant_rows():
    sol = solve_lp([1, 1], [[1, 2], [1, 2]], [4, 4])
    assert sol.value == 2


def test_negative_rhs_normalized():
    # -x - 2y = -4 is the same line as x + 2y = 4
    sol = solve_lp([1, 1], [[-1, -2]], [-4])
    assert sol.value == 2


def test_infeasible():
    with pytest.raises(LPInfeasible):
        solve_lp([1, 1], [[1, 1], [1, 1]], [1, 2])


def test_unbounded():
    with pytest.raises(LPUnbounded):
        solve_lp([-1, 0], [[1, -1]], [0])


def test_zero_rows():
    sol = solve_lp([1, 1], [], [])
    assert sol.value == 0


def test_exact_rationals():
    sol = solve_lp([F(1, 3), F(1, 7)], [[F(2, 5), F(1, 5)]], [F(1)])
    # cheapest unit of constraint per cost: x: (1/3)/(2/5) = 5/6, y: (1/7)/(1/5) = 5/7
    assert sol.value == F(5, 7)
    assert sol.x == [F(0), F(5)]


def test_against_scipy_on_random_instances():
    rng = random.Random(42)
    for trial in range(25):
        m, n = rng.randint(1, 4), rng.randint(2, 7)
        rows = [[F(rng.randint(-4, 4)) for _ in range(n)] for _ in range(m)]
        x0 = [F(rng.randint(0, 3)) for _ in range(n)]
        rhs = [sum(r * x for r, x in zip(row, x0)) for row in rows]  # feasible by design
        cost = [F(rng.randint(1, 5)) for _ in range(n)]  # positive -> bounded
        sol = solve_lp(cost, rows, rhs)
        res = linprog(
            [float(c) for c in cost],
            A_eq=np.array([[float(a) for a in row] for row in rows]),
            b_eq=np.array([float(b) for b in rhs]),
            bounds=(0, None),
            method="highs",
        )
        assert res.status == 0, trial
        assert float(sol.value) == pytest.approx(res.fun, abs=1e-7)
        # the exact solution really satisfies the constraints
        for row, b in zip(rows, rhs):
            assert sum(r * x for r, x in zip(row, sol.x)) == b
        assert all(x >= 0 for x in sol.x)
