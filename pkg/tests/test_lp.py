"""Exact simplex solver: statuses, exactness, brute-force cross-checks."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from fairsignal.lp import EQ, GE, LE, LinearProgram, solve_lp

F = Fraction


def test_single_bound():
    lp = LinearProgram(objective=(F(1),))
    lp.add((F(1),), LE, F(3))
    res = solve_lp(lp)
    assert (res.status, res.value, res.point) == ("optimal", F(3), (F(3),))


def test_empty_feasible_region():
    lp = LinearProgram(objective=(F(1),))
    lp.add((F(1),), LE, F(-1))
    assert solve_lp(lp).status == "infeasible"


def test_unbounded():
    lp = LinearProgram(objective=(F(1), F(1)))
    lp.add((F(1), F(-1)), LE, F(1))
    assert solve_lp(lp).status == "unbounded"


def test_equalities_and_minimization():
    # min x + y subject to x + 2y == 4, x >= 1
    lp = LinearProgram(objective=(F(1), F(1)), maximize=False)
    lp.add((F(1), F(2)), EQ, F(4))
    lp.add((F(1), F(0)), GE, F(1))
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert res.value == F(5, 2)
    assert res.point == (F(1), F(3, 2))


def test_free_variable():
    # max -y with y free and y >= -7/2 expressed through a constraint
    lp = LinearProgram(objective=(F(0), F(-1)), free=frozenset({1}))
    lp.add((F(1), F(2)), EQ, F(3))
    lp.add((F(1), F(0)), LE, F(10))
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert res.point == (F(10), F(-7, 2))


def test_degenerate_constraints():
    lp = LinearProgram(objective=(F(1), F(1)))
    for _ in range(3):
        lp.add((F(1), F(1)), LE, F(1))
    lp.add((F(2), F(2)), LE, F(2))
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert res.value == F(1)


def test_redundant_equalities():
    lp = LinearProgram(objective=(F(3), F(2)))
    lp.add((F(1), F(1)), EQ, F(2))
    lp.add((F(2), F(2)), EQ, F(4))
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert res.value == F(6)
    assert res.point == (F(2), F(0))


def test_exact_rationals_survive():
    lp = LinearProgram(objective=(F(1, 3), F(1, 7)))
    lp.add((F(2, 5), F(1, 9)), LE, F(22, 45))
    lp.add((F(1), F(1)), LE, F(2))
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert res.value == F(1, 3) * res.point[0] + F(1, 7) * res.point[1]
    assert F(2, 5) * res.point[0] + F(1, 9) * res.point[1] <= F(22, 45)


def test_format_lp_dump():
    from fairsignal.lp import format_lp

    lp = LinearProgram(objective=(F(1, 3), F(1)), free=frozenset({1}))
    lp.add((F(2), F(-1)), LE, F(5, 2))
    text = format_lp(lp)
    assert text.splitlines() == [
        "max  1/3  1",
        "     2  -1  <= 5/2",
        "free x1",
    ]


def brute_force_2d(lp: LinearProgram) -> Fraction:
    """Optimal value by enumerating all constraint-pair vertices."""
    rows = [(F(1), F(0), GE, F(0)), (F(0), F(1), GE, F(0))]
    rows += [(c[0], c[1], s, r) for c, s, r in lp.constraints]

    def feasible(x, y):
        for a, b, s, r in rows:
            lhs = a * x + b * y
            if s == LE and lhs > r:
                return False
            if s == GE and lhs < r:
                return False
            if s == EQ and lhs != r:
                return False
        return True

    best = None
    for (a1, b1, _, r1), (a2, b2, _, r2) in itertools.combinations(rows, 2):
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        x = (r1 * b2 - r2 * b1) / det
        y = (a1 * r2 - a2 * r1) / det
        if feasible(x, y):
            val = lp.objective[0] * x + lp.objective[1] * y
            if best is None or val > best:
                best = val
    return best


def test_random_bounded_programs_match_vertex_enumeration():
    rng = random.Random(97)
    for _ in range(120):
        lp = LinearProgram(objective=(F(rng.randint(-4, 6)), F(rng.randint(-4, 6))))
        box = F(rng.randint(2, 9))
        lp.add((F(1), F(0)), LE, box)
        lp.add((F(0), F(1)), LE, box)
        for _ in range(rng.randint(0, 4)):
            coeffs = (F(rng.randint(-3, 4)), F(rng.randint(-3, 4)))
            sense = rng.choice((LE, GE))
            lp.add(coeffs, sense, F(rng.randint(-2, 8)))
        res = solve_lp(lp)
        expected = brute_force_2d(lp)
        if expected is None:
            assert res.status == "infeasible"
        else:
            assert res.status == "optimal"
            assert res.value == expected
