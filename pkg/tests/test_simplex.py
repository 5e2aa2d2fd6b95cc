from fractions import Fraction as F

import pytest

from couples.simplex import LPProblem, SolverError, check_solution, simplex_solve


def test_one_constraint_sanity():
    lp = LPProblem("sanity")
    lp.add_ge({"C": 1}, F(9, 8))
    lp.minimize({"C": 1})
    for mode in ("rational", "float"):
        sol = simplex_solve(lp, mode)
        assert sol.value(lp, "C") == pytest.approx(F(9, 8)) and sol.objective == pytest.approx(1.125)
    assert simplex_solve(lp, "rational").objective == F(9, 8)


def _small_lp():
    # min x + 2y + 3z  s.t.  x + y + z = 3,  x <= 1,  y - z >= -1/2
    lp = LPProblem("small")
    lp.add_eq({"x": 1, "y": 1, "z": 1}, 3)
    lp.add_le({"x": 1}, 1)
    lp.add_ge({"y": 1, "z": -1}, F(-1, 2))
    lp.minimize({"x": 1, "y": 2, "z": 3})
    return lp


def test_rational_matches_float_and_duals():
    lp = _small_lp()
    exact = simplex_solve(lp, "rational")
    approx = simplex_solve(lp, "float")
    # x = 1, then y + z = 2 with y - z >= -1/2 gives y = 2, z = 0
    assert exact.objective == 5 and exact.dual_value == 5
    assert [exact.value(lp, v) for v in "xyz"] == [1, 2, 0]
    assert approx.objective == pytest.approx(5, abs=1e-9)


def test_degenerate_and_redundant_rows():
    lp = LPProblem("redundant")
    lp.add_eq({"a": 1, "b": 1}, 2)
    lp.add_eq({"a": 2, "b": 2}, 4)
    lp.add_le({"a": 1}, 0)
    lp.minimize({"b": 1})
    assert simplex_solve(lp).objective == 2


def test_infeasible_reported():
    lp = LPProblem("bad")
    lp.add_le({"x": 1}, -1)
    lp.minimize({"x": 1})
    for mode in ("rational", "float"):
        with pytest.raises(SolverError):
            simplex_solve(lp, mode)


def test_unbounded_reported():
    lp = LPProblem("unbounded")
    lp.add_le({"x": 1}, 3)
    lp.minimize({"x": -1, "y": -1})
    with pytest.raises(SolverError):
        simplex_solve(lp, "rational")


def test_checker_rejects_tampered_solution():
    lp = _small_lp()
    sol = simplex_solve(lp)
    sol.x[0] = F(2)
    with pytest.raises(SolverError):
        check_solution(lp, sol)
