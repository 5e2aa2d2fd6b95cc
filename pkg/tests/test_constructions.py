from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from couples.core import (NEG_INF, DomainError, PiecewiseLinear, StepFunction, pointwise_le,
                          primitive, random_step, rearrange)
from couples.constructions import (lambda_concave_check, least_concave_majorant,
                                   least_decreasing_majorant, level_function,
                                   level_function_via_transfer, star_star)
from couples.kcalc import L1_LINF, CoupleTag, k_functional
from couples.measure import BorelMeasure, E_lambda, ae_equal, random_measure
from conftest import atom_indicator, chi


def grid_hull(F_, xmax, n=10_000):
    """Upper concave hull of ``F_`` sampled on ``n`` points of ``[0, xmax]``, as a callable."""
    pts = [(xmax * k / n, float(F_(F(xmax) * k / n))) for k in range(n + 1)]
    hull = []
    for p in pts:
        while len(hull) >= 2 and ((hull[-1][1] - hull[-2][1]) * (p[0] - hull[-1][0])
                                  <= (p[1] - hull[-1][1]) * (hull[-1][0] - hull[-2][0])):
            hull.pop()
        hull.append(p)

    def at(x):
        for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        raise ValueError(x)
    return at


def test_majorant_examples(b, g):
    assert least_decreasing_majorant(b) == chi(0, 3)
    assert least_decreasing_majorant(g) == g
    assert least_decreasing_majorant(chi(0, 1) + chi(1, 2, 2)) == chi(0, 2, 2)


def test_concave_majorant_examples():
    Fb = PiecewiseLinear(((0, 0), (1, 0), (3, 2)), 0)
    H = least_concave_majorant(Fb)
    assert H == PiecewiseLinear(((0, 0), (3, 2)), 0)
    oracle = grid_hull(Fb, 6)
    for k in range(61):
        assert abs(float(H(F(k, 10))) - oracle(k / 10)) < 1e-9
    Fg = PiecewiseLinear(((0, 0), (1, 2), (3, 4)), 0)
    assert least_concave_majorant(Fg) == Fg
    # unbounded tail: the hull is the slope-1 ray from the origin
    Ft = PiecewiseLinear(((0, 0), (2, 1)), 1)
    Ht = least_concave_majorant(Ft)
    assert Ht == PiecewiseLinear(((0, 0),), 1)
    oracle = grid_hull(Ft, 10 ** 4)
    assert abs(oracle(2) - 2) < 1e-3


def test_concave_majorant_rejects_negative_slope():
    with pytest.raises(DomainError):
        least_concave_majorant(PiecewiseLinear(((0, 0), (1, 1)), -1))


def test_level_examples(b, g, geo):
    assert level_function(b) == chi(0, 3, F(2, 3))
    assert level_function(g) == g
    f = atom_indicator(2)
    lv = level_function(f, geo)
    assert ae_equal(lv, StepFunction(NEG_INF, (1, 3), (0, F(1, 3)), 0), geo)
    assert lv(1) == lv(2) == F(1, 3) and lv(3) == 0
    assert ae_equal(lv, level_function_via_transfer(f, geo), geo)
    assert E_lambda(geo, lv) == level_function(E_lambda(geo, f)) == chi(0, F(3, 4), F(1, 3))


def test_lambda_concave_examples(geo):
    three = BorelMeasure(atoms=((0, 1), (1, 1), (2, 1)))
    convex = PiecewiseLinear(((0, 0), (1, 0), (2, 1), (3, 3)), 2)
    assert not lambda_concave_check(convex, three)
    for f in (atom_indicator(2), atom_indicator(5, 3) + atom_indicator(1)):
        assert lambda_concave_check(least_concave_majorant(primitive(f, geo)), geo)
    # Lebesgue: agrees with slope monotonicity
    for s in range(40):
        P = primitive(random_step(s))
        assert lambda_concave_check(P, None) == P.is_concave()


def test_star_star_examples(geo, one_line):
    chi1 = atom_indicator(1)
    for x in (F(1, 10), F(1, 2), 1, F(3, 2), 2, 7):
        assert star_star(one_line, geo, x) == min(F(1), 1 / F(x))
        assert star_star(chi1, geo, x) == min(F(1), 1 / (2 * F(x)))
    f = random_step(9)
    assert star_star(f, None, 3) == k_functional(3, f, CoupleTag(L1_LINF)) / 3
    with pytest.raises(DomainError):
        star_star(f, None, 0)


seeds = st.integers(0, 10 ** 6)


@settings(max_examples=100, deadline=None)
@given(seeds, seeds)
def test_projection_laws(s1, s2):
    f, h = random_step(s1, tail_values=(0, 1)), random_step(s2)
    ft, lv, fs = least_decreasing_majorant(f), level_function(f), rearrange(f)
    assert least_decreasing_majorant(ft) == ft
    assert level_function(lv) == lv
    assert rearrange(fs) == fs and least_decreasing_majorant(fs) == fs
    assert level_function(fs) == fs
    assert rearrange(ft) == ft
    assert pointwise_le(least_decreasing_majorant(f + h), ft + least_decreasing_majorant(h))
    P, H = primitive(lv), primitive(f)
    for x in set(P.xs) | set(H.xs):
        assert P(x) >= H(x)
    lhs, rhs = primitive(level_function(f + h)), primitive(lv + level_function(h))
    for x in set(lhs.xs) | set(rhs.xs):
        assert lhs(x) <= rhs(x)


@settings(max_examples=60, deadline=None)
@given(seeds, seeds)
def test_level_two_paths(sm, sf):
    lam = random_measure(sm)
    f = random_step(sf, breakpoint_range=(-5, 5), origin=NEG_INF)
    lv = level_function(f, lam)
    assert E_lambda(lam, lv) == E_lambda(lam, level_function_via_transfer(f, lam))
    assert lambda_concave_check(primitive(lv, lam), lam)
