from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from couples.constructions import least_decreasing_majorant
from couples.core import DomainError, StepFunction, pointwise_le, random_step
from couples.kcalc import space_norm
from couples.operators import (S_BOUNDS, GridOperator, GridSpec, Multiplier, SOperator, S_op,
                               apply, discretize_operator, grid_operator_norms,
                               level_majorization_witness, mbar, multiplier_W3, s_norm_ratios)
from conftest import chi


def s_bruteforce(h, x):
    """Sh(x) straight from the dyadic definition."""
    j = 0
    while F(2) ** (j + 1) <= x:
        j += 1
    while F(2) ** j > x:
        j -= 1
    lo, hi = F(2) ** (j - 1), F(2) ** j
    return h.integral(lo, hi) / (hi - lo)


def test_S_examples():
    assert S_op(chi(1, 2)) == chi(2, 4)
    h = chi(0, 2)
    Sh = S_op(h)
    assert pointwise_le(h, Sh)
    assert Sh == chi(0, 4)
    assert S_op(StepFunction.constant(0)).is_zero


@pytest.mark.parametrize("seed", range(20))
def test_S_matches_definition(seed):
    h = random_step(seed, dyadic=True, tail_values=(0, 1))
    Sh = S_op(h)
    for k in range(1, 200):
        x = F(k, 8)
        assert Sh(x) == s_bruteforce(h, x)


def test_s_ratio_examples():
    assert s_norm_ratios(chi(1, 2)) == (1, 2, 4, 2)
    r = s_norm_ratios(chi(0, 1))
    assert all(v <= bnd for v, bnd in zip(r, S_BOUNDS))
    with pytest.raises(DomainError):
        s_norm_ratios(StepFunction.constant(0))
    with pytest.raises(DomainError):
        s_norm_ratios(StepFunction.constant(1))


def test_W3_examples(b, g):
    W = multiplier_W3(b)
    assert W(chi(0, 3)) == b
    Wg = multiplier_W3(g)
    assert Wg(g) == g and Wg.weight == chi(0, 3)


def test_mbar_examples(b, g):
    assert mbar(g)(g) == g
    assert mbar(b)(chi(0, 3)) == b
    assert mbar(b)(StepFunction.constant(0)).is_zero


def test_level_majorization_examples(b, g):
    for f in (b, g, StepFunction.constant(0)):
        assert level_majorization_witness(f)


seeds = st.integers(0, 10 ** 6)
SPACES = ("L1", "Linf", "L1tilde", "LinfLevel")


@settings(max_examples=120, deadline=None)
@given(seeds, seeds)
def test_operator_bounds(s1, s2):
    h = random_step(s1, dyadic=True)
    if not h.is_zero:
        assert all(v <= bnd for v, bnd in zip(s_norm_ratios(h), S_BOUNDS))
    d = least_decreasing_majorant(h)
    assert pointwise_le(d, S_op(d))
    assert level_majorization_witness(h)
    g, psi = random_step(s2), h
    W, M = multiplier_W3(g), mbar(g)
    assert W(least_decreasing_majorant(g)) == g
    assert M(least_decreasing_majorant(g)) == g
    for sp in SPACES:
        assert space_norm(W(psi), sp) <= space_norm(psi, sp)
    if not psi.is_zero:
        assert space_norm(M(psi), "Linf") <= 4 * space_norm(psi, "Linf")
        assert space_norm(M(psi), "L1tilde") <= 4 * space_norm(psi, "L1")


def test_grid_spec():
    G = GridSpec((0, 1, 3, 4))
    assert G.n == 3 and G.lengths == [1, 2, 1]
    assert G.refine().cuts == (0, F(1, 2), 1, 2, 3, F(7, 2), 4)
    assert G.function([2, 1, 0]) == chi(0, 1, 2) + chi(1, 3)
    assert G.coefficients(chi(1, 3)) == [0, 1, 0]
    with pytest.raises(DomainError):
        G.coefficients(chi(0, 2))
    with pytest.raises(ValueError):
        GridSpec((1, 2))


def test_discretize_examples(b):
    G = GridSpec((0, 1, 2, 4))
    ident = discretize_operator(lambda h: h, G, G)
    assert ident.matrix == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    W = discretize_operator(multiplier_W3(b), GridSpec((0, 1, 3, 4)), GridSpec((0, 1, 3, 4)))
    assert W.matrix == ((0, 0, 0), (0, 1, 0), (0, 0, 0))
    S = discretize_operator(SOperator(), G, G)
    assert S.matrix == ((1, 0, 0), (1, 0, 0), (0, 1, 0))
    assert S.matrix[2] == tuple(S_op(G.indicator(j))(2) for j in range(3))
    with pytest.raises(DomainError):
        discretize_operator(SOperator(), G, G, truncate=False)
    assert apply(S, [3, 5, 7]) == [3, 3, 5]


def test_grid_norm_examples():
    U = GridSpec((0, 1, 2, 3))
    ident = discretize_operator(lambda h: h, U, U)
    n = grid_operator_norms(ident)
    assert n["L1->L1"] == 1 and n["Linf->Linf"] == 1
    D = discretize_operator(Multiplier(U.function([1, F(1, 2), 1])), U, U)
    assert grid_operator_norms(D)["Linf->Linf"] == 1


def _column_sup(T, space_in, space_out):
    best = F(0)
    for j in range(T.in_grid.n):
        e = T.in_grid.indicator(j)
        out = T.out_grid.function(apply(T, T.in_grid.coefficients(e)))
        best = max(best, space_norm(out, space_out) / space_norm(e, space_in))
    return best


def test_discretized_S_norms_against_ratios():
    G = GridSpec((0, 1, 2, 4, 8, 16))
    S = discretize_operator(SOperator(), G, G)
    n = grid_operator_norms(S)
    for key, bound in zip(("Linf->Linf", "L1->L1", "L1->L1tilde", "LinfLevel->Linf"), S_BOUNDS):
        assert n[key] <= bound
    assert n["L1->L1"] == _column_sup(S, "L1", "L1")
    assert n["L1->L1tilde"] == _column_sup(S, "L1", "L1tilde")
    # cell indicators are norming for L1 -> L1 and the measured ratios agree
    for j in range(G.n):
        e = G.indicator(j)
        if j < G.n - 1:
            r = s_norm_ratios(e)
            assert r[1] <= n["L1->L1"] and r[2] <= n["L1->L1tilde"]


@pytest.mark.parametrize("seed", range(15))
def test_level_to_linf_norm_against_vertex_enumeration(seed):
    import itertools
    import random
    rng = random.Random(seed)
    G = GridSpec((0, 1, 3, 4))
    m = tuple(tuple(F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(3)) for _ in range(3))
    T = GridOperator(G, G, m)
    # the level unit ball on the grid is a polytope; its extreme points have
    # |psi_j| l_j equal to prefix increments of a chosen subset of cut values
    best = F(0)
    lens, cuts = G.lengths, G.cuts[1:]
    for mask in itertools.product((0, 1), repeat=3):
        used = [i for i in range(3) if mask[i]]
        if not used:
            continue
        prev_cut, mass = F(0), [F(0)] * 3
        for i in used:
            mass[i] = cuts[i] - prev_cut
            prev_cut = cuts[i]
        for signs in itertools.product((1, -1), repeat=3):
            psi = [signs[j] * mass[j] / lens[j] for j in range(3)]
            best = max(best, max(abs(v) for v in apply(T, psi)))
    assert grid_operator_norms(T)["LinfLevel->Linf"] == best


def test_grid_operator_json():
    G = GridSpec((0, 1, 3, 4))
    T = GridOperator(G, G.refine(), tuple((F(i), F(1, 2), 0) for i in range(6)))
    assert GridOperator.from_json(T.to_json()) == T
    with pytest.raises(ValueError):
        GridOperator.from_json({"in_grid": ["0", "1"]})
