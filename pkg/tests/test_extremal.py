from fractions import Fraction as F

import pytest

from couples.constructions import least_decreasing_majorant, level_function
from couples.core import StepFunction
from couples.extremal import (LOWER_BOUND, build_exm_lp, build_exn_lp, default_grid,
                              is_nonincreasing, meets_lower_bound, reference_g,
                              refine_and_resolve, run_instance, solve, trivial_lp)
from couples.operators import GridSpec, apply, grid_operator_norms
from conftest import chi

CUTS = GridSpec((0, 1, 3, 4))
NORMS = {"exm": ("L1->L1tilde", "Linf->Linf"), "exn": ("L1->L1", "LinfLevel->Linf")}


def _check_operator(cert, kind, src, dst):
    """The certified operator maps src to dst and its exact norms realise the optimum."""
    T = cert.operator
    assert apply(T, CUTS.coefficients(src)) == CUTS.coefficients(dst)
    norms = grid_operator_norms(T)
    assert max(norms[k] for k in NORMS[kind]) == cert.optimum


def test_reference_instance_grid():
    assert reference_g() == chi(0, 1, 2) + chi(1, 3)
    assert default_grid(reference_g()) == CUTS


@pytest.mark.parametrize("kind", ["exm", "exn"])
def test_reference_optimum(kind):
    g = reference_g()
    builder = build_exm_lp if kind == "exm" else build_exn_lp
    cert = solve(builder(g, CUTS, CUTS), "rational")
    assert cert.optimum == F(9, 8)
    assert cert.optimum >= LOWER_BOUND and meets_lower_bound(cert)
    proj = least_decreasing_majorant(g) if kind == "exm" else level_function(g)
    _check_operator(cert, kind, proj, g)
    flt = solve(builder(g, CUTS, CUTS), "float")
    assert flt.optimum == pytest.approx(1.125, abs=1e-9)


def test_rank_one_instances():
    a = chi(0, 1)
    for kind in ("exm", "exn"):
        c = run_instance(kind, a)[0]
        assert c.optimum == 1
        assert run_instance(kind, StepFunction.constant(0))[0].optimum == 0


def test_custom_b_instance():
    # g = b on the reference grid: M g~ = g with g~ = chi[0,3)
    c = run_instance("exm", chi(1, 3))[0]
    assert 0 < c.optimum <= 1


@pytest.mark.parametrize("kind", ["exm", "exn"])
def test_chain_lines_hold(kind):
    cert = run_instance(kind)[0]
    assert cert.chain and all(line.holds for line in cert.chain)
    assert all(isinstance(line.to_json(), dict) for line in cert.chain)
    assert str(cert.chain[-1]).startswith("ok")


@pytest.mark.parametrize("kind", ["exm", "exn"])
def test_refinement_is_nonincreasing(kind):
    certs = run_instance(kind, refine=2)
    assert [c.mode for c in certs] == ["rational", "rational", "float"]
    assert is_nonincreasing(certs)
    assert all(meets_lower_bound(c) for c in certs)
    assert all(line.holds for c in certs for line in c.chain)


def test_trivial_lp_refinement_is_constant():
    certs = refine_and_resolve(trivial_lp, CUTS, 3, mode="rational")
    assert [c.optimum for c in certs] == [F(9, 8)] * 4


def test_certificate_json():
    cert = run_instance("exm")[0]
    doc = cert.to_json()
    assert doc["optimum"] == "9/8" and doc["grid"] == ["0", "1", "3", "4"]
    assert len(doc["operator"]["matrix"]) == 3 and "proof_chain" in doc
