import json
from fractions import Fraction as F

from couples import verify
from couples.core import StepFunction
from couples.kcalc import COUPLE_KINDS, CoupleTag, k_profile
from couples.measure import LEBESGUE, BorelMeasure


def test_report_shape():
    rep = verify.suite_projections(seed=1, trials=10)
    doc = json.loads(rep.dumps())
    assert doc["suite"] == "projections" and doc["trials"] == 10 and rep.ok
    assert doc["stats"]["total_checks"] > 0


def test_kfnls_example_profiles():
    rep = verify.suite_kfnls(seed=2, trials=20)
    assert rep.ok
    b = StepFunction.indicator(1, 3)
    for k in COUPLE_KINDS:
        assert rep.stats["example"][k] == k_profile(b, CoupleTag(k)).to_json()


def test_decreasing_inputs_coincide():
    g = StepFunction(0, (1, 3), (2, 1), 0)
    profiles = {k: k_profile(g, CoupleTag(k)) for k in COUPLE_KINDS}
    assert len(set(profiles.values())) == 1


def test_s_bounds_witness_flagged_tight():
    rep = verify.suite_s_bounds(seed=3, trials=20)
    assert rep.ok
    assert rep.stats["witness"]["ratios"] == ["1", "2", "4", "2"]
    assert rep.stats["witness"]["tight"] == [True, True, True, True]


def test_transfer_lebesgue_is_identity():
    rep = verify.suite_transfer(seed=4, trials=10, measures=[LEBESGUE])
    assert rep.ok


def test_transfer_fixed_measure():
    mu = BorelMeasure(((F(-1), F(1, 3)), (F(2), F(5))), ((F(0), F(1), F(2)),))
    assert verify.suite_transfer(seed=5, trials=15, measures=[mu]).ok


def test_degenerate_small():
    rep = verify.suite_degenerate(k_max=10, seed=6, trials=20)
    assert rep.ok and rep.stats["grid_checks"] > 0


def test_kdiv_small():
    assert verify.suite_kdiv(seed=8, trials=20).ok


def test_failures_are_recorded():
    calls = []

    def body(tr, rng, _):
        calls.append(1)
        tr.check("always_fails", False, value=F(1, 3))

    rep = verify._run("synthetic", 0, 3, body)
    assert not rep.ok and len(rep.failures) == 3
    assert rep.failures[0]["witness"]["value"] == "1/3"


def test_exceptions_become_failures():
    def body(tr, rng, _):
        raise ZeroDivisionError("boom")

    rep = verify._run("synthetic", 0, 2, body)
    assert [f["check"] for f in rep.failures] == ["no_exception"] * 2


def test_seeded_runs_are_deterministic():
    a = verify.suite_kfnls(seed=11, trials=15).dumps()
    b = verify.suite_kfnls(seed=11, trials=15).dumps()
    assert a == b
