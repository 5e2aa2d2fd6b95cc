"""Seeded property suites with structured reports.

Each suite runs independent trials; trial ``i`` of a suite seeded with ``s``
draws its inputs from ``random.Random(f"{s}:{i}")``, so reports are
reproducible and trials can run in any order (or in parallel) before being
assembled by index.
"""
from __future__ import annotations

import json
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .constructions import (lambda_concave_check, least_concave_majorant, least_decreasing_majorant,
                            level_function, level_function_via_transfer, star_star)
from .core import (INF, NEG_INF, PiecewiseLinear, StepFunction, distribution, fmt,
                   pl_le_at, pointwise_le, primitive, random_step, rearrange)
from .kcalc import (COUPLE_KINDS, L1_LINF, L1_LINF_LEVEL, L1TILDE_LINF, CoupleTag, DominationError,
                    dual_bound, dual_witness, k_profile, kdiv_extract, optimal_split, space_norm,
                    split_cost)
from .measure import (A_lambda, BorelMeasure, E_lambda, E_lambda_inverse, ae_equal,
                      random_measure)
from .operators import (S_BOUNDS, S_op, level_majorization_witness, mbar, multiplier_W3,
                        s_norm_ratios)

SPACES4 = ("L1", "Linf", "L1tilde", "LinfLevel")


@dataclass
class Report:
    suite: str
    seed: int | str
    trials: int
    failures: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"suite": self.suite, "seed": self.seed, "trials": self.trials,
                "failures": self.failures, "stats": self.stats}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


class _Trial:
    """Collects check counts and failures for one trial."""

    def __init__(self, index: int):
        self.index = index
        self.counts: Counter = Counter()
        self.failures: list = []

    def check(self, name: str, ok: bool, **witness):
        self.counts[name] += 1
        if not ok:
            self.failures.append({"trial": self.index, "check": name,
                                  "witness": {k: _serial(v) for k, v in witness.items()}})
        return ok


def _serial(v):
    if hasattr(v, "to_json"):
        return v.to_json()
    if isinstance(v, (Fraction, int)) or v in (INF, NEG_INF):
        return fmt(v)
    if isinstance(v, (list, tuple)):
        return [_serial(x) for x in v]
    return v


def _run(name: str, seed, trials: int, body: Callable, jobs: int = 1, extra=None) -> Report:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    args = [(body, seed, i) for i in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_call, args, chunksize=max(1, trials // (4 * jobs))))
    else:
        results = [_call(a) for a in args]
    report = Report(name, seed, trials)
    counts: Counter = Counter()
    for tr in results:
        report.failures.extend(tr.failures)
        counts.update(tr.counts)
    report.stats = {"checks": dict(sorted(counts.items())), "total_checks": sum(counts.values())}
    if extra:
        extra(report)
    return report


def _call(arg):
    body, seed, i = arg
    tr = _Trial(i)
    try:
        body(tr, random.Random(f"{seed}:{i}"), f"{seed}:{i}")
    except Exception as exc:  # a crash is a failure with the trial id as witness
        tr.check("no_exception", False, error=f"{type(exc).__name__}: {exc}")
    return tr


def _f(rng, **kw) -> StepFunction:
    return random_step(rng.getrandbits(32), **kw)


# ---------------------------------------------------------------------------
# K-functionals


def identity_checks(tr: _Trial, f: StepFunction, kinds=COUPLE_KINDS) -> dict:
    """``K(t, f; X0, X1) = K(t, Pf; L1, Linf)`` at every profile breakpoint.

    ``P`` is the projection attached to the couple (identity, ``~`` or ``°``).
    The left side is pinned from the definition: an attained split bounds it
    from above and a duality certificate from below.  Returns the profiles.
    """
    proj = {L1_LINF: rearrange, L1TILDE_LINF: least_decreasing_majorant,
            L1_LINF_LEVEL: level_function}
    profiles = {}
    for k in kinds:
        c = CoupleTag(k)
        K = profiles[k] = k_profile(f, c)
        ref = primitive(rearrange(proj[k](f)))
        for t in K.xs[1:] + (K.xs[-1] + 1,):
            up = split_cost(*optimal_split(t, f, c), t, c)
            g = dual_witness(t, f, c)
            lo = up if g is None else dual_bound(t, f, g, c)
            tr.check(f"identity[{k}]", lo == up == ref(t) == K(t), f=f, couple=k, t=t)
    return profiles


def _random_kfnls_f(rng) -> StepFunction:
    return _f(rng, tail_values=(0, 0, 0, 1, -1, 2))


def _reduction_trial(tr: _Trial, rng, _):
    identity_checks(tr, _random_kfnls_f(rng), (L1TILDE_LINF, L1_LINF_LEVEL))


def reduction_identities(seed=0, trials: int = 1000, jobs: int = 1) -> Report:
    """Only the two projected-couple identities of :func:`suite_kfnls`."""
    return _run("reduction", seed, trials, _reduction_trial, jobs)


def _kfnls_trial(tr: _Trial, rng, _):
    f = _random_kfnls_f(rng)
    profiles = identity_checks(tr, f)
    ft, fo, fs = least_decreasing_majorant(f), level_function(f), rearrange(f)
    for k, K in profiles.items():
        tr.check(f"profile_shape[{k}]", K.is_concave() and K.is_nondecreasing() and K(0) == 0,
                 f=f, couple=k)
    Klev, Kmid, Ktil = profiles[L1_LINF_LEVEL], profiles[L1_LINF], profiles[L1TILDE_LINF]
    ts = sorted(set(Klev.xs) | set(Kmid.xs) | set(Ktil.xs))
    ts.append(ts[-1] + 1)
    Kft, Kfo = primitive(rearrange(ft)), primitive(rearrange(fo))
    for t in ts:
        tr.check("ordering", Klev(t) <= Kmid(t) <= Ktil(t), f=f, t=t)
        tr.check("tilde_chain", Kft(t) <= Ktil(t) <= 4 * Kft(t), f=f, t=t)
        tr.check("level_chain", Kfo(t) / 2 <= Klev(t) <= Kfo(t), f=f, t=t)
    tr.check("k1_sum_norm", Ktil(1) == ft.integral(0, 1), f=f)
    tr.check("rearrangement_invariance", k_profile(fs) == Kmid, f=f)
    if f.is_nonnegative() and f.is_decreasing():
        tr.check("decreasing_coincide", Klev == Kmid == Ktil, f=f)


def suite_kfnls(seed=0, trials: int = 1000, jobs: int = 1) -> Report:
    """K-functional identities for the two projected couples, the ordering
    chain and the two-sided equivalences, on random step functions."""
    def extra(rep):
        b = StepFunction.indicator(1, 3)
        rep.stats["example"] = {k: k_profile(b, CoupleTag(k)).to_json() for k in COUPLE_KINDS}
    return _run("kfnls", seed, trials, _kfnls_trial, jobs, extra)


# ---------------------------------------------------------------------------
# the averaging operator S and the multipliers


def _s_trial(tr: _Trial, rng, _):
    h = _f(rng, breakpoint_range=(0, 16), dyadic=rng.random() < 0.5)
    if not h.is_zero:
        r = s_norm_ratios(h)
        for name, v, b in zip(("Linf->Linf", "L1->L1", "L1->L1tilde", "LinfLevel->Linf"), r, S_BOUNDS):
            tr.check(f"S_bound[{name}]", v <= b, h=h, ratio=v)
    d = rearrange(h)
    tr.check("S_majorizes_decreasing", pointwise_le(d, S_op(d)), h=d)
    tr.check("level_majorization", level_majorization_witness(h), f=h)

    g = _f(rng, tail_values=(0, 0, 1))
    gt = least_decreasing_majorant(g)
    tr.check("mbar_identity", mbar(g)(gt) == g, g=g)
    W = multiplier_W3(g)
    tr.check("W3_identity", W(gt) == g, g=g)
    psi = _f(rng)
    if not psi.is_zero:
        Wp = W(psi)
        for sp in SPACES4:
            tr.check(f"W3_contraction[{sp}]", space_norm(Wp, sp) <= space_norm(psi, sp), g=g, psi=psi)
        Mp = mbar(g)(psi)
        tr.check("mbar_Linf", space_norm(Mp, "Linf") <= 4 * space_norm(psi, "Linf"), g=g, psi=psi)
        if psi.tail == 0:
            tr.check("mbar_L1_L1tilde", space_norm(Mp, "L1tilde") <= 4 * space_norm(psi, "L1"),
                     g=g, psi=psi)
        # W3 applied to a decreasing majorant of |g| above g~ still contracts
        bigger = gt + rearrange(psi)
        if not bigger.is_zero:
            Wb = W(bigger)
            tr.check("W3_on_larger_majorant",
                     all(space_norm(Wb, sp) <= space_norm(bigger, sp) for sp in SPACES4),
                     g=g, majorant=bigger)


def suite_s_bounds(seed=0, trials: int = 1000, jobs: int = 1) -> Report:
    def extra(rep):
        witness = StepFunction.indicator(1, 2)
        r = s_norm_ratios(witness)
        tight = [v == b for v, b in zip(r, S_BOUNDS)]
        rep.stats["witness"] = {"h": witness.to_json(), "ratios": [fmt(v) for v in r],
                                "tight": tight}
        if r[1:] != (2, 4, 2):
            rep.failures.append({"trial": -1, "check": "witness_tight",
                                 "witness": {"h": witness.to_json(), "ratios": [fmt(v) for v in r]}})
    return _run("s_bounds", seed, trials, _s_trial, jobs, extra)


# ---------------------------------------------------------------------------
# projections


def _proj_trial(tr: _Trial, rng, _):
    f = _f(rng, tail_values=(0, 0, 1, -1))
    g = _f(rng, tail_values=(0, 0, 1))
    ft, fo, fs = least_decreasing_majorant(f), level_function(f), rearrange(f)
    tr.check("tilde_idempotent", least_decreasing_majorant(ft) == ft, f=f)
    tr.check("level_idempotent", level_function(fo) == fo, f=f)
    tr.check("star_idempotent", rearrange(fs) == fs, f=f)
    tr.check("star_of_tilde", rearrange(ft) == ft, f=f)
    tr.check("star_is_fixed_by_tilde", least_decreasing_majorant(fs) == fs, f=f)
    tr.check("star_is_fixed_by_level", level_function(fs) == fs, f=f)
    tr.check("tilde_majorizes", pointwise_le(abs(f), ft) and ft.is_decreasing(), f=f)
    tr.check("level_shape", fo.is_nonnegative() and fo.is_decreasing(), f=f)
    Pf, Po = primitive(f), primitive(fo)
    tr.check("level_majorizes_primitive", pl_le_at(Pf, Po)[0], f=f)
    G = least_concave_majorant(Pf)
    tr.check("concave_majorant",
             G.is_concave() and pl_le_at(Pf, G)[0] and set(G.vertices) <= set(Pf.vertices)
             and lambda_concave_check(G, None), f=f)
    if f.is_nonnegative() and f.is_decreasing():
        tr.check("fixed_points", ft == f and fo == f, f=f)
    s = f + g
    tr.check("tilde_sublinear", pointwise_le(least_decreasing_majorant(s),
                                             ft + least_decreasing_majorant(g)), f=f, g=g)
    tr.check("level_superadditive", pl_le_at(primitive(level_function(s)),
                                             primitive(fo + level_function(g)))[0], f=f, g=g)
    Ps, Pt = primitive(fs), primitive(ft)
    tr.check("primitive_chain", pl_le_at(Po, Ps)[0] and pl_le_at(Ps, Pt)[0], f=f)
    tr.check("norm_embeddings", space_norm(f, "L1") <= space_norm(f, "L1tilde")
             and space_norm(f, "LinfLevel") <= space_norm(f, "Linf"), f=f)


def suite_projections(seed=0, trials: int = 1000, jobs: int = 1) -> Report:
    return _run("projections", seed, trials, _proj_trial, jobs)


# ---------------------------------------------------------------------------
# transfer to (0, oo)


def _on_omega(h: StepFunction, L) -> StepFunction:
    return h if L == INF else h.restrict(0, L)


def transfer_checks(tr: _Trial, lam: BorelMeasure, f: StepFunction, h: StepFunction):
    """Every transfer identity for one measure, one function on the line and
    one function on ``(0, oo)``."""
    L = lam.total_mass
    Ef = E_lambda(lam, f)
    w = dict(measure=lam, f=f)
    # K-functional transfers, lambda side computed natively
    ft_l, fo_l = least_decreasing_majorant(f, lam), level_function(f, lam)
    native = {L1_LINF: primitive(rearrange(f, lam)),
              L1TILDE_LINF: primitive(rearrange(ft_l, lam)),
              L1_LINF_LEVEL: primitive(rearrange(fo_l, lam))}
    for k in COUPLE_KINDS:
        K_lam = k_profile(f, CoupleTag(k, lam))
        K_leb = k_profile(Ef, CoupleTag(k))
        tr.check(f"transfer_K[{k}]", K_lam == K_leb, **w)
        tr.check(f"projected_K[{k}]", K_leb == native[k], **w)
    tr.check("transfer_tilde", _on_omega(least_decreasing_majorant(Ef), L)
             == _on_omega(E_lambda(lam, ft_l), L), **w)
    tr.check("transfer_level", _on_omega(level_function(Ef), L)
             == _on_omega(E_lambda(lam, fo_l), L), **w)
    tr.check("level_two_paths", ae_equal(fo_l, level_function_via_transfer(f, lam), lam), **w)
    tr.check("level_lambda_concave", lambda_concave_check(primitive(fo_l, lam), lam), **w)
    tr.check("equimeasurable", distribution(f, lam) == distribution(Ef), **w)
    tr.check("AE_is_E", A_lambda(lam, Ef) == Ef, **w)
    tr.check("inverse_roundtrip", ae_equal(E_lambda_inverse(lam, Ef, f.origin), f, lam), **w)
    for sp in SPACES4:
        tr.check(f"E_isometry[{sp}]", space_norm(f, sp, lam) == space_norm(Ef, sp), **w)
    Ah = A_lambda(lam, h)
    tr.check("A_idempotent", A_lambda(lam, Ah) == Ah, measure=lam, h=h)
    for sp in SPACES4:
        tr.check(f"A_contraction[{sp}]", space_norm(Ah, sp) <= space_norm(h, sp), measure=lam, h=h)


def _transfer_trial(tr: _Trial, rng, _, measures=None):
    lam = measures[tr.index % len(measures)] if measures else random_measure(rng.getrandbits(32))
    f = _f(rng, origin=NEG_INF, breakpoint_range=(-5, 5), tail_values=(0, 0, 1, -1))
    h = _f(rng, breakpoint_range=(0, 12), tail_values=(0, 0, 1))
    transfer_checks(tr, lam, f, h)


def _lebesgue_trial(tr: _Trial, rng, _):
    f = _f(rng, tail_values=(0, 1))
    lam = BorelMeasure.lebesgue()
    tr.check("lebesgue_identity", E_lambda(lam, f) == f and A_lambda(lam, f) == f, f=f)


def suite_transfer(seed=0, trials: int = 200, measures=None, jobs: int = 1) -> Report:
    body = _TransferBody(tuple(measures) if measures else None)
    rep = _run("transfer", seed, trials, body, jobs)
    leb = _run("transfer", seed, max(1, trials // 10), _lebesgue_trial)
    rep.failures.extend(leb.failures)
    rep.stats["lebesgue_checks"] = leb.stats["total_checks"]
    return rep


@dataclass(frozen=True)
class _TransferBody:
    measures: tuple | None

    def __call__(self, tr, rng, tag):
        _transfer_trial(tr, rng, tag, self.measures)


# ---------------------------------------------------------------------------
# the degenerate atomic example


def _degenerate_grid(k_max: int) -> list[Fraction]:
    xs = {Fraction(k, 4) for k in range(1, 41)}
    xs |= {Fraction(1, 2 ** j) for j in range(1, k_max + 2)}
    xs |= {Fraction(2 ** j) for j in range(0, 12)}
    return sorted(xs)


@dataclass(frozen=True)
class _DegenerateBody:
    k_max: int

    def __call__(self, tr, rng, _):
        lam = BorelMeasure.geometric_atoms(self.k_max)
        f = _f(rng, origin=NEG_INF, breakpoint_range=(0, 12), tail_values=(0, 0, 1, -1))
        if f.is_zero:
            return
        w = dict(k_max=self.k_max, f=f)
        sup = space_norm(f, "Linf", lam)
        tr.check("tilde_vs_sup", sup / 2 <= space_norm(f, "L1tilde", lam) <= sup, **w)
        l1 = space_norm(f, "L1", lam)
        fo = level_function(f, lam)
        tr.check("level_mass", space_norm(fo, "L1", lam) == l1, **w)
        top = space_norm(f, "LinfLevel", lam)
        tr.check("level_top_is_norm", top == fo(1), **w)
        tr.check("level_vs_l1", l1 <= top <= 2 * l1, **w)


def suite_degenerate(k_max: int = 20, seed=0, trials: int = 200, jobs: int = 1) -> Report:
    """Atoms ``2^-k`` at ``k = 1..k_max`` plus the remainder mass at ``k_max + 1``."""
    lam = BorelMeasure.geometric_atoms(k_max)
    one = StepFunction.constant(1, NEG_INF)
    chi1 = StepFunction(NEG_INF, (Fraction(1), Fraction(3, 2)), (0, 1), 0)
    fails = []
    n = 0
    for x in _degenerate_grid(k_max):
        a, b = star_star(one, lam, x), star_star(chi1, lam, x)
        n += 3
        if a != min(1, 1 / x):
            fails.append({"trial": -1, "check": "one_star_star", "witness": {"x": fmt(x), "value": fmt(a)}})
        if b != min(1, 1 / (2 * x)):
            fails.append({"trial": -1, "check": "chi1_star_star", "witness": {"x": fmt(x), "value": fmt(b)}})
        if not a <= 2 * b:
            fails.append({"trial": -1, "check": "star_star_chain", "witness": {"x": fmt(x)}})
    rep = _run("degenerate", seed, trials, _DegenerateBody(k_max), jobs)
    rep.failures = fails + rep.failures
    rep.stats["k_max"] = k_max
    rep.stats["grid_checks"] = n
    return rep


def degenerate_stability(k_maxes=(10, 20, 30), seed=0, trials: int = 200, jobs: int = 1) -> dict:
    """Verdicts of :func:`suite_degenerate` for several truncation levels."""
    return {k: suite_degenerate(k, seed, trials, jobs).ok for k in k_maxes}


# ---------------------------------------------------------------------------
# K-divisibility


def _rand_concave(rng, scale) -> PiecewiseLinear:
    """``min(a t, b)`` or ``min(a t, b + c t)``-style nonnegative concave function."""
    a = Fraction(rng.randint(1, 8), rng.randint(1, 4))
    b = Fraction(rng.randint(1, 12), rng.randint(1, 4)) * scale
    c = Fraction(rng.randint(0, 2), rng.randint(1, 8))
    knee = b / a
    return PiecewiseLinear(((0, 0), (knee, b)), min(a, c))


def geometric_family(K: PiecewiseLinear, r=Fraction(1, 2), J: int = 20) -> list[PiecewiseLinear]:
    """``phi_j = (1 - r) r^(j-1) K`` for ``j = 1..J``."""
    return [K.scale((1 - r) * r ** (j - 1)) for j in range(1, J + 1)]


def _kdiv_trial(tr: _Trial, rng, _):
    g = _f(rng, tail_values=(0, 0, 1))
    K = k_profile(g, CoupleTag(L1TILDE_LINF))
    gt = least_decreasing_majorant(g)
    # a family dominating K: convex weights of K plus arbitrary concave extras
    n = rng.randint(1, 5)
    ws = [Fraction(rng.randint(1, 6)) for _ in range(n)]
    tot = sum(ws)
    phis = [K.scale(wi / tot) + _rand_concave(rng, K(1) + 1) for wi in ws]
    fs = kdiv_extract(phis, g)
    for phi, fj in zip(phis, fs):
        tr.check("piece_shape", fj.is_nonnegative() and fj.is_decreasing(), g=g)
        tr.check("piece_primitive", primitive(fj) == K.minimum(phi), g=g)
    total = fs[0]
    for fj in fs[1:]:
        total = total + fj
    P = primitive(total)
    tr.check("domination", pl_le_at(K, P)[0], g=g)
    tr.check("sum_is_decreasing_K", k_profile(total, CoupleTag(L1TILDE_LINF)) == P, g=g)

    tr.check("single_phi", kdiv_extract([K], g) == [gt], g=g)
    if K != PiecewiseLinear(((0, 0),), 0):
        fam = geometric_family(K)
        pieces = kdiv_extract(fam, g, truncated=True)
        acc = pieces[0]
        for p in pieces[1:]:
            acc = acc + p
        resid = k_profile(gt - acc, CoupleTag(L1TILDE_LINF))(1)
        tr.check("geometric_residual", resid <= Fraction(1, 2 ** 10), g=g, residual=resid)
        # capping K below its value at a breakpoint breaks domination there
        t0 = K.xs[1] if len(K.xs) > 1 else Fraction(1)
        capped = K.minimum(PiecewiseLinear(((0, K(t0) / 2),), 0))
        try:
            kdiv_extract([capped], g)
            tr.check("domination_failure_reported", False, g=g)
        except DominationError as err:
            tr.check("domination_failure_reported", capped(err.witness) < K(err.witness), g=g)


def suite_kdiv(seed=0, trials: int = 200, jobs: int = 1) -> Report:
    return _run("kdiv", seed, trials, _kdiv_trial, jobs)


SUITES = {
    "kfnls": suite_kfnls,
    "s_bounds": suite_s_bounds,
    "projections": suite_projections,
    "transfer": suite_transfer,
    "kdiv": suite_kdiv,
}


def run_all(seed=0, trials: int | None = None, jobs: int = 1, k_max: int = 20) -> Report:
    """Every suite at its default size (or ``trials``), merged into one report."""
    parts = []
    for name, fn in SUITES.items():
        parts.append(fn(seed, trials, jobs=jobs) if trials else fn(seed, jobs=jobs))
    parts.append(suite_degenerate(k_max, seed, trials or 200, jobs))
    agg = Report("all", seed, sum(p.trials for p in parts))
    for p in parts:
        agg.failures.extend({**fl, "suite": p.suite} for fl in p.failures)
    agg.stats = {p.suite: {"trials": p.trials, "failures": len(p.failures),
                           "total_checks": p.stats.get("total_checks", 0)} for p in parts}
    return agg
