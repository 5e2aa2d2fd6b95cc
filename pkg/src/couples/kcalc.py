"""Norms, K-functionals, K-profiles and K-method norms for the three couples.

The couples are ``(L1, Linf)``, ``(L1~, Linf)`` (least decreasing majorant
in L1) and ``(L1, Linf°)`` (level function in Linf), over Lebesgue measure on
``(0, oo)`` or over a :class:`~couples.measure.BorelMeasure`.

``K(t, f; L1, Linf) = integral_0^t f*`` is the working definition; the other
two couples reduce to it through ``f~`` and ``f°``, and the measure versions
go through the retract ``E_lambda``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .constructions import least_decreasing_majorant, level_function
from .core import (INF, DomainError, PiecewiseLinear, StepFunction, _pieces, fmt, pl_le_at,
                   primitive, q, rearrange)
from .measure import E_lambda, is_lebesgue

L1_LINF = "L1_Linf"
L1TILDE_LINF = "L1tilde_Linf"
L1_LINF_LEVEL = "L1_LinfLevel"
COUPLE_KINDS = (L1_LINF, L1TILDE_LINF, L1_LINF_LEVEL)

SPACES = ("L1", "Linf", "L1tilde", "LinfLevel")


@dataclass(frozen=True)
class CoupleTag:
    kind: str = L1_LINF
    measure: object = None

    def __post_init__(self):
        if self.kind not in COUPLE_KINDS:
            raise ValueError(f"unknown couple {self.kind!r}")


@dataclass(frozen=True)
class PhiSpec:
    """Parameter of the K-method.

    ``discrete_sup``: ``max_i w_i K(t_i)``; ``power_weight``:
    ``(integral (t^-theta K(t))^q dt/t)^(1/q)`` with ``0 < theta < 1``.
    """

    kind: str
    points: tuple = ()
    theta: Fraction | None = None
    q: float | Fraction | None = None

    def __post_init__(self):
        if self.kind == "discrete_sup":
            pts = tuple((q(t), q(w)) for t, w in self.points)
            if not pts or any(t <= 0 or w <= 0 for t, w in pts):
                raise ValueError("discrete_sup needs a finite list of positive (t, w)")
            object.__setattr__(self, "points", pts)
        elif self.kind == "power_weight":
            th = q(self.theta)
            if not 0 < th < 1:
                raise ValueError("theta must lie in (0, 1)")
            object.__setattr__(self, "theta", th)
            if self.q != INF and (self.q is None or self.q < 1):
                raise ValueError("q must be at least 1")
        else:
            raise ValueError(f"unknown parameter kind {self.kind!r}")

    @classmethod
    def discrete(cls, points) -> "PhiSpec":
        return cls("discrete_sup", points=tuple(points))

    @classmethod
    def power(cls, theta, q_) -> "PhiSpec":
        return cls("power_weight", theta=theta, q=q_)


# ---------------------------------------------------------------------------
# norms


def space_norm(f: StepFunction, space: str, measure=None) -> Fraction | float:
    """Norm of ``f`` in L1, Linf, L1~ or Linf° (``INF`` when divergent)."""
    if space == "L1":
        total = Fraction(0)
        for p in _pieces(f, measure):
            if p.value:
                if p.mass == INF:
                    return INF
                total += abs(p.value) * p.mass
        return total
    if space == "Linf":
        return max((abs(p.value) for p in _pieces(f, measure)), default=Fraction(0))
    if space == "L1tilde":
        return space_norm(least_decreasing_majorant(f, measure), "L1", measure)
    if space == "LinfLevel":
        # sup_t P(t)/t for the Lambda-parameter primitive P: the ratio is
        # monotone on each linear piece, so vertices and the two limits suffice
        P = primitive(f, measure)
        slopes = P.slopes()
        cands = [slopes[0], P.final_slope]
        cands += [y / t for t, y in P.vertices if t > 0]
        return max(cands)
    raise ValueError(f"unknown space {space!r}")


# ---------------------------------------------------------------------------
# K-functionals


def k_profile(f: StepFunction, couple: CoupleTag = CoupleTag()) -> PiecewiseLinear:
    """``t -> K(t, f; X0, X1)`` as an exact concave piecewise-linear function."""
    if not is_lebesgue(couple.measure):
        return k_profile(E_lambda(couple.measure, f), CoupleTag(couple.kind))
    if couple.kind == L1TILDE_LINF:
        f = least_decreasing_majorant(f)
    elif couple.kind == L1_LINF_LEVEL:
        f = level_function(f)
    return primitive(rearrange(f))


def k_functional(t, f: StepFunction, couple: CoupleTag = CoupleTag()) -> Fraction:
    t = q(t)
    if t < 0:
        raise DomainError("K-functional needs t >= 0")
    return k_profile(f, couple)(t)


def optimal_split(t, f: StepFunction, couple: CoupleTag = CoupleTag()):
    """A decomposition ``f = f0 + f1`` attaining ``K(t, f)``.

    ``(L1, Linf)`` and ``(L1~, Linf)``: truncation of ``f`` at height
    ``f*(t)`` resp. ``f~(t)``.  ``(L1, Linf°)``: ``f1 = f min(1, s/f°)`` with
    ``s = f°(t)``.  Lebesgue measure only.
    """
    if not is_lebesgue(couple.measure):
        raise DomainError("optimal_split is implemented for Lebesgue measure")
    t = q(t)
    if couple.kind == L1_LINF_LEVEL:
        lv = level_function(f)
        s = lv(t)
        ratio = lv.map(lambda v: 1 if v <= s else s / v)
        f1 = f * ratio
        return f - f1, f1
    proj = rearrange(f) if couple.kind == L1_LINF else least_decreasing_majorant(f)
    s = proj(t)
    f1 = f.map(lambda v: max(-s, min(s, v)))
    return f - f1, f1


def split_cost(f0: StepFunction, f1: StepFunction, t, couple: CoupleTag = CoupleTag()):
    """``||f0||_X0 + t ||f1||_X1`` computed from the raw norms."""
    x0, x1 = {L1_LINF: ("L1", "Linf"), L1TILDE_LINF: ("L1tilde", "Linf"),
              L1_LINF_LEVEL: ("L1", "LinfLevel")}[couple.kind]
    return space_norm(f0, x0, couple.measure) + q(t) * space_norm(f1, x1, couple.measure)


# ---------------------------------------------------------------------------
# K-method


def k_method_norm(f: StepFunction, couple: CoupleTag, phi: PhiSpec):
    """``||K(., f)||_Phi``: exact for ``discrete_sup``, float for ``power_weight``."""
    K = k_profile(f, couple)
    if phi.kind == "discrete_sup":
        return max(w * K(t) for t, w in phi.points)
    return power_weight_norm(K, phi.theta, phi.q)


def power_weight_norm(K: PiecewiseLinear, theta, q_) -> float:
    """``(integral_0^oo (t^-theta K(t))^q dt/t)^(1/q)`` for a PL profile with ``K(0) = 0``.

    Each linear piece ``alpha + beta t`` is integrated in closed form: a
    binomial expansion for integer ``q``, hypergeometric-free quadrature
    (``mpmath.quad``, 40 digits) for the interior pieces otherwise.  The
    first and last pieces are pure powers and always closed form.
    """
    if K.start != 0 or K(0) != 0:
        raise DomainError("profile must vanish at t = 0")
    th = mpmath.mpf(theta.numerator) / theta.denominator
    if K.final_slope != 0:
        raise DomainError("divergent integral: the profile grows linearly at infinity")
    with mpmath.workdps(40):
        if q_ == INF:
            return float(_sup_weighted(K, th))
        qq = mpmath.mpf(q_) if not isinstance(q_, Fraction) else mpmath.mpf(q_.numerator) / q_.denominator
        xs = list(K.xs)
        if len(xs) == 1:
            return 0.0  # K identically zero
        total = mpmath.mpf(0)
        for a, b in zip(xs, xs[1:]):
            ya, yb = K(a), K(b)
            beta = (yb - ya) / (b - a)
            alpha = ya - beta * a
            total += _piece_integral(_mp(alpha), _mp(beta), _mp(a), _mp(b), th, qq)
        last = _mp(K(xs[-1]))
        total += last ** qq * _mp(xs[-1]) ** (-th * qq) / (th * qq)
        return float(total ** (1 / qq))


def _mp(x):
    x = q(x)
    return mpmath.mpf(x.numerator) / x.denominator


def _piece_integral(alpha, beta, a, b, th, qq):
    """``integral_a^b (alpha + beta t)^q t^(-theta q - 1) dt``."""
    if alpha == 0:
        if beta == 0:
            return mpmath.mpf(0)
        e = (1 - th) * qq
        return beta ** qq * (b ** e - a ** e) / e
    if beta == 0:
        e = -th * qq
        return alpha ** qq * (b ** e - a ** e) / e
    if qq == int(qq):
        n = int(qq)
        total = mpmath.mpf(0)
        for k in range(n + 1):
            e = k - th * qq
            coef = mpmath.binomial(n, k) * alpha ** (n - k) * beta ** k
            total += coef * (mpmath.log(b / a) if e == 0 else (b ** e - a ** e) / e)
        return total
    return mpmath.quad(lambda t: (alpha + beta * t) ** qq * t ** (-th * qq - 1), [a, b])


def _sup_weighted(K, th):
    """``sup_t t^-theta K(t)`` over a concave PL profile."""
    best = mpmath.mpf(0)
    xs = list(K.xs)
    pieces = list(zip(xs, xs[1:])) + [(xs[-1], None)]
    for a, b in pieces:
        beta = K.final_slope if b is None else (K(b) - K(a)) / (b - a)
        alpha = K(a) - beta * a
        cands = [a] + ([b] if b is not None else [])
        # stationary point of (alpha + beta t) t^-theta
        if alpha > 0 and beta > 0:
            tc = th * _mp(alpha) / ((1 - th) * _mp(beta))
            if tc > _mp(a) and (b is None or tc < _mp(b)):
                cands.append(tc)
        for t in cands:
            t = _mp(t) if not isinstance(t, mpmath.mpf) else t
            if t > 0:
                best = max(best, (_mp(alpha) + _mp(beta) * t) * t ** (-th))
    return best


# ---------------------------------------------------------------------------
# K-divisibility


@dataclass
class DominationError(DomainError):
    """The family of concave functions does not dominate the K-profile."""

    witness: Fraction
    profile_value: Fraction = field(default=Fraction(0))
    family_value: Fraction = field(default=Fraction(0))

    def __str__(self):
        return (f"domination fails at t={fmt(self.witness)}: K={fmt(self.profile_value)} "
                f"> sum phi_j={fmt(self.family_value)}")


def kdiv_extract(phis: Sequence[PiecewiseLinear], g: StepFunction,
                 truncated: bool = False) -> list[StepFunction]:
    """Split the domination ``K(., g; L1~, Linf) <= sum phi_j`` into pieces.

    Each ``phi_j`` is first replaced by ``min(K, phi_j)`` so that it vanishes
    at 0; the pieces are the derivatives ``f_j``, which are nonnegative and
    decreasing with ``integral_0^t f_j = min(K, phi_j)(t)``.  With
    ``truncated`` the list is the head of a longer dominating family, so the
    domination checks are skipped.
    """
    K = k_profile(g, CoupleTag(L1TILDE_LINF))
    for phi in phis:
        if not phi.is_concave() or any(y < 0 for _, y in phi.vertices) or phi.final_slope < 0:
            raise DomainError("every phi_j must be nonnegative and concave")
    if not truncated:
        total = phis[0]
        for phi in phis[1:]:
            total = total + phi
        ok, witness = pl_le_at(K, total)
        if not ok:
            raise DominationError(witness, K(witness), total(witness))
    out = [K.minimum(phi).derivative() for phi in phis]
    if not truncated:
        check = primitive(sum(out[1:], out[0]))
        ok, witness = pl_le_at(K, check)
        if not ok:
            raise DominationError(witness, K(witness), check(witness))
    return out


# ---------------------------------------------------------------------------
# CSV


def profile_csv(K: PiecewiseLinear, samples: int = 0, decimal: int | None = None,
                t_max=None) -> str:
    """``t,K`` rows at the profile vertices plus ``samples`` log-spaced points."""
    ts = set(K.xs)
    if samples:
        hi = float(t_max if t_max is not None else max(K.xs[-1] * 2, 1))
        lo = hi / 10 ** 4
        for k in range(samples):
            ts.add(Fraction(lo * (hi / lo) ** (k / max(samples - 1, 1))).limit_denominator(10 ** 9))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "K"])
    for t in sorted(ts):
        v = K(t)
        if decimal is None:
            w.writerow([fmt(t), fmt(v)])
        else:
            w.writerow([f"{float(t):.{decimal}g}", f"{float(v):.{decimal}g}"])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# lower bounds by duality


_DUAL_SPACES = {L1_LINF: ("Linf", "L1"), L1TILDE_LINF: ("LinfLevel", "L1"),
                L1_LINF_LEVEL: ("Linf", "L1tilde")}


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _from_intervals(parts) -> StepFunction:
    """Step function from disjoint ``(lo, hi, value)`` triples, zero elsewhere."""
    pairs = []
    x = Fraction(0)
    for lo, hi, v in sorted(parts):
        if hi <= lo:
            continue
        if lo > x:
            pairs.append((lo, 0))
        pairs.append((hi, v))
        x = hi
    return StepFunction.from_pieces(pairs, 0)


def dual_witness(t, f: StepFunction, couple: CoupleTag = CoupleTag()) -> StepFunction | None:
    """A test function ``g`` for the weak-duality bound of :func:`dual_bound`.

    ``g`` is built so that the bound equals ``K(t, f)`` exactly.  Returns
    ``None`` for the level couple when ``f`` has a nonzero tail and ``t`` lies
    on the final ray, where the supremum is not attained.
    """
    if not is_lebesgue(couple.measure):
        raise DomainError("dual witnesses are implemented for Lebesgue measure")
    t = q(t)
    pieces = _pieces(f, None)
    if couple.kind == L1_LINF:
        order = sorted(range(len(pieces)), key=lambda k: -abs(pieces[k].value))
        parts, left = [], t
        for k in order:
            p = pieces[k]
            if left <= 0 or p.value == 0:
                break
            m = left if p.mass == INF else min(left, p.mass)
            parts.append((p.lo, p.lo + m, _sign(p.value)))
            left -= m
        return _from_intervals(parts)
    if couple.kind == L1TILDE_LINF:
        # on each level run of f~ put the run's length worth of mass on the
        # piece where |f| attains the level, so that int_0^x |g| <= x
        tilde = [abs(p.value) for p in pieces]
        for k in range(len(tilde) - 2, -1, -1):
            tilde[k] = max(tilde[k], tilde[k + 1])
        parts, start = [], Fraction(0)
        for k, p in enumerate(pieces):
            if start >= t:
                break
            last = k + 1 == len(pieces) or tilde[k + 1] != tilde[k]
            if not last:
                continue
            end = p.hi
            alloc = min(t, end) - start
            if tilde[k] != 0:
                if p.mass == INF:
                    parts.append((p.lo, p.lo + alloc, _sign(p.value)))
                else:
                    parts.append((p.lo, p.hi, _sign(p.value) * alloc / p.mass))
            start = end
        return _from_intervals(parts)
    lv = level_function(f)
    runs = list(lv.intervals())
    h_parts = []
    for lo, hi, c in runs:
        if t >= hi:
            h_parts.append((lo, hi, 1))
            continue
        if hi == INF:
            if c != 0:
                return None
        else:
            h_parts.append((lo, hi, (t - lo) / (hi - lo)))
        break
    h = _from_intervals(h_parts)
    return h * f.map(_sign)


def dual_bound(t, f: StepFunction, g: StepFunction, couple: CoupleTag = CoupleTag()) -> Fraction:
    """``int f g / max(|g|_X0', |g|_X1' / t)``, a lower bound for ``K(t, f)``."""
    t = q(t)
    if t <= 0:
        raise DomainError("dual bound needs t > 0")
    y0, y1 = _DUAL_SPACES[couple.kind]
    den = max(space_norm(g, y0), space_norm(g, y1) / t)
    if den == 0:
        return Fraction(0)
    return (f * g).integral(0, INF) / den
