"""Exact step functions, piecewise-linear functions and rearrangements.

Everything here works over :class:`fractions.Fraction`. A ``StepFunction``
is a finite list of constant pieces ``[x_{i-1}, x_i)`` followed by a
constant tail on ``[x_n, oo)``.  A ``PiecewiseLinear`` is a continuous
function given by its vertices and the slope of the final ray.

Measure-dependent operations (``primitive``, ``distribution``,
``rearrange``) take an optional ``measure``.  ``None`` means Lebesgue
measure on ``(0, oo)``; anything else must provide ``pieces(f)`` (see
:class:`couples.measure.BorelMeasure`).
"""
from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Sequence

INF = math.inf
NEG_INF = -math.inf


class DomainError(ValueError):
    """An input lies outside the domain where an operation is defined."""


def q(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float) and math.isinf(x):
        raise DomainError(f"infinite value {x!r} is not a rational")
    return Fraction(x)


def fmt(x) -> str:
    """Rational (or +-inf) as the string form used in JSON and CSV."""
    if x == INF:
        return "inf"
    if x == NEG_INF:
        return "-inf"
    x = q(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse(s) -> Fraction | float:
    if isinstance(s, str):
        t = s.strip().lower()
        if t in ("inf", "+inf", "infinity"):
            return INF
        if t in ("-inf", "-infinity"):
            return NEG_INF
    return q(s)


class Piece(NamedTuple):
    """A maximal set where both the measure and ``f`` are uniform.

    ``lo``/``hi`` are positions on the real line (equal for an atom),
    ``mass`` is the measure of the piece (``INF`` for an unbounded
    segment) and ``value`` the value of ``f`` there.
    """

    lo: Fraction
    hi: Fraction | float
    mass: Fraction | float
    value: Fraction
    atom: bool = False


# ---------------------------------------------------------------------------
# step functions


@dataclass(frozen=True)
class StepFunction:
    origin: Fraction | float
    breakpoints: tuple
    values: tuple
    tail: Fraction

    def __post_init__(self):
        origin = self.origin
        if origin != NEG_INF:
            origin = q(origin)
        bps = tuple(q(x) for x in self.breakpoints)
        vals = tuple(q(v) for v in self.values)
        tail = q(self.tail)
        if len(bps) != len(vals):
            raise ValueError("need exactly one value per breakpoint")
        prev = origin
        for x in bps:
            if not x > prev:
                raise ValueError("breakpoints must be strictly increasing and exceed the origin")
            prev = x
        # canonical form: no two adjacent pieces carry the same value
        cb, cv = [], []
        for x, v in zip(bps, vals):
            if cv and cv[-1] == v:
                cb[-1] = x
            else:
                cb.append(x)
                cv.append(v)
        while cv and cv[-1] == tail:
            cb.pop()
            cv.pop()
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "breakpoints", tuple(cb))
        object.__setattr__(self, "values", tuple(cv))
        object.__setattr__(self, "tail", tail)

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, c=0, origin=0) -> "StepFunction":
        return cls(origin, (), (), c)

    @classmethod
    def indicator(cls, a, b, c=1, origin=0) -> "StepFunction":
        """``c`` times the indicator of ``[a, b)``."""
        a, b = q(a), q(b)
        if origin != NEG_INF and a < q(origin):
            raise DomainError("indicator starts left of the origin")
        if a == (origin if origin == NEG_INF else q(origin)):
            return cls(origin, (b,), (c,), 0)
        return cls(origin, (a, b), (0, c), 0)

    @classmethod
    def from_pieces(cls, pieces: Iterable[tuple], tail=0, origin=0) -> "StepFunction":
        """Build from consecutive ``(right_end, value)`` pairs."""
        bps, vals = [], []
        for x, v in pieces:
            bps.append(x)
            vals.append(v)
        return cls(origin, tuple(bps), tuple(vals), tail)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, x) -> Fraction:
        if x < self.origin:
            raise DomainError(f"{x} lies left of the origin {self.origin}")
        i = bisect_right(self.breakpoints, x)
        return self.values[i] if i < len(self.values) else self.tail

    def _value_from(self, x) -> Fraction:
        """Value on the piece starting at ``x`` (``x`` may be the origin)."""
        if x == NEG_INF:
            return self.values[0] if self.values else self.tail
        return self(x)

    def intervals(self):
        """Yield ``(lo, hi, value)`` for every piece including the tail."""
        lo = self.origin
        for x, v in zip(self.breakpoints, self.values):
            yield lo, x, v
            lo = x
        yield lo, INF, self.tail

    @property
    def is_zero(self) -> bool:
        return not self.values and self.tail == 0

    def is_nonnegative(self) -> bool:
        return self.tail >= 0 and all(v >= 0 for v in self.values)

    def is_decreasing(self) -> bool:
        vals = self.values + (self.tail,)
        return all(a >= b for a, b in zip(vals, vals[1:]))

    def sup_abs(self) -> Fraction:
        return max([abs(v) for v in self.values] + [abs(self.tail)])

    def integral(self, a, b) -> Fraction | float:
        """Lebesgue integral of ``f`` over ``[a, b)``."""
        total = Fraction(0)
        for lo, hi, v in self.intervals():
            lo, hi = max(lo, a), min(hi, b)
            if hi > lo:
                if hi == INF:
                    if v != 0:
                        return INF if v > 0 else NEG_INF
                    continue
                total += v * (hi - lo)
        return total

    # -- arithmetic ---------------------------------------------------------

    def combine(self, other: "StepFunction", op: Callable) -> "StepFunction":
        """Pointwise ``op(f(x), g(x))`` on the common refinement."""
        if self.origin != other.origin:
            raise DomainError("step functions live on different domains")
        xs = sorted(set(self.breakpoints) | set(other.breakpoints))
        starts = [self.origin] + xs
        vals = [q(op(self._value_from(s), other._value_from(s))) for s in starts]
        return StepFunction(self.origin, tuple(xs), tuple(vals[:-1]), vals[-1])

    def map(self, fn: Callable) -> "StepFunction":
        return StepFunction(self.origin, self.breakpoints,
                            tuple(q(fn(v)) for v in self.values), q(fn(self.tail)))

    def __add__(self, other):
        if isinstance(other, StepFunction):
            return self.combine(other, lambda a, b: a + b)
        return self.map(lambda v: v + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, StepFunction):
            return self.combine(other, lambda a, b: a - b)
        return self.map(lambda v: v - other)

    def __neg__(self):
        return self.map(lambda v: -v)

    def __abs__(self):
        return self.map(abs)

    def __mul__(self, other):
        if isinstance(other, StepFunction):
            return self.combine(other, lambda a, b: a * b)
        c = q(other)
        return self.map(lambda v: c * v)

    __rmul__ = __mul__

    def scale(self, c) -> "StepFunction":
        return self * c

    def divide(self, other: "StepFunction") -> "StepFunction":
        """Pointwise quotient with the convention ``0/0 = 0``."""
        def div(a, b):
            if b == 0:
                if a != 0:
                    raise DomainError("division by zero where the numerator is nonzero")
                return 0
            return a / b
        return self.combine(other, div)

    def maximum(self, other):
        return self.combine(other, max)

    def minimum(self, other):
        return self.combine(other, min)

    def restrict(self, lo, hi) -> "StepFunction":
        """``f`` on ``[lo, hi)``, zero elsewhere (``hi`` may be ``INF``)."""
        window = StepFunction.indicator(lo, hi, origin=self.origin) if hi != INF else (
            StepFunction(self.origin, (q(lo),), (0,), 1) if q(lo) > self.origin
            else StepFunction.constant(1, self.origin))
        return self * window

    def with_origin(self, origin) -> "StepFunction":
        """Re-root the function; only allowed towards the right."""
        if origin != NEG_INF:
            origin = q(origin)
        if origin < self.origin:
            raise DomainError("cannot extend a step function to the left")
        keep = [(x, v) for x, v in zip(self.breakpoints, self.values) if x > origin]
        return StepFunction(origin, tuple(x for x, _ in keep), tuple(v for _, v in keep), self.tail)

    # -- serialisation ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "origin": fmt(self.origin),
            "breakpoints": [fmt(x) for x in self.breakpoints],
            "values": [fmt(v) for v in self.values],
            "tail": fmt(self.tail),
        }

    @classmethod
    def from_json(cls, d: dict) -> "StepFunction":
        try:
            return cls(parse(d.get("origin", "0")),
                       tuple(parse(x) for x in d["breakpoints"]),
                       tuple(parse(v) for v in d["values"]),
                       parse(d.get("tail", "0")))
        except (KeyError, TypeError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed step function: {exc}") from exc

    def __repr__(self):
        body = ", ".join(f"[{fmt(lo)},{fmt(hi)}):{fmt(v)}" for lo, hi, v in self.intervals())
        return f"StepFunction({body})"


def pointwise_le(f: StepFunction, g: StepFunction) -> bool:
    """``f <= g`` everywhere on the common domain."""
    return all(a <= b for a, b in _paired_values(f, g))


def _paired_values(f, g):
    h = f.combine(g, lambda a, b: 0)  # only for the common refinement
    for lo, _, _ in h.intervals():
        yield f._value_from(lo), g._value_from(lo)


def lebesgue_pieces(f: StepFunction) -> list[Piece]:
    """Pieces of ``f`` restricted to ``(0, oo)`` under Lebesgue measure."""
    out = []
    lo = f.origin
    if lo == NEG_INF or lo < 0:
        lo = Fraction(0)
    for x, v in zip(f.breakpoints, f.values):
        if x > lo:
            out.append(Piece(lo, x, x - lo, v))
            lo = x
    out.append(Piece(lo, INF, INF, f.tail))
    return out


def _pieces(f: StepFunction, measure) -> list[Piece]:
    return lebesgue_pieces(f) if measure is None else measure.pieces(f)


# ---------------------------------------------------------------------------
# piecewise-linear functions


@dataclass(frozen=True)
class PiecewiseLinear:
    vertices: tuple
    final_slope: Fraction

    def __post_init__(self):
        verts = [(q(x), q(y)) for x, y in self.vertices]
        if not verts:
            raise ValueError("a piecewise-linear function needs a vertex")
        for (x0, _), (x1, _) in zip(verts, verts[1:]):
            if not x1 > x0:
                raise ValueError("vertex abscissae must be strictly increasing")
        s = q(self.final_slope)
        # canonical form: drop vertices where the slope does not change
        out = [verts[0]]
        for v in verts[1:]:
            if len(out) >= 2 and _slope(out[-2], out[-1]) == _slope(out[-1], v):
                out[-1] = v
            else:
                out.append(v)
        if len(out) >= 2 and _slope(out[-2], out[-1]) == s:
            out.pop()
        object.__setattr__(self, "vertices", tuple(out))
        object.__setattr__(self, "final_slope", s)
        object.__setattr__(self, "_xs", tuple(x for x, _ in out))

    @classmethod
    def linear(cls, slope, x0=0, y0=0) -> "PiecewiseLinear":
        return cls(((x0, y0),), slope)

    @property
    def start(self) -> Fraction:
        return self.vertices[0][0]

    @property
    def xs(self) -> tuple:
        return self._xs

    def __call__(self, x) -> Fraction:
        if not isinstance(x, Fraction):
            x = q(x)
        vs = self.vertices
        if x < vs[0][0]:
            raise DomainError(f"{x} lies left of the domain start {vs[0][0]}")
        i = bisect_right(self._xs, x) - 1
        if i == len(vs) - 1:
            return vs[-1][1] + self.final_slope * (x - vs[-1][0])
        (x0, y0), (x1, y1) = vs[i], vs[i + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def slopes(self) -> list[Fraction]:
        """Slopes of consecutive segments followed by the final slope."""
        vs = self.vertices
        return [_slope(a, b) for a, b in zip(vs, vs[1:])] + [self.final_slope]

    def is_concave(self) -> bool:
        s = self.slopes()
        return all(a >= b for a, b in zip(s, s[1:]))

    def is_nondecreasing(self) -> bool:
        return all(s >= 0 for s in self.slopes())

    def derivative(self) -> StepFunction:
        vs = self.vertices
        sl = self.slopes()
        return StepFunction(vs[0][0], tuple(x for x, _ in vs[1:]), tuple(sl[:-1]), sl[-1])

    def _binary(self, other: "PiecewiseLinear", op: Callable, crossings: bool):
        if self.start != other.start:
            raise DomainError("piecewise-linear functions start at different points")
        xs = sorted(set(self.xs) | set(other.xs))
        pts = list(xs)
        if crossings:
            for a, b in zip(xs, xs[1:]):
                c = _crossing(self, other, a, b)
                if c is not None:
                    pts.append(c)
            last = xs[-1]
            d = self(last) - other(last)
            ds = self.final_slope - other.final_slope
            if ds != 0 and -d / ds > 0:
                pts.append(last - d / ds)
            pts.sort()
        verts = [(x, op(self(x), other(x))) for x in pts]
        # slope of the far-right ray: evaluate one unit beyond the last point
        far = pts[-1] + 1
        return PiecewiseLinear(verts, op(self(far), other(far)) - verts[-1][1])

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b, False)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b, False)

    def scale(self, c) -> "PiecewiseLinear":
        c = q(c)
        return PiecewiseLinear([(x, c * y) for x, y in self.vertices], c * self.final_slope)

    def minimum(self, other) -> "PiecewiseLinear":
        return self._binary(other, min, True)

    def maximum(self, other) -> "PiecewiseLinear":
        return self._binary(other, max, True)

    def to_json(self) -> dict:
        return {"vertices": [[fmt(x), fmt(y)] for x, y in self.vertices],
                "final_slope": fmt(self.final_slope)}

    @classmethod
    def from_json(cls, d: dict) -> "PiecewiseLinear":
        return cls([(parse(x), parse(y)) for x, y in d["vertices"]], parse(d["final_slope"]))

    def __repr__(self):
        vs = ", ".join(f"({fmt(x)},{fmt(y)})" for x, y in self.vertices)
        return f"PiecewiseLinear({vs}; slope {fmt(self.final_slope)})"


def _slope(a, b) -> Fraction:
    return (b[1] - a[1]) / (b[0] - a[0])


def _crossing(F, G, a, b):
    da, db = F(a) - G(a), F(b) - G(b)
    if da * db < 0:
        return a + (b - a) * da / (da - db)
    return None


def pl_le(F: PiecewiseLinear, G: PiecewiseLinear) -> bool:
    """``F <= G`` on the whole common domain (exact)."""
    return pl_le_at(F, G)[0]


def pl_le_at(F: PiecewiseLinear, G: PiecewiseLinear) -> tuple[bool, Fraction | None]:
    """Like :func:`pl_le` but also return a witness abscissa on failure."""
    xs = sorted(set(F.xs) | set(G.xs))
    for x in xs:
        if F(x) > G(x):
            return False, x
    if F.final_slope > G.final_slope:
        far = xs[-1] + (G(xs[-1]) - F(xs[-1])) / (F.final_slope - G.final_slope) + 1
        return False, far
    return True, None


# ---------------------------------------------------------------------------
# measure-dependent primitives


def primitive(f: StepFunction, measure=None) -> PiecewiseLinear:
    """``x -> integral of |f|`` from the left end of the support.

    For a general measure the result is in Lambda-parameter form: the
    abscissa is the accumulated mass ``t = Lambda(x)`` rather than ``x``.
    For Lebesgue measure on ``(0, oo)`` the two coincide.
    """
    t, y = Fraction(0), Fraction(0)
    verts = [(t, y)]
    slope = Fraction(0)
    for p in _pieces(f, measure):
        if p.mass == INF:
            slope = abs(p.value)
            break
        t += p.mass
        y += abs(p.value) * p.mass
        verts.append((t, y))
    return PiecewiseLinear(verts, slope)


@dataclass(frozen=True)
class Distribution:
    """``s -> mu{|f| > s}`` stored as the mass sitting at each level of ``|f|``.

    ``levels`` is increasing; ``masses[k]`` is the measure of ``{|f| = levels[k]}``
    (possibly ``INF``).  Levels below an infinite-mass level are dropped since
    they no longer influence the map.
    """

    levels: tuple
    masses: tuple

    def __call__(self, s) -> Fraction | float:
        total = Fraction(0)
        for lv, m in zip(self.levels, self.masses):
            if lv > s:
                total += m
        return total

    def to_json(self) -> dict:
        return {"levels": [fmt(x) for x in self.levels], "masses": [fmt(m) for m in self.masses]}


def distribution(f: StepFunction, measure=None) -> Distribution:
    acc: dict = {}
    for p in _pieces(f, measure):
        v = abs(p.value)
        if v > 0:
            acc[v] = acc.get(v, 0) + p.mass
    levels = sorted(acc)
    inf_levels = [lv for lv in levels if acc[lv] == INF]
    if inf_levels:
        levels = [lv for lv in levels if lv >= inf_levels[-1]]
    return Distribution(tuple(levels), tuple(acc[lv] for lv in levels))


def rearrange(f: StepFunction, measure=None) -> StepFunction:
    """Decreasing rearrangement ``f*`` on ``(0, oo)``."""
    d = distribution(f, measure)
    tail = Fraction(0)
    pairs = list(zip(d.levels, d.masses))
    if pairs and pairs[0][1] == INF:
        tail = pairs[0][0]
        pairs = pairs[1:]
    t = Fraction(0)
    out = []
    for lv, m in reversed(pairs):
        t += m
        out.append((t, lv))
    return StepFunction.from_pieces(out, tail=tail, origin=0)


def random_step(seed: int, max_pieces: int = 6, value_range=(-3, 3), breakpoint_range=(0, 8),
                dyadic: bool = False, value_denominator: int = 2, tail_values: Sequence = (0,),
                origin=0) -> StepFunction:
    """Seeded random step function with rational breakpoints and values.

    Values are drawn from ``{k/value_denominator}`` inside ``value_range``;
    breakpoints from a grid inside ``breakpoint_range`` (dyadic grid when
    ``dyadic`` is set).  The tail is drawn from ``tail_values``.
    """
    rng = random.Random(seed)
    lo, hi = q(breakpoint_range[0]), q(breakpoint_range[1])
    if origin != NEG_INF:
        lo = max(lo, q(origin))
    den = rng.choice((2, 4, 8)) if dyadic else rng.choice((1, 2, 3, 4, 5))
    grid = [Fraction(k, den) for k in range(math.ceil(lo * den), math.floor(hi * den) + 1)]
    if origin != NEG_INF:
        grid = [x for x in grid if x > q(origin)]
    n = rng.randint(1, max_pieces)
    bps = sorted(rng.sample(grid, min(n, len(grid))))
    vlo, vhi = q(value_range[0]), q(value_range[1])
    choices = [Fraction(k, value_denominator)
               for k in range(math.ceil(vlo * value_denominator), math.floor(vhi * value_denominator) + 1)]
    vals = [rng.choice(choices) for _ in bps]
    tail = q(rng.choice(list(tail_values)))
    return StepFunction(origin, tuple(bps), tuple(vals), tail)
