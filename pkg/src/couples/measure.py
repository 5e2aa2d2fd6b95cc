"""Borel measures on the line and the retract onto Lebesgue measure.

A :class:`BorelMeasure` is a finite list of atoms plus constant-density
segments.  ``Lambda(x) = measure(-oo, x]`` is piecewise affine with jumps at
the atoms, and the retract

* ``E_lambda f = (f o phi) chi_Omega`` with ``phi(t) = inf{y : t <= Lambda(y)}``
* ``A_lambda h`` = average of ``h`` over every atom image, ``h`` elsewhere on Omega

identifies lambda-measurable functions with functions on ``(0, oo)`` that are
constant on the atom images ``(Lambda(y-), Lambda(y)]``.

Functions on the line are ordinary :class:`~couples.core.StepFunction`
objects, so only their lambda-a.e. class is meaningful.  Outputs built here
use one fixed representative: each piece of the measure owns the interval
from its left end up to the next piece, and the first piece also owns
everything to its left.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .core import (INF, NEG_INF, DomainError, Piece, StepFunction, fmt, parse, q)


@dataclass(frozen=True)
class BorelMeasure:
    atoms: tuple = ()
    segments: tuple = ()

    def __post_init__(self):
        atoms = tuple((q(x), q(w)) for x, w in self.atoms)
        segs = tuple((q(a), INF if b == INF or b == "inf" else q(b), q(d)) for a, b, d in self.segments)
        if not atoms and not segs:
            raise ValueError("a measure needs at least one atom or segment")
        for (x0, _), (x1, _) in zip(atoms, atoms[1:]):
            if not x1 > x0:
                raise ValueError("atom locations must be strictly increasing")
        if any(w <= 0 for _, w in atoms):
            raise ValueError("atom weights must be positive")
        for a, b, d in segs:
            if not b > a or d <= 0:
                raise ValueError(f"bad segment ({a}, {b}, density {d})")
        for (_, b0, _), (a1, _, _) in zip(segs, segs[1:]):
            if b0 == INF or a1 < b0:
                raise ValueError("segments must be sorted and disjoint")
        for x, _ in atoms:
            for a, b, _ in segs:
                if a <= x < b:
                    raise ValueError(f"atom at {x} lies inside segment [{a}, {b})")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "segments", segs)

    # -- basic quantities ---------------------------------------------------

    @classmethod
    def lebesgue(cls) -> "BorelMeasure":
        return cls(segments=((0, INF, 1),))

    @classmethod
    def geometric_atoms(cls, k_max: int = 20) -> "BorelMeasure":
        """Atoms ``2^-k`` at ``k = 1..k_max`` plus the remainder ``2^-k_max`` at ``k_max + 1``.

        The total mass is exactly 1, matching the untruncated sequence.
        """
        atoms = [(k, Fraction(1, 2 ** k)) for k in range(1, k_max + 1)]
        atoms.append((k_max + 1, Fraction(1, 2 ** k_max)))
        return cls(atoms=tuple(atoms))

    def components(self) -> list[tuple]:
        """Atoms ``("atom", y, w)`` and segments ``("seg", a, b, d)`` in order."""
        comps = [("atom", x, w) for x, w in self.atoms] + [("seg", a, b, d) for a, b, d in self.segments]
        comps.sort(key=lambda c: c[1])
        return comps

    @property
    def start(self) -> Fraction:
        return self.components()[0][1]

    @property
    def total_mass(self) -> Fraction | float:
        total = sum((w for _, w in self.atoms), Fraction(0))
        for a, b, d in self.segments:
            if b == INF:
                return INF
            total += d * (b - a)
        return total

    def Lambda(self, x) -> Fraction:
        """``lambda(-oo, x]``."""
        total = sum((w for y, w in self.atoms if y <= x), Fraction(0))
        for a, b, d in self.segments:
            if x > a:
                total += d * (min(x, b) - a)
        return total

    def Lambda_left(self, x) -> Fraction:
        """``lambda(-oo, x)``."""
        return self.Lambda(x) - dict(self.atoms).get(q(x), 0)

    # -- pieces ---------------------------------------------------------------

    def pieces(self, f: StepFunction) -> list[Piece]:
        """Split the support into pieces where ``f`` is constant."""
        out = []
        for c in self.components():
            if c[0] == "atom":
                _, y, w = c
                if y < f.origin:
                    raise DomainError(f"atom at {y} lies left of the function's origin")
                out.append(Piece(y, y, w, f(y), True))
                continue
            _, a, b, d = c
            if a < f.origin:
                raise DomainError(f"segment at {a} starts left of the function's origin")
            cuts = [x for x in f.breakpoints if a < x < b]
            lo = a
            for x in cuts + [b]:
                mass = INF if x == INF else d * (x - lo)
                out.append(Piece(lo, x, mass, f._value_from(lo)))
                lo = x
        return out

    def to_json(self) -> dict:
        return {"atoms": [{"x": fmt(x), "w": fmt(w)} for x, w in self.atoms],
                "segments": [{"a": fmt(a), "b": fmt(b), "density": fmt(d)} for a, b, d in self.segments]}

    @classmethod
    def from_json(cls, d: dict) -> "BorelMeasure":
        try:
            return cls(tuple((parse(a["x"]), parse(a["w"])) for a in d.get("atoms", [])),
                       tuple((parse(s["a"]), parse(s["b"]), parse(s["density"]))
                             for s in d.get("segments", [])))
        except (KeyError, TypeError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed measure: {exc}") from exc


LEBESGUE = BorelMeasure.lebesgue()


def is_lebesgue(measure) -> bool:
    return measure is None or measure == LEBESGUE


def assemble(pieces: list[Piece], values, origin=NEG_INF) -> StepFunction:
    """Step function on the line taking ``values[k]`` on ``pieces[k]``.

    Each piece owns ``[piece.lo, next_piece.lo)``; the first piece also owns
    everything left of it and the last one everything to its right.
    """
    if not pieces:
        return StepFunction.constant(0, origin)
    first = pieces[0].lo
    if origin != NEG_INF and q(origin) > first:
        raise DomainError("origin lies inside the support")
    bps, vals = [], []
    if origin == NEG_INF or first > q(origin):
        bps.append(first)
        vals.append(values[0])
    for k in range(len(pieces) - 1):
        nxt = pieces[k + 1].lo
        bps.append(nxt)
        vals.append(values[k])
    return StepFunction(origin, tuple(bps), tuple(vals), values[-1])


# ---------------------------------------------------------------------------
# the retract


@dataclass(frozen=True)
class RetractData:
    omega_end: Fraction | float
    atom_images: tuple  # (t_lo, t_hi, y): phi = y on (t_lo, t_hi]
    phi_pieces: tuple   # (t_lo, t_hi, kind, data) in increasing t

    def phi(self, t) -> Fraction:
        """``inf{y : t <= Lambda(y)}`` for ``t`` in Omega."""
        t = q(t)
        if not 0 < t <= self.omega_end:
            raise DomainError(f"{t} is outside Omega")
        for lo, hi, kind, data in self.phi_pieces:
            if lo < t <= hi:
                if kind == "atom":
                    return data
                a, d = data
                return a + (t - lo) / d
        raise AssertionError("phi pieces do not cover Omega")


def retract(measure: BorelMeasure) -> RetractData:
    t = Fraction(0)
    images, phis = [], []
    for c in measure.components():
        if c[0] == "atom":
            _, y, w = c
            images.append((t, t + w, y))
            phis.append((t, t + w, "atom", y))
            t += w
        else:
            _, a, b, d = c
            hi = INF if b == INF else t + d * (b - a)
            phis.append((t, hi, "seg", (a, d)))
            t = hi
    return RetractData(t, tuple(images), tuple(phis))


def E_lambda(measure: BorelMeasure, f: StepFunction) -> StepFunction:
    """Transfer a function on the line to ``(0, oo)``; zero beyond the total mass."""
    t = Fraction(0)
    out = []
    tail = Fraction(0)
    for p in measure.pieces(f):
        if p.mass == INF:
            tail = p.value
            break
        t += p.mass
        out.append((t, p.value))
    return StepFunction.from_pieces(out, tail=tail, origin=0)


def A_lambda(measure: BorelMeasure, h: StepFunction) -> StepFunction:
    """Average ``h`` over each atom image, keep it elsewhere on Omega."""
    if h.origin != 0:
        raise DomainError("A_lambda acts on functions on (0, oo)")
    out = []
    tail = Fraction(0)
    t = Fraction(0)
    for c in measure.components():
        if c[0] == "atom":
            w = c[2]
            out.append((t + w, h.integral(t, t + w) / w))
            t += w
            continue
        _, a, b, d = c
        hi = INF if b == INF else t + d * (b - a)
        for lo_h, hi_h, v in h.intervals():
            if hi_h <= t or lo_h >= hi:
                continue
            right = min(hi_h, hi)
            if right == INF:
                tail = v
            else:
                out.append((right, v))
        t = hi
        if t == INF:
            break
    return StepFunction.from_pieces(out, tail=tail, origin=0)


def E_lambda_inverse(measure: BorelMeasure, u: StepFunction, origin=None) -> StepFunction:
    """Pull ``u`` back to the line: ``x -> u(Lambda(x))``.

    ``u`` must be a.e. constant on every atom image.
    """
    if origin is None:
        origin = measure.start
    pieces, values = [], []
    t = Fraction(0)
    for c in measure.components():
        if c[0] == "atom":
            _, y, w = c
            vals = {v for lo, hi, v in u.intervals() if min(hi, t + w) > max(lo, t)}
            if len(vals) != 1:
                raise DomainError(f"u is not constant on the image ({t}, {t + w}] of the atom at {y}")
            pieces.append(Piece(y, y, w, None, True))
            values.append(vals.pop())
            t += w
            continue
        _, a, b, d = c
        hi = INF if b == INF else t + d * (b - a)
        for lo_u, hi_u, v in u.intervals():
            lo_c, hi_c = max(lo_u, t), min(hi_u, hi)
            if hi_c <= lo_c:
                continue
            x_lo = a + (lo_c - t) / d
            x_hi = INF if hi_c == INF else a + (hi_c - t) / d
            pieces.append(Piece(x_lo, x_hi, None, None))
            values.append(v)
        t = hi
        if t == INF:
            break
    return assemble(pieces, values, origin)


def ae_equal(f: StepFunction, g: StepFunction, measure=None) -> bool:
    """Equality ``measure``-almost everywhere."""
    if is_lebesgue(measure):
        return lebesgue_restrict(f) == lebesgue_restrict(g)
    return E_lambda(measure, f) == E_lambda(measure, g)


def lebesgue_restrict(f: StepFunction) -> StepFunction:
    return f if f.origin == 0 else f.with_origin(0)


def random_measure(seed, max_atoms: int = 8, max_segments: int = 3, span=(-4, 4),
                   unbounded_prob: float = 0.25) -> BorelMeasure:
    """Seeded random measure with rational atoms and segments."""
    rng = random.Random(seed)
    den = rng.choice((1, 2, 4))
    lo, hi = span
    grid = [Fraction(k, den) for k in range(lo * den, hi * den + 1)]
    n_seg = rng.randint(0, max_segments)
    n_atoms = rng.randint(0 if n_seg else 1, max_atoms)
    ends = sorted(rng.sample(grid, 2 * n_seg))
    segs = []
    for k in range(n_seg):
        a, b = ends[2 * k], ends[2 * k + 1]
        segs.append((a, b, Fraction(rng.randint(1, 6), rng.randint(1, 3))))
    if segs and rng.random() < unbounded_prob:
        a, _, d = segs[-1]
        segs[-1] = (a, INF, d)
    free = [x for x in grid if not any(a <= x < b for a, b, _ in segs)]
    locs = sorted(rng.sample(free, min(n_atoms, len(free))))
    atoms = [(x, Fraction(rng.randint(1, 8), rng.choice((1, 2, 4, 8)))) for x in locs]
    if not atoms and not segs:
        atoms = [(grid[0], Fraction(1))]
    return BorelMeasure(tuple(atoms), tuple(segs))

