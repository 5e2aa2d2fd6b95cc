"""Least decreasing majorant, least concave majorant and level function."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .core import (INF, DomainError, PiecewiseLinear, StepFunction, _pieces, _slope,
                   primitive, q, rearrange)
from .measure import E_lambda, E_lambda_inverse, assemble


@lru_cache(maxsize=1024)
def least_decreasing_majorant(f: StepFunction, measure=None) -> StepFunction:
    """``x -> ess sup{|f(y)| : y >= x}`` with respect to ``measure``."""
    pieces = _pieces(f, measure)
    vals = [Fraction(0)] * len(pieces)
    running = Fraction(0)
    for k in range(len(pieces) - 1, -1, -1):
        running = max(running, abs(pieces[k].value))
        vals[k] = running
    return assemble(pieces, vals, f.origin)


def least_concave_majorant(F: PiecewiseLinear) -> PiecewiseLinear:
    """Upper hull of the vertices of ``F`` closed off by its final ray."""
    if F.final_slope < 0:
        raise DomainError("least concave majorant needs a nonnegative final slope")
    hull: list = []
    for p in F.vertices:
        while len(hull) >= 2 and _slope(hull[-2], hull[-1]) <= _slope(hull[-1], p):
            hull.pop()
        hull.append(p)
    while len(hull) >= 2 and _slope(hull[-2], hull[-1]) <= F.final_slope:
        hull.pop()
    return PiecewiseLinear(hull, F.final_slope)


@lru_cache(maxsize=1024)
def level_function(f: StepFunction, measure=None) -> StepFunction:
    """Derivative (w.r.t. ``measure``) of the least concave majorant of the primitive.

    For a general measure the majorant is taken in the Lambda parameter,
    which is what concavity with respect to the measure amounts to.
    """
    pieces = _pieces(f, measure)
    G = least_concave_majorant(primitive(f, measure))
    vals = []
    t = Fraction(0)
    for p in pieces:
        if p.mass == INF:
            vals.append(G.final_slope)
            break
        vals.append((G(t + p.mass) - G(t)) / p.mass)
        t += p.mass
    return assemble(pieces, vals, f.origin)


def level_function_via_transfer(f: StepFunction, measure) -> StepFunction:
    """Second route to the lambda-level function: ``E^-1 (E f)°``."""
    u = level_function(E_lambda(measure, f))
    return E_lambda_inverse(measure, u, origin=f.origin)


def lambda_concave_check(F: PiecewiseLinear, measure) -> bool:
    """Check the three-point lambda-concavity inequality.

    ``F`` is given in Lambda-parameter form.  The triples ``a <= x <= b`` are
    drawn from the representation points of the measure (atoms and the
    points just left of them, segment ends) together with the preimages of
    the vertices of ``F``; a point below the support supplies ``Lambda = 0``.
    """
    if measure is None:
        ts = set(F.xs) | {F.xs[-1] + 1}
    else:
        ts = {Fraction(0)}
        for c in measure.components():
            if c[0] == "atom":
                ts.update((measure.Lambda_left(c[1]), measure.Lambda(c[1])))
                continue
            _, a, b, d = c
            t0 = measure.Lambda(a)
            ts.add(t0)
            xs = [a + (t - t0) / d for t in F.xs if t > t0]
            if b == INF:
                xs.append(a + (max(F.xs[-1], t0) - t0) / d + 1)
            else:
                ts.add(measure.Lambda_left(b))
            ts.update(measure.Lambda(x) for x in xs if x < b)
    pts = sorted((t, F(t)) for t in ts)
    if any(y < 0 for _, y in pts):
        return False
    for (ta, fa), (tx, fx), (tb, fb) in combinations(pts, 3):
        if (tb - tx) * (fx - fa) < (fb - fx) * (tx - ta):
            return False
    return True


def star_star(f: StepFunction, measure, x) -> Fraction:
    """``(1/x) * integral_0^x f*``."""
    x = q(x)
    if x <= 0:
        raise DomainError("star_star needs x > 0")
    return primitive(rearrange(f, measure))(x) / x
