"""The dyadic averaging operator S, the multipliers W3 and M-bar, and grid operators.

All operators act on step functions rooted at 0 (Lebesgue measure on
``(0, oo)``).  :class:`GridOperator` is the finite-matrix form used for norm
measurement and by the extremal LPs.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .constructions import least_decreasing_majorant, level_function
from .core import DomainError, StepFunction, fmt, parse, pointwise_le, q
from .kcalc import space_norm


def _check_origin(h: StepFunction):
    if h.origin != 0:
        raise DomainError("operators act on step functions rooted at 0")


def _pow2_floor(x: Fraction) -> Fraction:
    p = Fraction(1)
    while p > x:
        p /= 2
    while p * 2 <= x:
        p *= 2
    return p


def _pow2_ceil(x: Fraction) -> Fraction:
    p = _pow2_floor(x)
    return p if p == x else p * 2


def S_op(h: StepFunction) -> StepFunction:
    """``Sh = average of h over [2^(j-1), 2^j)`` on each cell ``[2^j, 2^(j+1))``.

    Below the first breakpoint ``x1`` of ``h`` every dyadic average is the first
    value, so ``Sh`` is constant on ``(0, 2 lo)`` with ``lo`` the largest power
    of two not above ``x1``; past ``2 hi`` (``hi >= x_n`` a power of two) it is
    the tail.
    """
    _check_origin(h)
    if not h.breakpoints:
        return h
    lo = _pow2_floor(h.breakpoints[0])
    hi = _pow2_ceil(h.breakpoints[-1])
    pairs = [(2 * lo, h.values[0])]
    cell = 2 * lo
    while cell < 2 * hi:
        avg = h.integral(cell / 2, cell) / (cell / 2)
        pairs.append((2 * cell, avg))
        cell *= 2
    return StepFunction.from_pieces(pairs, h.tail)


def s_norm_ratios(h: StepFunction) -> tuple:
    """``(|Sh|_inf/|h|_inf, |Sh|_1/|h|_1, |Sh|_1~/|h|_1, |Sh|_inf/|h|_inf°)``."""
    _check_origin(h)
    if h.is_zero:
        raise DomainError("ratios are undefined for h = 0")
    if h.tail != 0:
        raise DomainError("h has infinite L1 norm")
    Sh = S_op(h)
    l1 = space_norm(h, "L1")
    return (space_norm(Sh, "Linf") / space_norm(h, "Linf"),
            space_norm(Sh, "L1") / l1,
            space_norm(Sh, "L1tilde") / l1,
            space_norm(Sh, "Linf") / space_norm(h, "LinfLevel"))


# bounds in the order returned by s_norm_ratios
S_BOUNDS = (1, 2, 4, 2)


@dataclass(frozen=True)
class Multiplier:
    """``psi -> weight * psi``."""

    weight: StepFunction
    name: str = "multiplier"

    def __call__(self, psi: StepFunction) -> StepFunction:
        _check_origin(psi)
        return self.weight * psi


@dataclass(frozen=True)
class SOperator:
    name: str = "S"

    def __call__(self, psi: StepFunction) -> StepFunction:
        return S_op(psi)


@dataclass(frozen=True)
class MBar:
    """``psi -> (g / S g~) S psi``."""

    g: StepFunction
    weight: StepFunction
    name: str = "mbar"

    def __call__(self, psi: StepFunction) -> StepFunction:
        return self.weight * S_op(psi)


def multiplier_W3(g: StepFunction) -> Multiplier:
    _check_origin(g)
    return Multiplier(g.divide(least_decreasing_majorant(g)), "W3")


def mbar(g: StepFunction) -> MBar:
    _check_origin(g)
    return MBar(g, g.divide(S_op(least_decreasing_majorant(g))))


def level_majorization_witness(f: StepFunction) -> bool:
    """Whether ``f° <= S f°`` pointwise."""
    lv = level_function(f)
    return pointwise_le(lv, S_op(lv))


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class GridSpec:
    cuts: tuple

    def __post_init__(self):
        cuts = tuple(q(c) for c in self.cuts)
        if len(cuts) < 2 or cuts[0] != 0 or any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise ValueError("grid cuts must start at 0 and increase strictly")
        object.__setattr__(self, "cuts", cuts)

    @property
    def n(self) -> int:
        return len(self.cuts) - 1

    @property
    def lengths(self) -> list[Fraction]:
        return [b - a for a, b in zip(self.cuts, self.cuts[1:])]

    def cells(self):
        return list(zip(self.cuts, self.cuts[1:]))

    def refine(self) -> "GridSpec":
        out = [self.cuts[0]]
        for a, b in self.cells():
            out += [(a + b) / 2, b]
        return GridSpec(tuple(out))

    def indicator(self, j: int) -> StepFunction:
        a, b = self.cells()[j]
        return StepFunction.indicator(a, b)

    def function(self, coeffs: Sequence) -> StepFunction:
        return StepFunction.from_pieces(zip(self.cuts[1:], coeffs), 0)

    def coefficients(self, f: StepFunction, strict: bool = True) -> list[Fraction]:
        """Cell values of ``f``; ``strict`` rejects non-constant cells."""
        out = []
        for a, b in self.cells():
            v = f(a)
            if strict and any(a < x < b for x in f.breakpoints):
                raise DomainError(f"function is not constant on the cell [{fmt(a)},{fmt(b)})")
            out.append(v)
        return out

    def to_json(self):
        return [fmt(c) for c in self.cuts]


@dataclass(frozen=True)
class GridOperator:
    in_grid: GridSpec
    out_grid: GridSpec
    matrix: tuple

    def __post_init__(self):
        m = tuple(tuple(q(x) for x in row) for row in self.matrix)
        if len(m) != self.out_grid.n or any(len(r) != self.in_grid.n for r in m):
            raise ValueError("matrix shape does not match the grids")
        object.__setattr__(self, "matrix", m)

    def column(self, j: int) -> list[Fraction]:
        return [row[j] for row in self.matrix]

    def to_json(self) -> dict:
        return {"in_grid": self.in_grid.to_json(), "out_grid": self.out_grid.to_json(),
                "matrix": [[fmt(x) for x in row] for row in self.matrix]}

    @classmethod
    def from_json(cls, d: dict) -> "GridOperator":
        try:
            return cls(GridSpec(tuple(parse(c) for c in d["in_grid"])),
                       GridSpec(tuple(parse(c) for c in d["out_grid"])),
                       tuple(tuple(parse(x) for x in row) for row in d["matrix"]))
        except (KeyError, TypeError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed grid operator: {exc}") from exc


def discretize_operator(op: Callable, in_grid: GridSpec, out_grid: GridSpec,
                        truncate: bool = True) -> GridOperator:
    """Matrix of ``op`` on cell indicators.

    With ``truncate`` the output is cut to ``[0, y_N)``; otherwise mass beyond
    the output grid is an error.
    """
    cols = []
    end = out_grid.cuts[-1]
    for j in range(in_grid.n):
        out = op(in_grid.indicator(j))
        if not truncate and not out.with_origin(end).is_zero:
            raise DomainError(f"image of cell {j} extends past the output grid")
        cols.append(out_grid.coefficients(out))
    return GridOperator(in_grid, out_grid, tuple(zip(*cols)) if cols else ())


def apply(T: GridOperator, coeffs: Sequence) -> list[Fraction]:
    c = [q(x) for x in coeffs]
    if len(c) != T.in_grid.n:
        raise ValueError("coefficient vector does not match the input grid")
    return [sum((a * b for a, b in zip(row, c)), Fraction(0)) for row in T.matrix]


def l1tilde_of_coeffs(coeffs: Sequence, lengths: Sequence) -> Fraction:
    """L1~ norm of a grid function (zero past the grid)."""
    total, running = Fraction(0), Fraction(0)
    for c, l in zip(reversed(list(coeffs)), reversed(list(lengths))):
        running = max(running, abs(c))
        total += running * l
    return total


def grid_operator_norms(T: GridOperator) -> dict:
    """Exact operator norms of ``T`` between grid-function spaces.

    ``LinfLevel->Linf`` uses the duality between the level space and L1~: the
    norm of the row functional ``c -> sum_j T_ij c_j`` on the level unit ball
    is the L1~ norm of its density ``T_ij / |cell_j|``.
    """
    li, lo = T.in_grid.lengths, T.out_grid.lengths
    cols = [T.column(j) for j in range(T.in_grid.n)]
    l1 = max((sum(abs(c) * l for c, l in zip(col, lo)) / lj for col, lj in zip(cols, li)),
             default=Fraction(0))
    linf = max((sum(abs(x) for x in row) for row in T.matrix), default=Fraction(0))
    l1t = max((l1tilde_of_coeffs(col, lo) / lj for col, lj in zip(cols, li)),
              default=Fraction(0))
    lev = max((l1tilde_of_coeffs([x / l for x, l in zip(row, li)], li) for row in T.matrix),
              default=Fraction(0))
    return {"L1->L1": l1, "Linf->Linf": linf, "L1->L1tilde": l1t, "LinfLevel->Linf": lev}
