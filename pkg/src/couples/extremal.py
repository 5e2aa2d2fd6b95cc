"""LP search for the smallest joint norm of grid operators with a prescribed action.

``exm``: operators ``(L1, Linf) -> (L1~, Linf)`` with ``M g~ = g``.
``exn``: operators ``(L1, Linf°) -> (L1, Linf)`` with ``N f = f°``.

A grid operator acts on cell averages, so it is a genuine operator on the
whole space with the same norms (averaging over cells contracts L1, Linf and
Linf°).  Grid optima are therefore upper bounds for the true minimal constant
and must never drop below any valid lower bound.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .constructions import least_decreasing_majorant, level_function
from .core import DomainError, StepFunction, fmt, q
from .operators import GridOperator, GridSpec, apply, l1tilde_of_coeffs
from .simplex import FLOAT_TOL, LPProblem, LPSolution, simplex_solve, solution_to_json

LOWER_BOUND = Fraction(9, 8)
EXACT_LEVELS = 1


def reference_g() -> StepFunction:
    """``2 chi_[0,1) + chi_[1,3)``."""
    return StepFunction.from_pieces([(1, 2), (3, 1)], 0)


def default_grid(*fs: StepFunction) -> GridSpec:
    """Breakpoints of the given functions plus one unit cell past the support."""
    cuts = {Fraction(0)}
    for f in fs:
        if f.origin != 0 or f.tail != 0:
            raise DomainError("grid functions must be rooted at 0 and vanish eventually")
        cuts.update(f.breakpoints)
    last = max(cuts)
    cuts.add(last + 1)
    return GridSpec(tuple(sorted(cuts)))


def _name(kind, i, j):
    return f"{kind}[{i},{j}]"


def _operator_vars(lp, n_out, n_in):
    """Entrywise split ``T = P - N`` with ``P, N >= 0``."""
    for i in range(n_out):
        for j in range(n_in):
            lp.var(_name("P", i, j))
            lp.var(_name("N", i, j))


def _action_constraints(lp, grid_in, grid_out, src: StepFunction, dst: StepFunction):
    cs = grid_in.coefficients(src)
    cd = grid_out.coefficients(dst)
    if not src.with_origin(grid_in.cuts[-1]).is_zero or not dst.with_origin(grid_out.cuts[-1]).is_zero:
        raise DomainError("function does not live on the grid")
    for i in range(grid_out.n):
        row = {}
        for j, c in enumerate(cs):
            if c:
                row[_name("P", i, j)] = c
                row[_name("N", i, j)] = -c
        lp.add_eq(row, cd[i])


def _linf_rows(lp, grid_in, grid_out):
    for i in range(grid_out.n):
        row = {"C": -1}
        for j in range(grid_in.n):
            row[_name("P", i, j)] = 1
            row[_name("N", i, j)] = 1
        lp.add_le(row, 0)


def build_exm_lp(g: StepFunction, in_grid: GridSpec | None = None,
                 out_grid: GridSpec | None = None) -> LPProblem:
    gt = least_decreasing_majorant(g)
    in_grid = in_grid or default_grid(g, gt)
    out_grid = out_grid or in_grid
    lp = LPProblem("exm", grids=(in_grid, out_grid))
    lp.var("C")
    _operator_vars(lp, out_grid.n, in_grid.n)
    _action_constraints(lp, in_grid, out_grid, gt, g)
    _linf_rows(lp, in_grid, out_grid)
    lo = out_grid.lengths
    for j, lj in enumerate(in_grid.lengths):
        # L1 -> L1~ on the column: sum_i |cell_i| m_i <= C |cell_j|, m decreasing, m >= |M_ij|
        lp.add_le({**{_name("m", i, j): lo[i] for i in range(out_grid.n)}, "C": -lj}, 0)
        for i in range(out_grid.n):
            lp.add_le({_name("P", i, j): 1, _name("N", i, j): 1, _name("m", i, j): -1}, 0)
            if i + 1 < out_grid.n:
                lp.add_le({_name("m", i + 1, j): 1, _name("m", i, j): -1}, 0)
    lp.minimize({"C": 1})
    return lp


def build_exn_lp(f: StepFunction, in_grid: GridSpec | None = None,
                 out_grid: GridSpec | None = None) -> LPProblem:
    fo = level_function(f)
    in_grid = in_grid or default_grid(f, fo)
    out_grid = out_grid or in_grid
    lp = LPProblem("exn", grids=(in_grid, out_grid))
    lp.var("C")
    _operator_vars(lp, out_grid.n, in_grid.n)
    _action_constraints(lp, in_grid, out_grid, f, fo)
    li, lo, ys = in_grid.lengths, out_grid.lengths, in_grid.cuts[1:]
    for j, lj in enumerate(li):
        row = {"C": -lj}
        for i in range(out_grid.n):
            row[_name("P", i, j)] = lo[i]
            row[_name("N", i, j)] = lo[i]
        lp.add_le(row, 0)
    # Linf° -> Linf: for each output row r the support function of the level
    # ball {sum_{k<=i} |cell_k||psi_k| <= y_i} is the LP dual
    #   min sum_i y_i z_i  s.t.  |cell_j| sum_{i>=j} z_i >= |T_rj|,  z >= 0
    for r in range(out_grid.n):
        for j, lj in enumerate(li):
            row = {_name("z", r, i): lj for i in range(j, in_grid.n)}
            row[_name("P", r, j)] = -1
            row[_name("N", r, j)] = -1
            lp.add_ge(row, 0)
        lp.add_le({**{_name("z", r, i): ys[i] for i in range(in_grid.n)}, "C": -1}, 0)
    lp.minimize({"C": 1})
    return lp


def trivial_lp(grid: GridSpec | None = None) -> LPProblem:
    """``min C`` subject to ``C >= 9/8``; refinement leaves it unchanged."""
    lp = LPProblem("trivial", grids=(grid, grid))
    lp.add_ge({"C": 1}, LOWER_BOUND)
    lp.minimize({"C": 1})
    return lp


@dataclass
class Certificate:
    instance: str
    mode: str
    optimum: Fraction | float
    operator: GridOperator | None
    solution: LPSolution
    grids: tuple
    seconds: float = 0.0
    chain: list = field(default_factory=list)

    def to_json(self) -> dict:
        conv = fmt if self.mode == "rational" else float
        out = {"instance": self.instance, "mode": self.mode, "optimum": conv(self.optimum),
               "grid": self.grids[0].to_json() if self.grids[0] else None,
               "operator": self.operator.to_json() if self.operator else None,
               "solution": solution_to_json(self.solution)}
        if self.chain:
            out["proof_chain"] = [line.to_json() for line in self.chain]
        return out


def _as_fraction(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v).limit_denominator(10 ** 12)


def solve(lp: LPProblem, mode: str = "rational") -> Certificate:
    t0 = time.perf_counter()
    sol = simplex_solve(lp, mode)
    in_grid, out_grid = lp.grids
    op = None
    if in_grid is not None and lp.name in ("exm", "exn"):
        idx = lp._index
        rows = []
        for i in range(out_grid.n):
            row = []
            for j in range(in_grid.n):
                v = sol.x[idx[_name("P", i, j)]] - sol.x[idx[_name("N", i, j)]]
                row.append(_as_fraction(v))
            rows.append(row)
        op = GridOperator(in_grid, out_grid, tuple(map(tuple, rows)))
    return Certificate(lp.name, mode, sol.objective, op, sol, lp.grids,
                       time.perf_counter() - t0)


def refine_and_resolve(builder: Callable[[GridSpec], LPProblem], grid: GridSpec, levels: int,
                       mode: str = "auto") -> list[Certificate]:
    """Solve on ``grid`` and on ``levels`` successive midpoint refinements.

    ``auto`` pivots exactly on the base grid and its first refinement and
    hands finer grids to HiGHS (exact pivoting takes minutes from level 2).
    """
    if levels < 0:
        raise ValueError("levels must be nonnegative")
    out = []
    for k in range(levels + 1):
        m = mode if mode != "auto" else ("rational" if k <= EXACT_LEVELS else "float")
        out.append(solve(builder(grid), m))
        grid = grid.refine() if grid is not None else None
    return out


def is_nonincreasing(certs: list[Certificate]) -> bool:
    vals = [c.optimum for c in certs]
    return all(float(b) <= float(a) + FLOAT_TOL * max(1.0, abs(float(a))) for a, b in zip(vals, vals[1:]))


def meets_lower_bound(cert: Certificate, bound=LOWER_BOUND) -> bool:
    if cert.mode == "rational":
        return cert.optimum >= bound
    return cert.optimum >= float(bound) - FLOAT_TOL


# ---------------------------------------------------------------------------
# the two inequality chains, re-derived from a solved operator


@dataclass
class ChainLine:
    """``terms[0] rel[0] terms[1] rel[1] ...`` with rel in {'=', '<='}."""

    label: str
    terms: list
    rels: list
    exact: bool = True

    @property
    def holds(self) -> bool:
        tol = 0 if self.exact else 1e-7
        for (_, a), (_, b), r in zip(self.terms, self.terms[1:], self.rels):
            if r == "=" and abs(a - b) > tol:
                return False
            if r == "<=" and a > b + tol:
                return False
        return True

    def to_json(self) -> dict:
        conv = fmt if self.exact else float
        return {"label": self.label, "holds": self.holds,
                "terms": [{"expr": e, "value": conv(v)} for e, v in self.terms], "rels": self.rels}

    def __str__(self):
        conv = fmt if self.exact else (lambda v: f"{float(v):.9g}")
        parts = [f"{e} [{conv(v)}]" for e, v in self.terms]
        body = parts[0] + "".join(f" {r} {p}" for r, p in zip(self.rels, parts[1:]))
        return f"{'ok  ' if self.holds else 'FAIL'} {self.label}: {body}"


def _cells_integral(grid: GridSpec, coeffs, a, b) -> Fraction:
    total = Fraction(0)
    for (lo, hi), c in zip(grid.cells(), coeffs):
        lo, hi = max(lo, q(a)), min(hi, q(b))
        if hi > lo:
            total += c * (hi - lo)
    return total


def _reference_vectors(T: GridOperator):
    a = T.in_grid.coefficients(StepFunction.indicator(0, 1))
    b = T.in_grid.coefficients(StepFunction.indicator(1, 3))
    return a, b


def exm_chain(cert: Certificate) -> list[ChainLine]:
    """The three displayed lines behind ``C >= 9/8`` for ``g = 2a + b``."""
    T, C = cert.operator, _as_fraction(cert.optimum)
    exact = cert.mode == "rational"
    a, b = _reference_vectors(T)
    og, lo = T.out_grid, T.out_grid.lengths
    Ma, Mb = apply(T, a), apply(T, b)
    Mab = apply(T, [x + y for x, y in zip(a, b)])
    Mg = apply(T, [2 * x + y for x, y in zip(a, b)])
    I = lambda v, s, e: _cells_integral(og, v, s, e)
    Mb_t = _majorant_coeffs(Mb)
    Ma_t = _majorant_coeffs(Ma)
    lines = [
        ChainLine("line 1", [("2 - int_0^1 Ma", 2 - I(Ma, 0, 1)), ("int_0^1 M(a+b)", I(Mab, 0, 1)),
                             ("|M(a+b)|_inf", max(abs(v) for v in Mab)), ("C", C)],
                  ["=", "<=", "<="], exact),
        ChainLine("line 2", [("1 - int_1^3 Ma", 1 - I(Ma, 1, 3)),
                             ("(1/2) int_1^3 (Mg - 2Ma)", (I(Mg, 1, 3) - 2 * I(Ma, 1, 3)) / 2),
                             ("(1/2) int_1^3 (Mb)~", I(Mb_t, 1, 3) / 2),
                             ("(1/3) int_0^3 (Mb)~", I(Mb_t, 0, 3) / 3),
                             ("(C/3) |b|_1", C * 2 / 3)],
                  ["=", "<=", "<=", "<="], exact),
        ChainLine("line 3", [("3 - (5/3)C", 3 - Fraction(5, 3) * C), ("int_0^3 Ma", I(Ma, 0, 3)),
                             ("int_0^3 (Ma)~", I(Ma_t, 0, 3)), ("C |a|_1", C)],
                  ["<=", "<=", "<="], exact),
        ChainLine("conclusion", [("9/8", LOWER_BOUND), ("C", C)], ["<="], exact),
    ]
    # the norms the chain relies on must be bounded by C
    lines.insert(1, ChainLine("norm check", [("|(Mb)~|_1 / |b|_1", l1tilde_of_coeffs(Mb, lo) / 2),
                                             ("C", C)], ["<="], exact))
    return lines


def exn_chain(cert: Certificate) -> list[ChainLine]:
    """The four displayed lines behind ``C >= 9/8`` for ``f = 2a + b``."""
    T, C = cert.operator, _as_fraction(cert.optimum)
    exact = cert.mode == "rational"
    a, b = _reference_vectors(T)
    og = T.out_grid
    Na, Nb = apply(T, a), apply(T, b)
    Nab = apply(T, [x + y for x, y in zip(a, b)])
    Nf = apply(T, [2 * x + y for x, y in zip(a, b)])
    I = lambda v, s, e: _cells_integral(og, v, s, e)
    l1 = lambda v: sum((abs(c) * l for c, l in zip(v, og.lengths)), Fraction(0))
    sup = lambda v: max(abs(c) for c in v)
    return [
        ChainLine("line 1", [("int_0^1 N(a+b) + int_0^3 Na", I(Nab, 0, 1) + I(Na, 0, 3)),
                             ("|N(a+b)|_inf + |Na|_1", sup(Nab) + l1(Na)), ("2C", 2 * C)],
                  ["<=", "<="], exact),
        ChainLine("line 2", [("int_1^3 Na", I(Na, 1, 3)),
                             ("int_0^1 N(a+b) + int_0^3 Na - int_0^1 N(2a+b)",
                              I(Nab, 0, 1) + I(Na, 0, 3) - I(Nf, 0, 1)),
                             ("2C - 2", 2 * C - 2)], ["=", "<="], exact),
        ChainLine("line 3", [("|Nb|_inf", sup(Nb)), ("(2/3)C", Fraction(2, 3) * C)], ["<="], exact),
        ChainLine("line 4", [("2", Fraction(2)), ("int_1^3 N(2a+b)", I(Nf, 1, 3)),
                             ("2 int_1^3 Na + int_1^3 Nb", 2 * I(Na, 1, 3) + I(Nb, 1, 3)),
                             ("(16/3)C - 4", Fraction(16, 3) * C - 4)], ["=", "=", "<="], exact),
        ChainLine("conclusion", [("9/8", LOWER_BOUND), ("C", C)], ["<="], exact),
    ]


def _majorant_coeffs(v):
    out, running = [], Fraction(0)
    for c in reversed(v):
        running = max(running, abs(c))
        out.append(running)
    return out[::-1]


INSTANCES = {
    "exm": (build_exm_lp, exm_chain),
    "exn": (build_exn_lp, exn_chain),
}


def run_instance(kind: str, g: StepFunction | None = None, refine: int = 0,
                 mode: str = "auto") -> list[Certificate]:
    """Solve an exm/exn instance over the default grid and its refinements.

    With ``g`` omitted this is the reference instance ``2a + b`` and each
    certificate carries the substituted inequality chain.
    """
    builder, chain = INSTANCES[kind]
    reference = g is None
    g = reference_g() if reference else g
    proj = least_decreasing_majorant(g) if kind == "exm" else level_function(g)
    grid = default_grid(g, proj)
    certs = refine_and_resolve(lambda gr: builder(g, gr, gr), grid, refine, mode)
    if reference:
        for c in certs:
            c.chain = chain(c)
    return certs
