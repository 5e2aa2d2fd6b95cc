"""Small LP layer: an exact two-phase simplex over Fractions and a float mode on HiGHS.

Problems are ``min c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq`` and
``x >= 0``.  Constraint rows are sparse ``{column: coefficient}`` dicts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import fmt, q

FLOAT_TOL = 1e-9


class SolverError(RuntimeError):
    """The LP is infeasible or unbounded, or the float solver failed."""


@dataclass
class LPProblem:
    name: str = "lp"
    variables: list = field(default_factory=list)
    objective: dict = field(default_factory=dict)
    eq: list = field(default_factory=list)
    ub: list = field(default_factory=list)
    grids: tuple = (None, None)

    def __post_init__(self):
        self._index = {v: i for i, v in enumerate(self.variables)}

    def var(self, name) -> int:
        if name not in self._index:
            self._index[name] = len(self.variables)
            self.variables.append(name)
        return self._index[name]

    def _row(self, coeffs: dict) -> dict:
        row = {}
        for name, c in coeffs.items():
            c = q(c)
            if c:
                j = self.var(name)
                row[j] = row.get(j, Fraction(0)) + c
        return row

    def add_eq(self, coeffs: dict, rhs):
        self.eq.append((self._row(coeffs), q(rhs)))

    def add_le(self, coeffs: dict, rhs):
        self.ub.append((self._row(coeffs), q(rhs)))

    def add_ge(self, coeffs: dict, rhs):
        self.add_le({k: -q(v) for k, v in coeffs.items()}, -q(rhs))

    def minimize(self, coeffs: dict):
        self.objective = self._row(coeffs)

    @property
    def n(self) -> int:
        return len(self.variables)

    def value(self, row: dict, x) -> Fraction:
        return sum((c * x[j] for j, c in row.items()), Fraction(0))


@dataclass
class LPSolution:
    mode: str
    x: list
    objective: Fraction | float
    dual_ub: list
    dual_eq: list
    dual_value: Fraction | float

    def value(self, problem: LPProblem, name):
        return self.x[problem._index[name]]


def simplex_solve(p: LPProblem, mode: str = "rational") -> LPSolution:
    if mode == "rational":
        sol = _solve_rational(p)
    elif mode == "float":
        sol = _solve_float(p)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    check_solution(p, sol)
    return sol


def check_solution(p: LPProblem, sol: LPSolution):
    """Primal and dual feasibility plus zero (rational) or tiny (float) gap."""
    exact = sol.mode == "rational"
    tol = 0 if exact else FLOAT_TOL
    scale = 1 if exact else max(1.0, abs(float(sol.objective)))
    x = sol.x
    if any(v < -tol for v in x):
        raise SolverError("primal solution has a negative entry")
    for row, rhs in p.ub:
        if p.value(row, x) > rhs + tol * scale:
            raise SolverError("primal solution violates an inequality")
    for row, rhs in p.eq:
        if abs(p.value(row, x) - rhs) > tol * scale:
            raise SolverError("primal solution violates an equality")
    if any(u > tol for u in sol.dual_ub):
        raise SolverError("dual multiplier of an inequality has the wrong sign")
    reduced = [p.objective.get(j, 0) for j in range(p.n)]
    for (row, _), u in zip(p.ub, sol.dual_ub):
        for j, c in row.items():
            reduced[j] -= c * u
    for (row, _), v in zip(p.eq, sol.dual_eq):
        for j, c in row.items():
            reduced[j] -= c * v
    if any(r < -tol * scale for r in reduced):
        raise SolverError("dual solution is infeasible")
    if abs(sol.objective - sol.dual_value) > tol * scale:
        raise SolverError(f"duality gap {float(sol.objective - sol.dual_value):.3g}")


# ---------------------------------------------------------------------------
# exact mode


def _solve_rational(p: LPProblem) -> LPSolution:
    n, mu = p.n, len(p.ub)
    rows = [(r, b) for r, b in p.ub] + [(r, b) for r, b in p.eq]
    m = len(rows)
    ncols = n + mu  # structural + slack
    A, b, sign = [], [], []
    for i, (row, rhs) in enumerate(rows):
        dense = [Fraction(0)] * ncols
        for j, c in row.items():
            dense[j] = c
        if i < mu:
            dense[n + i] = Fraction(1)
        s = -1 if rhs < 0 else 1
        if s < 0:
            dense = [-v for v in dense]
        A.append(dense)
        b.append(rhs * s)
        sign.append(s)
    c = [p.objective.get(j, Fraction(0)) for j in range(n)] + [Fraction(0)] * mu

    # phase 1: one artificial per row
    T = [A[i] + [Fraction(int(k == i)) for k in range(m)] + [b[i]] for i in range(m)]
    total = ncols + m
    z = [Fraction(0)] * (total + 1)
    for i in range(m):
        for j in range(ncols):
            z[j] -= T[i][j]
        z[total] -= T[i][total]
    T.append(z)
    basis = [ncols + i for i in range(m)]
    _pivot_loop(T, basis, total)
    if T[-1][total] != 0:
        raise SolverError("LP is infeasible")

    # drive remaining artificials out of the basis; drop redundant rows
    keep = []
    for i in range(m):
        if basis[i] >= ncols:
            j = next((j for j in range(ncols) if T[i][j] != 0), None)
            if j is None:
                continue
            _pivot(T, basis, i, j)
        keep.append(i)
    T = [T[i][:ncols] + [T[i][total]] for i in keep]
    basis = [basis[i] for i in keep]
    kept_rows = keep

    # phase 2
    z = [c[j] for j in range(ncols)] + [Fraction(0)]
    for i, bj in enumerate(basis):
        cb = c[bj]
        if cb:
            z = [zv - cb * tv for zv, tv in zip(z, T[i])]
    T.append(z)
    _pivot_loop(T, basis, ncols)

    x = [Fraction(0)] * ncols
    for i, bj in enumerate(basis):
        x[bj] = T[i][ncols]
    obj = sum((c[j] * x[j] for j in range(ncols)), Fraction(0))

    # duals: B^T y = c_B over the kept rows
    Bt = [[A[r][bj] for r in kept_rows] for bj in basis]
    y_kept = _solve_square(Bt, [c[bj] for bj in basis])
    y = [Fraction(0)] * m
    for r, v in zip(kept_rows, y_kept):
        y[r] = v * sign[r]
    dual_ub, dual_eq = y[:mu], y[mu:]
    dual_value = sum((u * rhs for u, (_, rhs) in zip(dual_ub, p.ub)), Fraction(0)) + \
        sum((v * rhs for v, (_, rhs) in zip(dual_eq, p.eq)), Fraction(0))
    return LPSolution("rational", x[:n], obj, dual_ub, dual_eq, dual_value)


def _pivot(T, basis, r, col):
    pr = T[r]
    inv = 1 / pr[col]
    pr = [v * inv for v in pr]
    T[r] = pr
    nz = [k for k, v in enumerate(pr) if v]
    for i, row in enumerate(T):
        if i != r:
            f = row[col]
            if f:
                for k in nz:
                    row[k] -= f * pr[k]
    basis[r] = col


def _pivot_loop(T, basis, ncols):
    """Bland's rule: lowest-index entering column, lowest-index leaving variable."""
    m = len(basis)
    rhs = len(T[0]) - 1
    while True:
        z = T[-1]
        col = next((j for j in range(ncols) if z[j] < 0), None)
        if col is None:
            return
        best = None
        for i in range(m):
            a = T[i][col]
            if a > 0:
                ratio = T[i][rhs] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise SolverError("LP is unbounded")
        _pivot(T, basis, best[1], col)


def _solve_square(M, rhs):
    """Gauss-Jordan over Fractions for a nonsingular square system."""
    n = len(M)
    aug = [list(M[i]) + [rhs[i]] for i in range(n)]
    for col in range(n):
        piv = next(i for i in range(col, n) if aug[i][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return [aug[i][n] for i in range(n)]


# ---------------------------------------------------------------------------
# float mode


def _solve_float(p: LPProblem) -> LPSolution:
    import numpy as np
    from scipy.optimize import linprog
    from scipy.sparse import csr_matrix

    def matrix(rows):
        data, ri, ci = [], [], []
        for i, (row, _) in enumerate(rows):
            for j, c in row.items():
                data.append(float(c))
                ri.append(i)
                ci.append(j)
        return csr_matrix((data, (ri, ci)), shape=(len(rows), p.n)) if rows else None

    c = np.zeros(p.n)
    for j, v in p.objective.items():
        c[j] = float(v)
    b_ub = np.array([float(r) for _, r in p.ub]) if p.ub else None
    b_eq = np.array([float(r) for _, r in p.eq]) if p.eq else None
    res = linprog(c, A_ub=matrix(p.ub), b_ub=b_ub, A_eq=matrix(p.eq), b_eq=b_eq,
                  bounds=(0, None), method="highs")
    if res.status != 0:
        raise SolverError(f"HiGHS failed: {res.message}")
    dual_ub = list(res.ineqlin.marginals) if p.ub else []
    dual_eq = list(res.eqlin.marginals) if p.eq else []
    dual_value = float(np.dot(b_ub, dual_ub)) if p.ub else 0.0
    if p.eq:
        dual_value += float(np.dot(b_eq, dual_eq))
    return LPSolution("float", [float(v) for v in res.x], float(res.fun),
                      [float(u) for u in dual_ub], [float(v) for v in dual_eq], dual_value)


def solution_to_json(sol: LPSolution) -> dict:
    conv = fmt if sol.mode == "rational" else float
    return {"mode": sol.mode, "objective": conv(sol.objective),
            "dual_value": conv(sol.dual_value),
            "dual_ub": [conv(u) for u in sol.dual_ub],
            "dual_eq": [conv(v) for v in sol.dual_eq]}
