"""Dense two-phase simplex with Bland's rule.

One implementation serves two arithmetics: float64 with a pivot tolerance,
and exact rationals (``fractions.Fraction`` in numpy object arrays) with
zero tolerance. Problems here have at most a few hundred columns.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9
MAX_ITERATIONS = 10_000

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class NumericalError(RuntimeError):
    """An LP-based computation could not produce a result."""


class IterationLimitError(NumericalError):
    pass


@dataclass
class LinearProgram:
    """Objective plus rows ``A_ub z <= b_ub`` and ``A_eq z = b_eq``.

    Variables are free unless ``nonneg`` is set.
    """

    n_vars: int
    objective: list
    A_ub: list = field(default_factory=list)
    b_ub: list = field(default_factory=list)
    A_eq: list = field(default_factory=list)
    b_eq: list = field(default_factory=list)
    nonneg: bool = False

    def __post_init__(self):
        if len(self.objective) != self.n_vars:
            raise ValueError("objective length does not match n_vars")
        for rows, rhs, name in ((self.A_ub, self.b_ub, "inequality"), (self.A_eq, self.b_eq, "equality")):
            if len(rows) != len(rhs):
                raise ValueError(f"{name} rows and bounds differ in count")
            for r in rows:
                if len(r) != self.n_vars:
                    raise ValueError(f"{name} row has length {len(r)}, expected {self.n_vars}")

    def with_objective(self, objective) -> "LinearProgram":
        return LinearProgram(self.n_vars, objective, self.A_ub, self.b_ub, self.A_eq, self.b_eq, self.nonneg)

    def max_violation(self, z) -> float:
        z = np.asarray(z, dtype=float)
        worst = 0.0
        if len(self.A_ub):
            worst = max(worst, float(np.max(np.asarray(self.A_ub, dtype=float) @ z - np.asarray(self.b_ub, dtype=float))))
        if len(self.A_eq):
            worst = max(worst, float(np.max(np.abs(np.asarray(self.A_eq, dtype=float) @ z - np.asarray(self.b_eq, dtype=float)))))
        if self.nonneg and z.size:
            worst = max(worst, float(-z.min()))
        return worst


@dataclass
class LpSolution:
    status: str
    point: Optional[np.ndarray] = None
    objective_value: Optional[float] = None
    iterations: int = 0
    dual_bound: Optional[float] = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, A, b, cost, basis, tol, dtype):
        self.T = np.concatenate([A, b[:, None]], axis=1)
        self.basis = list(basis)
        self.tol = tol
        self.dtype = dtype
        self.allowed = np.ones(A.shape[1], dtype=bool)
        self.iterations = 0
        self.set_cost(cost)

    def set_cost(self, cost):
        self.cost = cost
        cb = cost[self.basis]
        self.r = cost - cb @ self.T[:, :-1]

    def pivot(self, row, col):
        T = self.T
        T[row] = T[row] / T[row, col]
        colvals = T[:, col].copy()
        colvals[row] = 0
        T -= np.outer(colvals, T[row])
        self.r = self.r - self.r[col] * T[row, :-1]
        self.basis[row] = col
        self.iterations += 1

    def run(self):
        """Minimize; returns OPTIMAL or UNBOUNDED."""
        tol = self.tol
        while True:
            if self.iterations >= MAX_ITERATIONS:
                raise IterationLimitError(f"simplex hit {MAX_ITERATIONS} iterations")
            cand = np.flatnonzero(self.allowed & (self.r < -tol))
            if cand.size == 0:
                return OPTIMAL
            col = int(cand[0])
            a = self.T[:, col]
            rows = np.flatnonzero(a > tol)
            if rows.size == 0:
                return UNBOUNDED
            ratios = self.T[rows, -1] / a[rows]
            best = ratios.min()
            if self.dtype is object:
                ties = rows[ratios == best]
            else:
                ties = rows[ratios <= best + tol * (1 + abs(best))]
            row = min(ties, key=lambda k: self.basis[k])
            self.pivot(int(row), col)


def _convert(values, exact):
    if exact:
        return np.array([Fraction(v) for v in values], dtype=object)
    return np.asarray(values, dtype=float)


def _standard_form(lp: LinearProgram, exact: bool):
    n = lp.n_vars
    m_ub, m_eq = len(lp.A_ub), len(lp.A_eq)
    dtype = object if exact else float
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)

    def mat(rows):
        if not rows:
            return np.empty((0, n), dtype=dtype)
        return np.array([_convert(r, exact) for r in rows], dtype=dtype).reshape(len(rows), n)

    A_ub, A_eq = mat(lp.A_ub), mat(lp.A_eq)
    b_ub, b_eq = _convert(lp.b_ub, exact), _convert(lp.b_eq, exact)
    if not lp.nonneg:
        A_ub = np.concatenate([A_ub, -A_ub], axis=1)
        A_eq = np.concatenate([A_eq, -A_eq], axis=1)
    n_struct = A_ub.shape[1]
    m = m_ub + m_eq
    A = np.full((m, n_struct + m_ub), zero, dtype=dtype)
    A[:m_ub, :n_struct] = A_ub
    A[m_ub:, :n_struct] = A_eq
    for k in range(m_ub):
        A[k, n_struct + k] = one
    b = np.concatenate([b_ub, b_eq]).astype(dtype) if m else np.empty(0, dtype=dtype)
    flip = b < 0
    A[flip] = -A[flip]
    b[flip] = -b[flip]
    return A, b, n_struct, m_ub, flip


def _solve(lp: LinearProgram, sense: str, exact: bool) -> LpSolution:
    if sense not in ("max", "min"):
        raise ValueError("sense must be 'max' or 'min'")
    dtype = object if exact else float
    tol = 0 if exact else PIVOT_TOL
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
    A, b, n_struct, m_ub, flip = _standard_form(lp, exact)
    m, n_cols = A.shape
    c = _convert(lp.objective, exact)
    if not lp.nonneg:
        c = np.concatenate([c, -c])
    if sense == "max":
        c = -c
    cost = np.concatenate([c, np.full(n_cols - n_struct, zero, dtype=dtype)])

    # slack columns serve as the starting basis where they can
    basis = [None] * m
    for k in range(m_ub):
        if not flip[k]:
            basis[k] = n_struct + k
    need_art = [k for k in range(m) if basis[k] is None]
    n_art = len(need_art)
    if n_art:
        art = np.full((m, n_art), zero, dtype=dtype)
        for a, k in enumerate(need_art):
            art[k, a] = one
            basis[k] = n_cols + a
        A_full = np.concatenate([A, art], axis=1)
    else:
        A_full = A
    phase1_cost = np.full(n_cols + n_art, zero, dtype=dtype)
    phase1_cost[n_cols:] = one
    tab = _Tableau(A_full, b, phase1_cost, basis, tol, dtype)

    if n_art:
        tab.run()
        infeas = phase1_cost[tab.basis] @ tab.T[:, -1]
        scale = max([1.0] + [abs(float(v)) for v in b])
        if infeas > (0 if exact else FEAS_TOL * scale):
            return LpSolution(INFEASIBLE, iterations=tab.iterations)
        # drive zero-level artificials out of the basis, drop redundant rows
        keep = []
        for row in range(m):
            if tab.basis[row] >= n_cols:
                coeffs = tab.T[row, :n_cols]
                nz = np.flatnonzero(np.abs(coeffs) > tol) if not exact else np.flatnonzero(coeffs != 0)
                if nz.size == 0:
                    continue
                tab.pivot(row, int(nz[0]))
            keep.append(row)
        tab.T = tab.T[keep]
        tab.basis = [tab.basis[k] for k in keep]
        tab.T = np.concatenate([tab.T[:, :n_cols], tab.T[:, -1:]], axis=1)
        tab.allowed = np.ones(n_cols, dtype=bool)
        if not exact:
            tab.T[:, -1] = np.maximum(tab.T[:, -1], 0.0)
        rows_kept = keep
    else:
        rows_kept = list(range(m))
    tab.set_cost(cost)
    status = tab.run()
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, iterations=tab.iterations)

    x = np.full(n_cols, zero, dtype=dtype)
    x[tab.basis] = tab.T[:, -1]
    z = x[:n_struct]
    if not lp.nonneg:
        z = z[: lp.n_vars] - z[lp.n_vars:]
    obj = _convert(lp.objective, exact) @ z
    if exact:
        return LpSolution(OPTIMAL, z, obj, tab.iterations)

    dual = _dual_bound(A[rows_kept], b[rows_kept], cost, tab.basis, sense)
    return LpSolution(OPTIMAL, z.astype(float), float(obj), tab.iterations, dual)


def _dual_bound(A, b, cost, basis, sense):
    """Objective of the dual vector read off the final basis, if dual feasible."""
    if len(basis) == 0:
        return 0.0
    B = A[:, basis]
    try:
        y = np.linalg.solve(B.T, cost[basis])
    except np.linalg.LinAlgError:
        return None
    slack = cost - A.T @ y
    if slack.min() < -1e-7 * max(1.0, np.abs(cost).max()):
        return None
    bound = float(b @ y)
    return -bound if sense == "max" else bound


def solve(lp: LinearProgram, sense: str = "max") -> LpSolution:
    """Float simplex. Raises ``IterationLimitError`` past the iteration cap."""
    return _solve(lp, sense, exact=False)


def solve_exact(lp: LinearProgram, sense: str = "max") -> LpSolution:
    """Exact rational simplex; float inputs are taken at their binary value."""
    return _solve(lp, sense, exact=True)
