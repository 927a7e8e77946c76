"""The attainable utility set as a projected polytope.

Segmentations with at most one segment per price are encoded by K^2
variables z(i, j) = gamma_i * y_i(j), where y_i is the complementary CDF of
the segment priced at v_i. The image of that polytope under the linear map
``surplus_objective`` is the pre-shift polygon S'; the attainable set is
S = beta c + (1 - beta) S'.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import planar
from .lp import LinearProgram, NumericalError, solve, solve_exact
from .model import Market, SurplusPoint, ValueGrid, _mass, total_surplus
from .pricing import clamped_tstar

SWEEP_TOL = 1e-9
MIN_ANGLE = 1e-6
MAX_LP_CALLS = 10_000
DEGENERATE_BETA = 1e-12


class SweepLimitError(NumericalError):
    pass


@dataclass(frozen=True, eq=False)
class PolytopeLP:
    """Constraint system over z(i, j), flattened row-major (index i*K + j)."""

    grid: ValueGrid
    x_star: Market
    beta: float
    A_ub: list
    b_ub: list
    A_eq: list
    b_eq: list
    exact: bool = False

    @property
    def K(self) -> int:
        return self.grid.K

    @property
    def n_vars(self) -> int:
        return self.K * self.K

    def index(self, i: int, j: int) -> int:
        return i * self.K + j

    def program(self, objective) -> LinearProgram:
        return LinearProgram(self.n_vars, list(objective), self.A_ub, self.b_ub, self.A_eq, self.b_eq, nonneg=True)

    def optimize(self, objective, sense: str = "max"):
        lp = self.program(objective)
        return solve_exact(lp, sense) if self.exact else solve(lp, sense)

    def is_feasible(self, z, tol: float = 1e-8) -> bool:
        return self.program([0] * self.n_vars).max_violation(z) <= tol


def build_polytope(grid: ValueGrid, x_star, beta: float, *, exact: bool = False) -> PolytopeLP:
    """Rows: monotone + nonnegative (a), pricing (b), aggregation (c)."""
    if not 0 <= beta < 1:
        raise ValueError("polytope is defined for beta in [0, 1); use the singleton path at beta = 1")
    K = grid.K
    num = Fraction if exact else float
    v = [num(x) for x in grid.values]
    w = [(K - i) * v[i] for i in range(K)]
    b = num(beta)
    coef = b / (K * (1 - b))
    m = _mass(x_star)
    mass = [num(x) for x in m]
    y_star = [sum(mass[j:], num(0)) for j in range(K)]
    n = K * K
    zero = num(0)

    def idx(i, j):
        return i * K + j

    A_ub, b_ub = [], []
    for i in range(K):
        for j in range(K - 1):
            row = [zero] * n
            row[idx(i, j + 1)] += 1
            row[idx(i, j)] -= 1
            A_ub.append(row)
            b_ub.append(zero)
        row = [zero] * n
        row[idx(i, K - 1)] -= 1
        A_ub.append(row)
        b_ub.append(zero)
    # coef * z(i,1) (w_j - w_i) - z(i,i) v_i + z(i,j) v_j <= 0
    for i in range(K):
        for j in range(K):
            row = [zero] * n
            row[idx(i, 0)] += coef * (w[j] - w[i])
            row[idx(i, i)] -= v[i]
            row[idx(i, j)] += v[j]
            A_ub.append(row)
            b_ub.append(zero)
    A_eq, b_eq = [], []
    for j in range(K):
        row = [zero] * n
        for i in range(K):
            row[idx(i, j)] = num(1)
        A_eq.append(row)
        b_eq.append(y_star[j])
    xs = x_star if isinstance(x_star, Market) else Market(m)
    return PolytopeLP(grid, xs, float(beta), A_ub, b_ub, A_eq, b_eq, exact)


def surplus_coefficients(grid: ValueGrid):
    """(consumer, producer) coefficient vectors of the map z -> S'."""
    K = grid.K
    v = grid.values
    cons = np.zeros((K, K))
    prod = np.zeros((K, K))
    for i in range(K):
        prod[i, i] = v[i]
        for j in range(i + 1, K):
            cons[i, j] = v[j] - v[j - 1]
    return cons.ravel(), prod.ravel()


def surplus_objective(z, grid: ValueGrid) -> SurplusPoint:
    z = np.asarray(z, dtype=float).ravel()
    if z.size != grid.K ** 2:
        raise ValueError(f"expected {grid.K ** 2} entries, got {z.size}")
    cons, prod = surplus_coefficients(grid)
    return SurplusPoint(float(cons @ z), float(prod @ z))


def first_degree_z(x_star) -> np.ndarray:
    """z for the segmentation that isolates every value class."""
    m = _mass(x_star)
    K = m.size
    z = np.zeros((K, K))
    for i in range(K):
        z[i, : i + 1] = m[i]
    return z.ravel()


@dataclass(frozen=True, eq=False)
class SurplusPolygon:
    """Convex polygon in (consumer, producer) space, CCW from the lexicographic minimum."""

    vertices: np.ndarray
    witnesses: Optional[tuple] = field(default=None)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def from_points(cls, points, witnesses=None, tol: float = planar.DEDUP_TOL) -> "SurplusPolygon":
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        hull = planar.convex_hull(pts, tol)
        wit = None
        if witnesses is not None:
            wit = tuple(witnesses[int(np.argmin(np.hypot(*(pts - h).T)))] for h in hull)
        return cls(hull, wit)

    def __len__(self):
        return len(self.vertices)

    @property
    def points(self):
        return [SurplusPoint(float(a), float(b)) for a, b in self.vertices]

    def affine(self, shift, scale: float) -> "SurplusPolygon":
        """Image under p -> shift + scale * p (scale > 0 keeps orientation)."""
        s = np.asarray(shift, dtype=float)
        if scale == 0:
            return SurplusPolygon(s.reshape(1, 2), None)
        return SurplusPolygon(s + scale * self.vertices, self.witnesses)

    def signed_distance(self, p) -> float:
        return planar.signed_distance(p, self.vertices)

    def contains(self, p, tol: float = 1e-8) -> bool:
        return planar.contains(p, self.vertices, tol)

    def hausdorff(self, other) -> float:
        other = other.vertices if isinstance(other, SurplusPolygon) else np.asarray(other, dtype=float)
        return planar.hausdorff(self.vertices, other)

    def extrema(self) -> dict:
        c, p = self.vertices[:, 0], self.vertices[:, 1]
        return {
            "max_producer": float(p.max()),
            "min_producer": float(p.min()),
            "max_consumer": float(c.max()),
            "min_consumer": float(c.min()),
        }


def project_polygon(polytope: PolytopeLP, tol: float = SWEEP_TOL, max_lp_calls: int = MAX_LP_CALLS) -> SurplusPolygon:
    """Exact shadow of the polytope on the utility plane by support-function sweep.

    Each direction is maximized by LP. An angular interval whose end support
    points differ is split at the outward normal of the chord between them;
    when that normal finds nothing beyond the chord the chord is an edge.
    """
    cons, prod = surplus_coefficients(polytope.grid)
    calls = 0
    found = []

    def support(theta):
        nonlocal calls
        calls += 1
        if calls > max_lp_calls:
            raise SweepLimitError(f"support sweep exceeded {max_lp_calls} LP calls")
        d = (np.cos(theta), np.sin(theta))
        obj = d[0] * cons + d[1] * prod
        if polytope.exact:
            obj = [Fraction(float(o)) for o in obj]
        sol = polytope.optimize(obj, "max")
        if not sol.optimal:
            raise NumericalError(f"polytope LP is {sol.status}; check the aggregate market")
        z = np.asarray(sol.point, dtype=float)
        p = np.array([cons @ z, prod @ z])
        found.append((p, z))
        return p

    angles = [0.0, np.pi / 2, np.pi, 3 * np.pi / 2]
    pts = [support(a) for a in angles]
    stack = [(angles[k], pts[k], angles[k] + np.pi / 2 if k == 3 else angles[k + 1], pts[(k + 1) % 4]) for k in range(4)]
    while stack:
        ta, pa, tb, pb = stack.pop()
        if np.hypot(*(pb - pa)) <= tol or tb - ta < MIN_ANGLE:
            continue
        edge = pb - pa
        tm = np.arctan2(-edge[0], edge[1])
        # bring the normal into (ta, tb)
        while tm <= ta:
            tm += 2 * np.pi
        while tm > ta + 2 * np.pi:
            tm -= 2 * np.pi
        if not ta < tm < tb:
            tm = 0.5 * (ta + tb)
        d = np.array([np.cos(tm), np.sin(tm)])
        pm = support(tm)
        if d @ pm <= max(d @ pa, d @ pb) + tol:
            continue
        stack.append((ta, pa, tm, pm))
        stack.append((tm, pm, tb, pb))
    points = np.array([p for p, _ in found])
    return SurplusPolygon.from_points(points, [z for _, z in found])


def project_sprime(grid: ValueGrid, x_star, beta: float, *, exact: bool = False) -> SurplusPolygon:
    return project_polygon(build_polytope(grid, x_star, beta, exact=exact))


def surplus_set(grid: ValueGrid, x_star, beta: float, shift, *, exact: bool = False, sprime: Optional[SurplusPolygon] = None) -> SurplusPolygon:
    """S = beta c + (1 - beta) S'; the single point c when beta is (numerically) one."""
    c = np.array([shift.consumer, shift.producer])
    if beta >= 1 - DEGENERATE_BETA:
        return SurplusPolygon(c.reshape(1, 2))
    if sprime is None:
        sprime = project_sprime(grid, x_star, beta, exact=exact)
    return sprime.affine(beta * c, 1.0 - beta)


# ---------------------------------------------------------------------------
# two-value closed forms


def _k2_singleton(v1, v2, alpha_star, beta):
    """Surviving-price point when one of the two prices can never be optimal."""
    eta = v1 / v2
    if beta > 2 * eta + 1e-15:
        return np.array([0.0, v2 * alpha_star])
    if beta > 2 * (1 - eta) + 1e-15:
        return np.array([(v2 - v1) * alpha_star, v1])
    return None


def k2_shift(v1: float, v2: float, alpha_star: float, beta: float) -> np.ndarray:
    t = clamped_tstar(v1 / v2, beta)
    return np.array([t * alpha_star * (v2 - v1), t * v1 + (1 - t) * alpha_star * v2])


def k2_sprime_triangle(v1: float, v2: float, alpha_star: float, beta: float) -> SurplusPolygon:
    """Closed-form S' for two values (vertices E, F, G)."""
    single = _k2_singleton(v1, v2, alpha_star, beta)
    if single is not None:
        return SurplusPolygon(single.reshape(1, 2))
    eta = v1 / v2
    t = clamped_tstar(eta, beta)
    a = alpha_star
    E = [0.0, a * v2 + (1 - a) * v1]
    if a >= t:
        F = [0.0, a * v2]
        xi = 0.0 if t >= 1 else (1 - a) * t / (1 - t) * (v2 - v1)
        G = [E[0] + xi, E[1] - xi]
    else:
        F = [a * (v2 - v1), v1]
        kappa = v1 + a * v2 * (1 - eta / t) if t > 0 else v1
        G = [0.0, kappa]
    return SurplusPolygon.from_points([E, F, G])


def k2_theorem1_triangle(v1: float, v2: float, alpha_star: float, beta: float) -> SurplusPolygon:
    """Closed-form S for two values (vertices A, B, C)."""
    single = _k2_singleton(v1, v2, alpha_star, beta)
    if single is not None:
        return SurplusPolygon(single.reshape(1, 2))
    if beta >= 1:
        # eta = 1/2 exactly: both prices tie for every observation
        return SurplusPolygon(k2_shift(v1, v2, alpha_star, 0.5).reshape(1, 2))
    eta = v1 / v2
    t = clamped_tstar(eta, beta)
    a = alpha_star
    c = k2_shift(v1, v2, a, beta)
    lo = max(t - a, 0.0)
    hi = max(a - t, 0.0)
    A1 = [0.0, a * v2 + (v1 * lo / t if t > 0 else 0.0)]
    B1 = [0.0, a * v2 + (1 - a) * v1]
    if t < 1:
        C1 = [a * (v2 - v1) - (v2 - v1) * hi / (1 - t), v1 + (v2 - v1) * hi / (1 - t)]
    else:
        C1 = [a * (v2 - v1), v1]
    pts = beta * c + (1 - beta) * np.array([A1, B1, C1])
    return SurplusPolygon.from_points(pts)


def k2_vertices(v1: float, v2: float, alpha_star: float, beta: float) -> dict:
    """Named A, B, C (and the shift c) for reporting."""
    eta = v1 / v2
    t = clamped_tstar(eta, beta)
    a = alpha_star
    c = k2_shift(v1, v2, a, beta)
    lo, hi = max(t - a, 0.0), max(a - t, 0.0)
    A1 = np.array([0.0, a * v2 + (v1 * lo / t if t > 0 else 0.0)])
    B1 = np.array([0.0, a * v2 + (1 - a) * v1])
    C1 = np.array([a * (v2 - v1) - (v2 - v1) * hi / (1 - t), v1 + (v2 - v1) * hi / (1 - t)]) if t < 1 else np.array([a * (v2 - v1), v1])
    return {
        "A": beta * c + (1 - beta) * A1,
        "B": beta * c + (1 - beta) * B1,
        "C": beta * c + (1 - beta) * C1,
        "c": c,
    }


def unmasked_triangle(grid: ValueGrid, x_star) -> SurplusPolygon:
    """The non-private triangle T, Q, R."""
    from .model import uniform_monopoly

    _, pi_u = uniform_monopoly(x_star, grid)
    ts = total_surplus(x_star, grid)
    return SurplusPolygon.from_points([[0.0, pi_u], [0.0, ts], [ts - pi_u, pi_u]])
