"""Comparative statics and privacy diagnostics."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np

from .geometry import build_polytope, surplus_coefficients, surplus_set
from .lp import NumericalError
from .measure import DEFAULT_SAMPLES, region_probabilities, shift_vector
from .model import ValueGrid, _mass, uniform_monopoly
from .pricing import bar_beta_all, clamped_tstar

DEADBAND = 1e-9
W_TOL = 1e-12

DECREASING = "decreasing"
INCREASING_CANDIDATE = "increasing-candidate"
INCONCLUSIVE = "inconclusive"


def privacy_leakage(beta: float) -> float:
    if not 0 <= beta <= 1:
        raise ValueError("beta must lie in [0, 1]")
    return 1.0 - beta


class DpRatio(NamedTuple):
    ratio: float
    log_ratio: float


def dp_epsilon_ratio(beta: float, region_probs) -> Optional[DpRatio]:
    """Worst likelihood ratio of an observation across true markets.

    None means unconstrained (beta = 0 reveals the market).
    """
    if not 0 <= beta <= 1:
        raise ValueError("beta must lie in [0, 1]")
    if beta == 0:
        return None
    p = np.array([getattr(q, "value", q) for q in region_probs], dtype=float)
    p = p[p > 0]
    if p.size == 0:
        raise ValueError("no region has positive probability")
    r = float(np.max((1 - beta + beta * p) / (beta * p)))
    return DpRatio(r, math.log(r))


def max_producer_monotone(alpha_star: float, eta: float) -> bool:
    """Two values: whether the producer's best attainable utility falls with beta."""
    return (alpha_star >= 0.5 and eta >= 0.5) or (alpha_star <= 0.5 and eta <= 0.5)


def min_consumer_monotone(eta: float) -> bool:
    """Two values: whether the consumer's worst attainable utility rises with beta."""
    return eta >= 0.5


def _uniform_rep(grid: ValueGrid, x_star) -> int:
    """Uniform-monopoly price index; ties go to the largest weight."""
    idx, _ = uniform_monopoly(x_star, grid)
    w = grid.weights
    return max(idx, key=lambda i: (w[i], i))


def crossing_condition(grid: ValueGrid, x_star) -> bool:
    """Whether some price carries strictly more prior weight than the uniform-monopoly price."""
    w = grid.weights
    j = _uniform_rep(grid, x_star)
    return bool(w.max() > w[j] + W_TOL * max(1.0, abs(w[j])))


def q_inclusion(beta: float, grid: ValueGrid, x_star) -> bool:
    """First-degree point inside S' iff every supported value stays priceable."""
    m = _mass(x_star)
    if beta == 0:
        return True
    bb = bar_beta_all(grid)
    return bool(beta <= bb[m > 0].min() + 1e-15)


def prop7_case(grid: ValueGrid, x_star):
    """Classify how the consumer's best utility moves with beta.

    Returns ``(label, alpha_tilde)``; alpha_tilde is only known for K = 2.
    """
    w = grid.weights
    idx, _ = uniform_monopoly(x_star, grid)
    dw = np.diff(w)
    tol = W_TOL * max(1.0, float(np.abs(w).max()))
    if 0 in idx and np.all(dw >= -tol):
        return DECREASING, None
    if grid.K - 1 in idx and np.all(dw <= tol):
        alpha_t = None
        if grid.K == 2:
            eta = grid.values[0] / grid.values[1]
            alpha_t = float(1.0 / (2.0 - eta))
        return INCREASING_CANDIDATE, alpha_t
    return INCONCLUSIVE, None


def min_producer_sprime(grid: ValueGrid, x_star, beta: float, *, exact: bool = False) -> float:
    """LP minimum of the producer coordinate over S'."""
    poly = build_polytope(grid, x_star, beta, exact=exact)
    _, prod = surplus_coefficients(grid)
    sol = poly.optimize(list(prod), "min")
    if not sol.optimal:
        raise NumericalError(f"polytope LP is {sol.status}")
    return float(sol.objective_value)


def min_consumer_sprime(grid: ValueGrid, x_star, beta: float, *, exact: bool = False) -> float:
    poly = build_polytope(grid, x_star, beta, exact=exact)
    cons, _ = surplus_coefficients(grid)
    sol = poly.optimize(list(cons), "min")
    if not sol.optimal:
        raise NumericalError(f"polytope LP is {sol.status}")
    return float(sol.objective_value)


def k2_max_producer(v1, v2, alpha_star, beta) -> float:
    t = clamped_tstar(v1 / v2, beta)
    a = alpha_star
    return a * v2 + (1 - a) * v1 - beta * (t * (a * v2 - v1) + (1 - a) * v1)


def k2_min_consumer(v1, v2, alpha_star, beta) -> float:
    return beta * clamped_tstar(v1 / v2, beta) * alpha_star * (v2 - v1)


def _k2_regular(eta: float, beta: float) -> bool:
    return beta <= min(2 * eta, 2 * (1 - eta)) + 1e-15


def extrema_curves(grid: ValueGrid, x_star, beta_grid, *, samples: int = DEFAULT_SAMPLES, seed: int = 0, exact: bool = False, workers: int = 1) -> list:
    """One row per beta: the four extrema of S, plus two-value closed forms."""
    betas = [float(b) for b in beta_grid]
    if any(not 0 <= b < 1 for b in betas):
        raise ValueError("beta grid must lie in [0, 1)")
    m = _mass(x_star)

    def row(beta):
        sh = shift_vector(beta, m, grid, samples, seed)
        S = surplus_set(grid, m, beta, sh, exact=exact)
        out = {"beta": beta, **S.extrema()}
        if grid.K == 2:
            v1, v2 = grid.values
            if _k2_regular(v1 / v2, beta):
                out["closed_max_producer"] = k2_max_producer(v1, v2, m[1], beta)
                out["closed_min_consumer"] = k2_min_consumer(v1, v2, m[1], beta)
        return out

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(row, betas))
    return [row(b) for b in betas]


def trend(values, deadband: float = DEADBAND) -> str:
    """"increasing", "decreasing", "constant" or "non-monotone" under a deadband."""
    d = np.diff(np.asarray(values, dtype=float))
    up = bool(np.any(d > deadband))
    down = bool(np.any(d < -deadband))
    if up and down:
        return "non-monotone"
    if up:
        return "increasing"
    if down:
        return "decreasing"
    return "constant"


@dataclass(frozen=True)
class Diagnostics:
    leakage: float
    dp_epsilon_ratio: Optional[float]
    dp_epsilon_log: Optional[float]
    crossing: bool
    q_included: bool
    max_producer_monotone: Optional[bool]
    min_consumer_monotone: Optional[bool]
    prop7_case: str
    alpha_tilde: Optional[float] = None

    def to_dict(self):
        return asdict(self)


def diagnose(grid: ValueGrid, x_star, beta: float, *, samples: int = DEFAULT_SAMPLES, seed: int = 0, exact: bool = True) -> Diagnostics:
    m = _mass(x_star)
    dp = None
    if beta > 0:
        dp = dp_epsilon_ratio(beta, region_probabilities(beta, grid, samples, seed, exact=exact))
    mp = mc = None
    if grid.K == 2:
        eta = grid.values[0] / grid.values[1]
        mp = bool(max_producer_monotone(float(m[1]), float(eta)))
        mc = bool(min_consumer_monotone(float(eta)))
    case, alpha_t = prop7_case(grid, m)
    return Diagnostics(
        leakage=privacy_leakage(float(beta)),
        dp_epsilon_ratio=None if dp is None else dp.ratio,
        dp_epsilon_log=None if dp is None else dp.log_ratio,
        crossing=crossing_condition(grid, m),
        q_included=q_inclusion(beta, grid, m),
        max_producer_monotone=mp,
        min_consumer_monotone=mc,
        prop7_case=case,
        alpha_tilde=alpha_t,
    )
