"""Posterior pricing under the masking mechanism.

With a uniform prior over markets and masking probability ``beta`` the
seller's posterior revenue at v_i after observing x_hat is

    v_i * ((1 - beta) * y_hat(i) + beta * (K - i) / K)        (0-based i)

so the seller is pulled towards the price with the largest weight
``(K - i) v_i`` as ``beta`` grows.
"""

from dataclasses import dataclass

import numpy as np

from .model import ValueGrid, _check_index, _mass, ccdf

TIE_RTOL = 1e-12


def posterior_scores(x_hat, beta: float, grid: ValueGrid) -> np.ndarray:
    y = ccdf(_mass(x_hat))
    K = grid.K
    prior = (K - np.arange(K)) / K
    return grid.values * ((1.0 - beta) * y + beta * prior)


def posterior_score(i: int, x_hat, beta: float, grid: ValueGrid) -> float:
    i = _check_index(i, grid.K)
    return float(posterior_scores(x_hat, beta, grid)[i])


def optimal_price_set(x_hat, beta: float, grid: ValueGrid) -> tuple:
    """All price indices maximizing the posterior score, ascending."""
    s = posterior_scores(x_hat, beta, grid)
    best = s.max()
    tol = TIE_RTOL * max(1.0, abs(best))
    return tuple(int(i) for i in np.flatnonzero(s >= best - tol))


def threshold_tstar(eta: float, beta: float) -> float:
    """Two-value threshold on the observed high-value share, unclamped."""
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    if not 0 <= beta < 1:
        raise ValueError("threshold undefined for beta outside [0, 1)")
    return (eta - beta / 2) / (1 - beta)


def clamped_tstar(eta: float, beta: float) -> float:
    return min(max(threshold_tstar(eta, beta), 0.0), 1.0)


def _bar_beta_ratio(i: int, grid: ValueGrid):
    """min over j != i of K (v_i - [j<i] v_j) / [w_j - w_i]_+.

    Returns None when no j constrains row i.
    """
    v, w, K = grid.values, grid.weights, grid.K
    best = None
    for j in range(K):
        if j == i:
            continue
        gap = w[j] - w[i]
        if gap <= 0:
            continue
        r = K * (v[i] - (v[j] if j < i else 0.0)) / gap
        if best is None or r < best:
            best = r
    return best


def bar_beta_all(grid: ValueGrid) -> np.ndarray:
    """Largest masking probability for which each price can still be optimal.

    Note this is a min over j, which is what the feasibility argument for
    the point mass on v_i gives.
    """
    out = np.ones(grid.K)
    for i in range(grid.K):
        r = _bar_beta_ratio(i, grid)
        if r is not None:
            out[i] = r / (1.0 + r)
    return out


def polytope_row_feasible(i: int, y, beta: float, grid: ValueGrid, tol: float = 1e-12) -> bool:
    """Whether a normalized complementary CDF ``y`` makes v_i optimal.

    Checks y(i) v_i - y(j) v_j >= beta / (K (1 - beta)) * (w_j - w_i) for
    every j.
    """
    if beta >= 1:
        raise ValueError("row feasibility is undefined at beta = 1")
    i = _check_index(i, grid.K)
    y = np.asarray(y, dtype=float)
    v, w = grid.values, grid.weights
    coef = beta / (grid.K * (1.0 - beta))
    lhs = y[i] * v[i] - y * v
    rhs = coef * (w - w[i])
    return bool(np.all(lhs >= rhs - tol))


@dataclass(frozen=True, eq=False)
class PricingRegions:
    beta: float
    grid: ValueGrid
    bar_beta: np.ndarray
    feasible: np.ndarray

    @classmethod
    def compute(cls, beta: float, grid: ValueGrid) -> "PricingRegions":
        if not 0 <= beta <= 1:
            raise ValueError("beta must lie in [0, 1]")
        bb = bar_beta_all(grid)
        return cls(beta, grid, bb, beta <= bb + 1e-15)

    def tstar(self):
        if self.grid.K != 2 or self.beta >= 1:
            return None
        v1, v2 = self.grid.values
        return threshold_tstar(v1 / v2, self.beta)
