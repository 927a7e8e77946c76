"""Value grids, markets, segmentations and the posted-price utilities.

Price indices are 0-based throughout the package: index ``i`` means price
``grid.values[i]``. The weight of index ``i`` is ``(K - i) * v_i``, the
revenue a fully uninformed seller expects at that price (times K).
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

MASS_ATOL = 1e-12
AGGREGATE_ATOL = 1e-10


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ValueGrid:
    """Strictly increasing positive consumer values v_1 < ... < v_K."""

    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("value grid must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(v)):
            raise ValueError("value grid entries must be finite")
        if v[0] <= 0 or np.any(np.diff(v) <= 0):
            raise ValueError("values must satisfy 0 < v_1 < v_2 < ... < v_K")
        object.__setattr__(self, "values", v)

    @property
    def K(self) -> int:
        return self.values.size

    @property
    def weights(self) -> np.ndarray:
        """(K + 1 - i) v_i in 1-based terms, i.e. (K - i) v_i for 0-based i."""
        return (self.K - np.arange(self.K)) * self.values

    def __len__(self):
        return self.K

    def __repr__(self):
        return f"ValueGrid({self.values.tolist()})"


@dataclass(frozen=True, eq=False)
class Market:
    """A probability mass over the value grid."""

    mass: np.ndarray

    def __post_init__(self):
        m = _frozen(self.mass)
        if m.ndim != 1 or m.size == 0:
            raise ValueError("market mass must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise ValueError("market mass must be finite and nonnegative")
        if abs(m.sum() - 1.0) > MASS_ATOL:
            raise ValueError(f"market mass sums to {m.sum()!r}, not 1")
        object.__setattr__(self, "mass", m)

    @classmethod
    def normalized(cls, mass) -> "Market":
        """Build a market after explicitly rescaling ``mass`` to sum to one."""
        m = np.asarray(mass, dtype=float)
        return cls(m / m.sum())

    @classmethod
    def point(cls, j: int, K: int) -> "Market":
        m = np.zeros(K)
        m[j] = 1.0
        return cls(m)

    @property
    def K(self) -> int:
        return self.mass.size

    @property
    def ccdf(self) -> np.ndarray:
        """y(j) = mass at or above v_j."""
        return ccdf(self.mass)

    def __repr__(self):
        return f"Market({self.mass.tolist()})"


class SurplusPoint(NamedTuple):
    consumer: float
    producer: float


@dataclass(frozen=True, eq=False)
class Segmentation:
    """Finite weighted decomposition of an aggregate market."""

    parts: tuple
    aggregate: Market

    def __post_init__(self):
        parts = tuple((float(g), m if isinstance(m, Market) else Market(m)) for g, m in self.parts)
        if not parts:
            raise ValueError("segmentation needs at least one part")
        weights = np.array([g for g, _ in parts])
        if np.any(weights < 0) or np.any(weights > 1):
            raise ValueError("segment weights must lie in [0, 1]")
        if abs(weights.sum() - 1.0) > MASS_ATOL:
            raise ValueError(f"segment weights sum to {weights.sum()!r}, not 1")
        mix = sum(g * m.mass for g, m in parts)
        agg = self.aggregate if isinstance(self.aggregate, Market) else Market(self.aggregate)
        if np.max(np.abs(mix - agg.mass)) > AGGREGATE_ATOL:
            raise ValueError("segments do not aggregate to the declared market")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "aggregate", agg)

    @property
    def weights(self) -> np.ndarray:
        return np.array([g for g, _ in self.parts])

    def __len__(self):
        return len(self.parts)


def ccdf(mass) -> np.ndarray:
    m = np.asarray(mass, dtype=float)
    return np.cumsum(m[..., ::-1], axis=-1)[..., ::-1]


def _mass(x) -> np.ndarray:
    return x.mass if isinstance(x, Market) else np.asarray(x, dtype=float)


def _check_index(i: int, K: int) -> int:
    if not 0 <= i < K:
        raise IndexError(f"price index {i} out of range for K={K}")
    return int(i)


def producer_utility(i: int, x, grid: ValueGrid) -> float:
    """Revenue v_i * y(i) from posting price v_i to market ``x``."""
    i = _check_index(i, grid.K)
    return float(grid.values[i] * _mass(x)[i:].sum())


def consumer_utility(i: int, x, grid: ValueGrid) -> float:
    """Consumer surplus sum_{k >= i} x_k (v_k - v_i) at price v_i."""
    i = _check_index(i, grid.K)
    v = grid.values
    return float(np.dot(_mass(x)[i:], v[i:] - v[i]))


def utility_table(x, grid: ValueGrid) -> np.ndarray:
    """(K, 2) array of (consumer, producer) utility at every price index."""
    m = _mass(x)
    v = grid.values
    y = ccdf(m)
    producer = v * y
    # sum_{k>=i} m_k v_k - v_i y_i
    revenue_above = ccdf(m * v)
    return np.column_stack([revenue_above - producer, producer])


def total_surplus(x, grid: ValueGrid) -> float:
    return float(np.dot(_mass(x), grid.values))


def uniform_monopoly(x, grid: ValueGrid, tol: float = 1e-12):
    """Optimal single posted price for ``x``.

    Returns ``(indices, profit)`` where ``indices`` lists every maximizing
    price index in ascending order.
    """
    profits = grid.values * ccdf(_mass(x))
    best = profits.max()
    idx = tuple(int(i) for i in np.flatnonzero(profits >= best - tol * max(1.0, best)))
    return idx, float(best)
