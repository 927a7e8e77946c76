"""Uniform measure on the simplex: region probabilities and the shift vector.

Monte Carlo runs in fixed-size shards. Shard ``k`` draws from a Philox
stream keyed by ``SeedSequence(seed, spawn_key=(k,))`` so results depend
only on (seed, samples), never on how many workers ran the shards.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import Market, ValueGrid, _mass, utility_table
from .pricing import clamped_tstar

DEFAULT_SAMPLES = 1_000_000
SHARD_SIZE = 1 << 16


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    samples: int
    seed: int

    @classmethod
    def exact(cls, value: float, seed: int = 0) -> "McEstimate":
        return cls(float(value), 0.0, 0, seed)

    @classmethod
    def from_moments(cls, total: float, total_sq: float, n: int, seed: int) -> "McEstimate":
        mean = total / n
        var = max(total_sq - n * mean * mean, 0.0) / (n - 1) if n > 1 else 0.0
        return cls(float(mean), float(np.sqrt(var / n)), int(n), seed)

    def to_dict(self):
        return {"value": self.value, "std_error": self.std_error, "samples": self.samples, "seed": self.seed}


@dataclass(frozen=True, eq=False)
class ShiftVector:
    """Expected (consumer, producer) utility of x* priced off a masked draw."""

    consumer: float
    producer: float
    per_region_prob: np.ndarray
    estimates: tuple

    def to_dict(self):
        return {
            "c": [self.consumer, self.producer],
            "region_probabilities": [e.value for e in self.estimates],
            "std_errors": [e.std_error for e in self.estimates],
            "samples": self.estimates[0].samples,
            "seed": self.estimates[0].seed,
        }


def shard_rng(seed: int, shard: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(shard,))))


def uniform_draws(rng: np.random.Generator, n: int, K: int) -> np.ndarray:
    """Unnormalized rows whose normalization is uniform on the simplex."""
    return rng.standard_exponential((n, K))


def sample_uniform_market(rng: np.random.Generator, K: int) -> Market:
    if K < 1:
        raise ValueError("K must be positive")
    e = uniform_draws(rng, 1, K)[0]
    return Market.normalized(e)


def sample_uniform_markets(rng: np.random.Generator, n: int, K: int) -> np.ndarray:
    e = uniform_draws(rng, n, K)
    return e / e.sum(axis=1, keepdims=True)


def _shard_sizes(samples: int):
    full, rest = divmod(samples, SHARD_SIZE)
    return [SHARD_SIZE] * full + ([rest] if rest else [])


def _exact_regions(beta: float, grid: ValueGrid):
    """Closed-form region probabilities where they exist (K = 2 or beta = 1)."""
    K = grid.K
    if beta >= 1:
        w = grid.weights
        top = w >= w.max() * (1 - 1e-12)
        return top / top.sum()
    if K == 1:
        return np.ones(1)
    if K == 2:
        v1, v2 = grid.values
        t = clamped_tstar(v1 / v2, beta)
        return np.array([t, 1.0 - t])
    return None


def region_probabilities(
    beta: float,
    grid: ValueGrid,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    *,
    exact: bool = True,
    workers: int = 1,
) -> list:
    """Probability under the uniform prior that each price is the posterior optimum.

    With ``exact`` (the default) K = 2 and beta = 1 use closed forms; pass
    ``exact=False`` to force the Monte Carlo path.
    """
    if not 0 <= beta <= 1:
        raise ValueError("beta must lie in [0, 1]")
    if exact:
        p = _exact_regions(beta, grid)
        if p is not None:
            return [McEstimate.exact(q, seed) for q in p]
    if samples <= 0:
        raise ValueError("samples must be positive")
    K = grid.K
    values = grid.values

    def run(item):
        shard, n = item
        draws = uniform_draws(shard_rng(seed, shard), n, K)
        return _kernels.region_moments(draws, values, beta)

    items = list(enumerate(_shard_sizes(samples)))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            moments = list(pool.map(run, items))
    else:
        moments = [run(it) for it in items]
    sums = np.sum([m[0] for m in moments], axis=0)
    sumsq = np.sum([m[1] for m in moments], axis=0)
    return [McEstimate.from_moments(s, q, samples, seed) for s, q in zip(sums, sumsq)]


def shift_vector(
    beta: float,
    x_star,
    grid: ValueGrid,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    *,
    exact: bool = True,
    workers: int = 1,
) -> ShiftVector:
    est = region_probabilities(beta, grid, samples, seed, exact=exact, workers=workers)
    p = np.array([e.value for e in est])
    table = utility_table(_mass(x_star), grid)
    c = p @ table
    return ShiftVector(float(c[0]), float(c[1]), p, tuple(est))
