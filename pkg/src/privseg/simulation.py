"""Monte Carlo run of the masking mechanism against a fixed segmentation.

Each trial picks a segment with probability equal to its weight, shows the
seller either the true segment (probability 1 - beta) or a uniformly drawn
market, lets the seller post the posterior-optimal price and books the
buyer and seller utilities on the true segment.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .measure import DEFAULT_SAMPLES, McEstimate, SHARD_SIZE, region_probabilities, shard_rng
from .model import Segmentation, SurplusPoint, ValueGrid, utility_table
from .pricing import optimal_price_set
from .segmentation import PricedSegmentation

DEFAULT_TRIALS = 1_000_000
POLICIES = {"lowest": _kernels.TIE_LOWEST, "highest": _kernels.TIE_HIGHEST, "uniform": _kernels.TIE_UNIFORM}
ZERO_DIFF = 1e-12


@dataclass(frozen=True)
class SimReport:
    consumer: McEstimate
    producer: McEstimate
    analytic: SurplusPoint
    z_scores: tuple

    def to_dict(self):
        return {
            "consumer": self.consumer.to_dict(),
            "producer": self.producer.to_dict(),
            "analytic": list(self.analytic),
            "z_scores": [_json_float(z) for z in self.z_scores],
        }


def _json_float(z):
    return z if np.isfinite(z) else ("inf" if z > 0 else "-inf")


def z_score(est: McEstimate, target: float) -> float:
    diff = est.value - target
    if est.std_error == 0:
        return 0.0 if abs(diff) < ZERO_DIFF else float(np.copysign(np.inf, diff))
    return diff / est.std_error


def _parts(seg):
    if isinstance(seg, PricedSegmentation):
        return [(g, m.mass, i) for g, m, i in seg.parts]
    if isinstance(seg, Segmentation):
        return [(g, m.mass, None) for g, m in seg.parts]
    raise TypeError("expected a Segmentation or PricedSegmentation")


def _policy_pick(tied, policy):
    """Probability of each tied index being posted."""
    if policy == "lowest":
        return {tied[0]: 1.0}
    if policy == "highest":
        return {tied[-1]: 1.0}
    return {i: 1.0 / len(tied) for i in tied}


def analytic_point(seg, beta: float, grid: ValueGrid, tie_policy: str = "uniform", *, branch: Optional[str] = None, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> SurplusPoint:
    """Expected utilities of the mechanism, computed segment by segment.

    Masked draws use the region probabilities (closed form where available).
    At beta = 1 every observation ties on the same set, so the tie policy
    decides the masked price.
    """
    parts = _parts(seg)
    K = grid.K
    masked_policy = "uniform" if tie_policy == "assigned" else tie_policy
    if beta >= 1:
        tied = optimal_price_set(np.full(K, 1.0 / K), 1.0, grid)
        q = np.zeros(K)
        for i, p in _policy_pick(tied, masked_policy).items():
            q[i] = p
    elif beta > 0 or branch == "masked":
        q = np.array([e.value for e in region_probabilities(beta, grid, samples, seed)])
    else:
        q = None
    w_masked = {None: beta, "masked": 1.0, "unmasked": 0.0}[branch]
    tot = np.zeros(2)
    for g, m, assigned in parts:
        table = utility_table(m, grid)
        if w_masked < 1:
            if tie_policy == "assigned":
                if assigned is None:
                    raise ValueError("tie policy 'assigned' needs a priced segmentation")
                pick = {assigned: 1.0}
            else:
                pick = _policy_pick(optimal_price_set(m, beta, grid), tie_policy)
            direct = sum(p * table[i] for i, p in pick.items())
            tot += g * (1 - w_masked) * direct
        if w_masked > 0:
            tot += g * w_masked * (q @ table)
    return SurplusPoint(float(tot[0]), float(tot[1]))


def _run(seg, beta, grid, trials, seed, tie_policy, branch, analytic_samples, analytic_seed):
    if tie_policy not in POLICIES and tie_policy != "assigned":
        raise ValueError(f"unknown tie policy {tie_policy!r}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    parts = _parts(seg)
    if not parts:
        raise ValueError("empty segmentation")
    K = grid.K
    gammas = np.array([p[0] for p in parts])
    gammas = gammas / gammas.sum()
    masses = np.array([p[1] for p in parts])
    tables = np.array([utility_table(m, grid) for m in masses])
    policy = POLICIES.get(tie_policy, _kernels.TIE_UNIFORM)
    if tie_policy == "assigned":
        if any(p[2] is None for p in parts):
            raise ValueError("tie policy 'assigned' needs a priced segmentation")
        assigned = np.array([p[2] for p in parts])
    sums = np.zeros(2)
    sumsq = np.zeros(2)
    full, rest = divmod(trials, SHARD_SIZE)
    sizes = [SHARD_SIZE] * full + ([rest] if rest else [])
    for shard, n in enumerate(sizes):
        rng = shard_rng(seed, shard)
        seg_idx = rng.choice(len(parts), size=n, p=gammas)
        if branch == "masked":
            masked = np.ones(n, dtype=bool)
        elif branch == "unmasked":
            masked = np.zeros(n, dtype=bool)
        else:
            masked = rng.random(n) < beta
        noise = rng.standard_exponential((n, K))
        u = rng.random(n)
        observed = np.where(masked[:, None], noise, masses[seg_idx])
        price = _kernels.choose_prices(observed, grid.values, beta, policy, u)
        if tie_policy == "assigned":
            price = np.where(masked, price, assigned[seg_idx])
        util = tables[seg_idx, price]
        sums += util.sum(axis=0)
        sumsq += (util * util).sum(axis=0)
    cons = McEstimate.from_moments(sums[0], sumsq[0], trials, seed)
    prod = McEstimate.from_moments(sums[1], sumsq[1], trials, seed)
    target = analytic_point(seg, beta, grid, tie_policy, branch=branch, samples=analytic_samples, seed=analytic_seed)
    return SimReport(cons, prod, target, (z_score(cons, target.consumer), z_score(prod, target.producer)))


def simulate(seg, beta: float, grid: ValueGrid, trials: int = DEFAULT_TRIALS, seed: int = 0, tie_policy: str = "uniform", *, analytic_samples: int = DEFAULT_SAMPLES, analytic_seed: int = 0) -> SimReport:
    """Empirical utilities of the mechanism with z-scores against the analytic point.

    ``tie_policy`` is "uniform", "lowest", "highest", or "assigned" (unmasked
    trials post the segment's own price index). For K >= 3 the analytic
    point uses Monte Carlo region probabilities drawn with ``analytic_seed``,
    kept apart from the trial streams.
    """
    if not 0 <= beta <= 1:
        raise ValueError("beta must lie in [0, 1]")
    return _run(seg, beta, grid, trials, seed, tie_policy, None, analytic_samples, analytic_seed)


def simulate_branch(seg, beta: float, grid: ValueGrid, branch: str, trials: int = DEFAULT_TRIALS, seed: int = 0, tie_policy: str = "uniform", *, analytic_samples: int = DEFAULT_SAMPLES, analytic_seed: int = 0) -> SimReport:
    """Run only masked or only unmasked trials."""
    if branch not in ("masked", "unmasked"):
        raise ValueError("branch must be 'masked' or 'unmasked'")
    return _run(seg, beta, grid, trials, seed, tie_policy, branch, analytic_samples, analytic_seed)
