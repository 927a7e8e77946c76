"""Explicit segmentations: recovery from polytope points and canonical merging."""

from dataclasses import dataclass
from numbers import Real

import numpy as np

from .geometry import build_polytope
from .model import Market, Segmentation, SurplusPoint, ValueGrid, _mass, utility_table
from .pricing import clamped_tstar, optimal_price_set, polytope_row_feasible

WEIGHT_FLOOR = 1e-12
FEASIBILITY_TOL = 1e-8


class PriceAssignmentError(ValueError):
    """A segment was assigned a price that is not optimal for it."""


@dataclass(frozen=True, eq=False)
class PricedSegmentation:
    """Segments (weight, market, price index), at most one per index, sorted by index."""

    parts: tuple
    aggregate: Market

    def __post_init__(self):
        parts = tuple(sorted(((float(g), m if isinstance(m, Market) else Market(m), int(i)) for g, m, i in self.parts), key=lambda p: p[2]))
        idx = [p[2] for p in parts]
        if len(set(idx)) != len(idx):
            raise ValueError("canonical form allows one segment per price index")
        # reuse the weight and aggregation checks
        Segmentation(tuple((g, m) for g, m, _ in parts), self.aggregate)
        agg = self.aggregate if isinstance(self.aggregate, Market) else Market(self.aggregate)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "aggregate", agg)

    def __len__(self):
        return len(self.parts)

    @property
    def segmentation(self) -> Segmentation:
        return Segmentation(tuple((g, m) for g, m, _ in self.parts), self.aggregate)

    def check_prices(self, beta: float, grid: ValueGrid, tol: float = FEASIBILITY_TOL):
        """Raise ``PriceAssignmentError`` unless every market lies in its price region."""
        for g, m, i in self.parts:
            if beta >= 1:
                ok = i in optimal_price_set(m, 1.0, grid)
            else:
                ok = polytope_row_feasible(i, m.ccdf, beta, grid, tol)
            if not ok:
                raise PriceAssignmentError(f"price index {i} is not optimal for segment {m.mass.tolist()} at beta={beta}")

    def sprime_point(self, grid: ValueGrid) -> SurplusPoint:
        """Utilities when every segment is priced at its assigned index."""
        tot = np.zeros(2)
        for g, m, i in self.parts:
            tot += g * utility_table(m, grid)[i]
        return SurplusPoint(float(tot[0]), float(tot[1]))

    def surplus_point(self, grid: ValueGrid, beta: float, shift) -> SurplusPoint:
        sp = self.sprime_point(grid)
        return SurplusPoint(
            beta * shift.consumer + (1 - beta) * sp.consumer,
            beta * shift.producer + (1 - beta) * sp.producer,
        )

    def to_dict(self):
        return {
            "aggregate": self.aggregate.mass.tolist(),
            "segments": [{"weight": g, "market": m.mass.tolist(), "price_index": i} for g, m, i in self.parts],
        }

    @classmethod
    def from_dict(cls, d) -> "PricedSegmentation":
        parts = [(s["weight"], Market(s["market"]), s["price_index"]) for s in d["segments"]]
        return cls(tuple(parts), Market(d["aggregate"]))


def build_segmentation(z, grid: ValueGrid, x_star, beta: float, tol: float = FEASIBILITY_TOL) -> PricedSegmentation:
    """Invert z(i, j) = gamma_i y_i(j) into explicit segments."""
    K = grid.K
    z = np.asarray(z, dtype=float).reshape(K, K)
    poly = build_polytope(grid, x_star, beta)
    viol = poly.program([0.0] * K * K).max_violation(z.ravel())
    if viol > tol:
        raise ValueError(f"z violates the polytope by {viol:.3g}")
    agg = Market(_mass(x_star))
    parts = []
    for i in range(K):
        gamma = max(z[i, 0], 0.0)
        if gamma < WEIGHT_FLOOR:
            continue
        y = np.maximum(z[i] / gamma, 0.0)
        mass = np.maximum(y - np.append(y[1:], 0.0), 0.0)
        parts.append([gamma, Market.normalized(mass), i])
    total = sum(p[0] for p in parts)
    for p in parts:
        p[0] /= total
    return PricedSegmentation(tuple(tuple(p) for p in parts), agg)


def _resolve(policy, k: int, tied: tuple, gamma: float):
    """[(weight, index)] for one segment under the tie policy."""
    if isinstance(policy, str):
        if policy == "lowest":
            return [(gamma, tied[0])]
        if policy == "highest":
            return [(gamma, tied[-1])]
        raise ValueError(f"unknown tie policy {policy!r}")
    if isinstance(policy, Real):
        d = float(policy)
        if not 0 <= d <= 1:
            raise ValueError("split delta must lie in [0, 1]")
        if len(tied) == 1:
            return [(gamma, tied[0])]
        return [(gamma * (1 - d), tied[0]), (gamma * d, tied[-1])]
    i = int(policy[k])
    if i not in tied:
        raise PriceAssignmentError(f"segment {k}: assigned price index {i} is not among optimal {tied}")
    return [(gamma, i)]


def merge_to_canonical(parts, tie_policy, beta: float, grid: ValueGrid, aggregate=None) -> PricedSegmentation:
    """Price each segment by the posterior rule and merge segments sharing a price.

    ``tie_policy`` is "lowest", "highest", a float delta (mass ``delta`` of a
    tied segment goes to the highest tied price, the rest to the lowest), or
    a sequence giving one explicit price index per segment.
    """
    if isinstance(parts, Segmentation):
        aggregate = parts.aggregate if aggregate is None else aggregate
        parts = parts.parts
    parts = [(float(g), m if isinstance(m, Market) else Market(m)) for g, m in parts]
    if aggregate is None:
        aggregate = Market(sum(g * m.mass for g, m in parts))
    if not isinstance(tie_policy, (str, Real)) and len(tie_policy) != len(parts):
        raise ValueError("explicit price assignment needs one index per segment")
    weight = np.zeros(grid.K)
    mix = np.zeros((grid.K, grid.K))
    for k, (g, m) in enumerate(parts):
        tied = optimal_price_set(m, beta, grid)
        for share, i in _resolve(tie_policy, k, tied, g):
            weight[i] += share
            mix[i] += share * m.mass
    out = []
    for i in range(grid.K):
        if weight[i] < WEIGHT_FLOOR:
            continue
        out.append((weight[i], Market.normalized(mix[i]), i))
    total = sum(p[0] for p in out)
    out = [(g / total, m, i) for g, m, i in out]
    return PricedSegmentation(tuple(out), aggregate if isinstance(aggregate, Market) else Market(aggregate))


def first_degree_segmentation(x_star) -> Segmentation:
    """One point-mass segment per supported value."""
    m = _mass(x_star)
    K = m.size
    parts = tuple((float(m[i]), Market.point(i, K)) for i in range(K) if m[i] > 0)
    return Segmentation(parts, Market(m))


def k2_expected_utilities(alpha: float, delta: float, v1: float, v2: float, beta: float) -> SurplusPoint:
    """Mechanism utilities of the two-value market (1 - alpha, alpha).

    Unmasked it is priced v1 below t*, v2 above, and split (1 - delta, delta)
    at t*. Masked draws fall in the high-price region with probability 1 - t*.
    """
    t = clamped_tstar(v1 / v2, beta)
    gap = v2 - v1

    def f1():
        return (1 - beta + beta * t) * v1 + beta * (1 - t) * alpha * v2

    def g1():
        return (1 - beta + beta * t) * alpha * gap

    def f2():
        return (1 - beta + beta * (1 - t)) * alpha * v2 + beta * t * v1

    def g2():
        return beta * t * alpha * gap

    if alpha < t:
        return SurplusPoint(g1(), f1())
    if alpha > t:
        return SurplusPoint(g2(), f2())
    return SurplusPoint((1 - delta) * g1() + delta * g2(), (1 - delta) * f1() + delta * f2())
