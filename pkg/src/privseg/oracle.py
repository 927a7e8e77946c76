"""Brute-force utility clouds from lattice segmentations (K <= 3).

Markets have integer counts summing to D. A candidate assigns up to
``max_segments`` lattice markets to distinct prices they are optimal for;
the weights that make them aggregate to x* are solved in integer
arithmetic, so only exactly aggregating candidates contribute a point.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from . import planar
from .measure import shift_vector
from .model import ValueGrid, _mass, utility_table
from .pricing import optimal_price_set, polytope_row_feasible

MAX_CANDIDATES = 10_000_000
MARGIN = 1e-6
ROW_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GridCloud:
    points: np.ndarray
    denominator: int
    segment_budget: int
    candidates: int = 0
    truncated: bool = False

    def __len__(self):
        return len(self.points)

    def hull(self) -> np.ndarray:
        return planar.convex_hull(self.points)

    def to_dict(self):
        return {
            "denominator": self.denominator,
            "segment_budget": self.segment_budget,
            "points": len(self.points),
            "candidates": self.candidates,
            "truncated": self.truncated,
        }


def lattice_counts(x_star, D: int) -> np.ndarray:
    m = _mass(x_star) * D
    n = np.rint(m).astype(np.int64)
    if np.max(np.abs(m - n)) > 1e-9 or n.sum() != D or np.any(n < 0):
        raise ValueError(f"aggregate is not on the 1/{D} lattice")
    return n


def compositions(D: int, K: int) -> np.ndarray:
    """All nonnegative integer K-vectors summing to D, lexicographic."""
    rows = []
    for cuts in itertools.combinations(range(D + K - 1), K - 1):
        prev, row = -1, []
        for c in cuts:
            row.append(c - prev - 1)
            prev = c
        row.append(D + K - 2 - prev)
        rows.append(row)
    return np.array(rows, dtype=np.int64).reshape(-1, K)


def _feasible_prices(markets, beta, grid, D):
    feas = np.zeros((len(markets), grid.K), dtype=bool)
    for r, m in enumerate(markets):
        x = m / D
        if beta >= 1:
            for i in optimal_price_set(x, 1.0, grid):
                feas[r, i] = True
        else:
            y = np.cumsum(x[::-1])[::-1]
            for i in range(grid.K):
                feas[r, i] = polytope_row_feasible(i, y, beta, grid, ROW_TOL)
    return feas


def enumerate_cloud(grid: ValueGrid, x_star_lattice, beta: float, D: int, max_segments=None, shift=None) -> GridCloud:
    """Utility points of every exactly aggregating lattice assignment.

    ``shift`` is the masked-draw utility pair c; computed when omitted.
    """
    K = grid.K
    if K > 3:
        raise ValueError("lattice enumeration supports K <= 3")
    if D < 1:
        raise ValueError("D must be positive")
    budget = K if max_segments is None else int(max_segments)
    if not 1 <= budget <= K:
        raise ValueError("max_segments must lie in [1, K]")
    target = lattice_counts(x_star_lattice, D)
    if shift is None:
        shift = shift_vector(beta, target / D, grid)
    c = np.array([shift.consumer, shift.producer])
    markets = compositions(D, K)
    feas = _feasible_prices(markets, beta, grid, D)
    # (K, 2) utility table per lattice market
    tables = np.array([utility_table(m / D, grid) for m in markets])
    by_price = [np.flatnonzero(feas[:, i]) for i in range(K)]

    sprime = []
    count = 0
    truncated = False

    # single segment: the aggregate itself
    match = np.flatnonzero(np.all(markets == target, axis=1))
    for r in match:
        for i in np.flatnonzero(feas[r]):
            sprime.append(tables[r, i][None])
            count += 1

    for s in range(2, budget + 1):
        for prices in itertools.combinations(range(K), s):
            groups = [by_price[i] for i in prices]
            n_cand = int(np.prod([len(g) for g in groups]))
            if count + n_cand > MAX_CANDIDATES:
                truncated = True
                continue
            count += n_cand
            if n_cand == 0:
                continue
            if s == 2:
                pts = _pairs(markets, tables, target, groups, prices)
            else:
                pts = _triples(markets, tables, target, groups, prices)
            if len(pts):
                sprime.append(pts)
    pts = np.concatenate(sprime) if sprime else np.empty((0, 2))
    pts = beta * c + (1 - beta) * pts
    return GridCloud(pts, D, budget, count, truncated)


def _pairs(markets, tables, target, groups, prices):
    a_idx, b_idx = (g.ravel() for g in np.meshgrid(groups[0], groups[1], indexing="ij"))
    m1, m2 = markets[a_idx], markets[b_idx]
    d = m1 - m2
    e = target - m2
    K = d.shape[1]
    ok = np.any(d != 0, axis=1)
    for p, q in itertools.combinations(range(K), 2):
        ok &= e[:, p] * d[:, q] - e[:, q] * d[:, p] == 0
    num = np.einsum("ij,ij->i", e, d)
    den = np.einsum("ij,ij->i", d, d)
    ok &= (num >= 0) & (num <= den)
    g = num[ok] / den[ok]
    pa, pb = prices
    u1 = tables[a_idx[ok], pa]
    u2 = tables[b_idx[ok], pb]
    return g[:, None] * u1 + (1 - g)[:, None] * u2


def _det3(a, b, c):
    return (
        a[:, 0] * (b[:, 1] * c[:, 2] - b[:, 2] * c[:, 1])
        - a[:, 1] * (b[:, 0] * c[:, 2] - b[:, 2] * c[:, 0])
        + a[:, 2] * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    )


def _triples(markets, tables, target, groups, prices):
    out = []
    B, C = (g.ravel() for g in np.meshgrid(groups[1], groups[2], indexing="ij"))
    mb, mc = markets[B], markets[C]
    t = np.broadcast_to(target, mb.shape)
    for a in groups[0]:
        ma = np.broadcast_to(markets[a], mb.shape)
        det = _det3(ma, mb, mc)
        da = _det3(t, mb, mc)
        db = _det3(ma, t, mc)
        dc = _det3(ma, mb, t)
        sgn = np.sign(det)
        ok = (det != 0) & (da * sgn >= 0) & (db * sgn >= 0) & (dc * sgn >= 0)
        if not ok.any():
            continue
        dd = det[ok].astype(float)
        ga, gb, gc = da[ok] / dd, db[ok] / dd, dc[ok] / dd
        pts = ga[:, None] * tables[a, prices[0]] + gb[:, None] * tables[B[ok], prices[1]] + gc[:, None] * tables[C[ok], prices[2]]
        out.append(pts)
    return np.concatenate(out) if out else np.empty((0, 2))


def containment_report(cloud, polygon, margin: float = MARGIN):
    """(points outside the polygon by more than ``margin``, worst signed distance)."""
    pts = cloud.points if isinstance(cloud, GridCloud) else np.asarray(cloud, dtype=float).reshape(-1, 2)
    verts = getattr(polygon, "vertices", polygon)
    if len(pts) == 0:
        return 0, float("-inf")
    d = planar.signed_distances(pts, np.asarray(verts, dtype=float))
    return int(np.sum(d > margin)), float(d.max())


def hull_distance(cloud: GridCloud, polygon) -> float:
    """Hausdorff distance between the cloud's convex hull and the polygon."""
    verts = getattr(polygon, "vertices", polygon)
    return planar.hausdorff(cloud.hull(), np.asarray(verts, dtype=float))
