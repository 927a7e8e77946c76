"""Small 2-D convex-polygon toolkit (hull, containment, distances)."""

import numpy as np

DEDUP_TOL = 1e-9


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points, tol: float = DEDUP_TOL) -> np.ndarray:
    """Counter-clockwise hull starting at the lexicographically smallest vertex.

    Points within ``tol`` of each other are merged and vertices within
    ``tol`` of the line through their neighbours are pruned. Degenerate
    inputs give one or two vertices.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    uniq = []
    for p in pts:
        # sorted by x, so only trailing kept points can be within tol
        k = len(uniq) - 1
        dup = False
        while k >= 0 and p[0] - uniq[k][0] <= tol:
            if np.hypot(*(p - uniq[k])) <= tol:
                dup = True
                break
            k -= 1
        if not dup:
            uniq.append(p)
    pts = np.array(uniq)
    if len(pts) <= 2:
        return pts

    def build(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2:
                o, a = chain[-2], chain[-1]
                base = np.hypot(*(p - o))
                if _cross(o, a, p) <= tol * max(base, tol):
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = build(pts)
    upper = build(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 2:
        # everything collinear: keep the two extremes
        return np.array([pts[0], pts[-1]])
    return hull


def _segment_distance(p, a, b):
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.hypot(*(p - a)))
    t = min(max(float((p - a) @ ab) / denom, 0.0), 1.0)
    return float(np.hypot(*(p - (a + t * ab))))


def boundary_distance(p, verts) -> float:
    p = np.asarray(p, dtype=float)
    n = len(verts)
    if n == 1:
        return float(np.hypot(*(p - verts[0])))
    return min(_segment_distance(p, verts[k], verts[(k + 1) % n]) for k in range(n))


def signed_distance(p, verts) -> float:
    """Distance to a convex CCW polygon, negative inside."""
    p = np.asarray(p, dtype=float)
    d = boundary_distance(p, verts)
    if len(verts) < 3:
        return d
    n = len(verts)
    inside = all(_cross(verts[k], verts[(k + 1) % n], p) >= 0 for k in range(n))
    return -d if inside else d


def signed_distances(points, verts) -> np.ndarray:
    """Vectorized ``signed_distance`` for many points."""
    P = np.asarray(points, dtype=float).reshape(-1, 2)
    V = np.asarray(verts, dtype=float)
    if len(P) == 0:
        return np.empty(0)
    n = len(V)
    if n == 1:
        return np.hypot(*(P - V[0]).T)
    A = V
    B = np.roll(V, -1, axis=0) if n > 2 else V[[1]]
    A = A if n > 2 else V[[0]]
    ab = B - A
    ap = P[:, None, :] - A[None, :, :]
    denom = np.einsum("ij,ij->i", ab, ab)
    t = np.clip(np.einsum("pij,ij->pi", ap, ab) / np.where(denom > 0, denom, 1.0), 0.0, 1.0)
    closest = A[None] + t[..., None] * ab[None]
    d = np.hypot(*(P[:, None, :] - closest).transpose(2, 0, 1)).min(axis=1)
    if n < 3:
        return d
    cross = ab[None, :, 0] * ap[..., 1] - ab[None, :, 1] * ap[..., 0]
    inside = np.all(cross >= 0, axis=1)
    return np.where(inside, -d, d)


def contains(p, verts, tol: float = 1e-8) -> bool:
    return signed_distance(p, verts) <= tol


def hausdorff(va, vb) -> float:
    """Hausdorff distance between two convex polygons (as filled regions)."""
    da = np.maximum(signed_distances(va, vb), 0.0).max()
    db = np.maximum(signed_distances(vb, va), 0.0).max()
    return float(max(da, db))
