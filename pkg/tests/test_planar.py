import numpy as np
import pytest
from hypothesis import given, strategies as st

from privseg.planar import boundary_distance, contains, convex_hull, hausdorff, signed_distance, signed_distances

pts = st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=1, max_size=30)


def test_hull_square_with_interior():
    p = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5), (0.5, 0), (1, 1 + 1e-12)]
    h = convex_hull(p)
    assert np.allclose(h, [[0, 0], [1, 0], [1, 1], [0, 1]], atol=1e-11)


def test_degenerate_hulls():
    assert convex_hull([(1, 1), (1, 1 + 1e-12)]).shape == (1, 2)
    h = convex_hull([(0, 0), (1, 1), (2, 2), (0.5, 0.5)])
    assert h.tolist() == [[0, 0], [2, 2]]
    assert convex_hull(np.empty((0, 2))).shape == (0, 2)


def test_distances():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
    assert signed_distance((0.5, 0.5), sq) == pytest.approx(-0.5)
    assert signed_distance((2, 0.5), sq) == pytest.approx(1.0)
    assert boundary_distance((0.5, 0.9), sq) == pytest.approx(0.1)
    assert contains((1 + 1e-9, 0.5), sq)
    assert not contains((1 + 1e-6, 0.5), sq)
    assert hausdorff(sq, sq) == 0
    assert hausdorff(sq, sq * 2) == pytest.approx(np.sqrt(2))
    seg = np.array([[0, 0], [2, 0]], float)
    assert signed_distance((1, 1), seg) == pytest.approx(1)
    assert signed_distance((3, 0), np.array([[0, 0]], float)) == 3


@given(pts, st.tuples(st.floats(-6, 6), st.floats(-6, 6)))
def test_hull_properties(p, q):
    h = convex_hull(p)
    arr = np.array(p, float)
    # every input point is inside or on the hull
    assert np.all(signed_distances(arr, h) <= 1e-7)
    if len(h) >= 3:
        n = len(h)
        cross = [
            (h[(k + 1) % n][0] - h[k][0]) * (h[(k + 2) % n][1] - h[k][1])
            - (h[(k + 1) % n][1] - h[k][1]) * (h[(k + 2) % n][0] - h[k][0])
            for k in range(n)
        ]
        assert min(cross) > 0
    assert tuple(h[0]) == min(map(tuple, h))
    assert signed_distances([q], h)[0] == pytest.approx(signed_distance(q, h), abs=1e-12)
