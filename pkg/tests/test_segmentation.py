import numpy as np
import pytest

from privseg import Market, Segmentation, ValueGrid
from privseg.geometry import first_degree_z, project_polygon, build_polytope, k2_vertices
from privseg.measure import shift_vector
from privseg.model import ccdf
from privseg.pricing import clamped_tstar
from privseg.segmentation import (
    PriceAssignmentError,
    PricedSegmentation,
    build_segmentation,
    first_degree_segmentation,
    k2_expected_utilities,
    merge_to_canonical,
)

from conftest import EX1_AGGREGATES, random_grid, random_market


def test_first_degree_roundtrip(ex1):
    x = EX1_AGGREGATES[0]
    seg = build_segmentation(first_degree_z(x), ex1, x, 0.3)
    assert [i for _, _, i in seg.parts] == [0, 1, 2, 3, 4]
    for (g, m, i), xi in zip(seg.parts, x):
        assert g == pytest.approx(xi)
        assert m.mass[i] == 1.0


def test_row_one_roundtrip(ex1):
    # v1 is the uniform-optimal price here, so pricing everyone at v1 is feasible
    x = np.array([0.7, 0.1, 0.1, 0.05, 0.05])
    z = np.zeros((5, 5))
    z[0] = ccdf(x)
    seg = build_segmentation(z, ex1, x, 0.0)
    assert len(seg) == 1
    assert seg.parts[0][1].mass == pytest.approx(x)


def test_infeasible_z_rejected(ex1):
    x = EX1_AGGREGATES[0]
    with pytest.raises(ValueError):
        build_segmentation(first_degree_z(x), ex1, x, 0.6)


@pytest.mark.parametrize("seed", range(6))
def test_witness_roundtrip(seed):
    rng = np.random.default_rng(100 + seed)
    K = int(rng.integers(2, 5))
    grid = random_grid(rng, K)
    x = random_market(rng, K)
    beta = float(rng.uniform(0, 0.8))
    P = project_polygon(build_polytope(grid, x, beta))
    for v, z in zip(P.vertices, P.witnesses):
        seg = build_segmentation(z, grid, x, beta)
        seg.check_prices(beta, grid)
        assert np.allclose(seg.sprime_point(grid), v, atol=1e-9)
        mix = sum(g * m.mass for g, m, _ in seg.parts)
        assert np.max(np.abs(mix - x)) <= 1e-10


def test_merge_examples(ex1):
    g = ValueGrid([1.0, 2.0])
    agg = Market([0.8, 0.2])
    parts = ((0.5, [0.9, 0.1]), (0.5, [0.7, 0.3]))
    seg = merge_to_canonical(Segmentation(parts, agg), "lowest", 0.0, g)
    assert len(seg) == 1 and seg.parts[0][1].mass == pytest.approx([0.8, 0.2])
    canon = merge_to_canonical(((0.5, [1.0, 0.0]), (0.5, [0.0, 1.0])), "lowest", 0.0, g)
    again = merge_to_canonical([(w, m) for w, m, _ in canon.parts], "lowest", 0.0, g)
    assert [(w, m.mass.tolist(), i) for w, m, i in again.parts] == [(w, m.mass.tolist(), i) for w, m, i in canon.parts]
    with pytest.raises(PriceAssignmentError):
        merge_to_canonical(parts, [1, 1], 0.0, g)


def test_merge_split_at_threshold():
    v1, v2, beta = 0.4, 1.0, 0.2
    t = clamped_tstar(v1 / v2, beta)
    g = ValueGrid([v1, v2])
    for delta in (0.0, 0.3, 1.0):
        seg = merge_to_canonical(((1.0, [1 - t, t]),), delta, beta, g)
        sh = shift_vector(beta, [1 - t, t], g)
        got = seg.surplus_point(g, beta, sh)
        want = k2_expected_utilities(t, delta, v1, v2, beta)
        assert got == pytest.approx(want, abs=1e-12)


def test_k2_expected_examples():
    v1, v2, beta = 0.4, 1.0, 0.2
    t = clamped_tstar(v1 / v2, beta)
    a = 0.2
    assert k2_expected_utilities(a, 0, v1, v2, beta).producer == pytest.approx((1 - beta + beta * t) * v1 + beta * (1 - t) * a * v2)
    assert k2_expected_utilities(0.3, 0, v1, v2, 0.0) == pytest.approx((0.3 * 0.6, 0.4))
    hi = k2_expected_utilities(t + 1e-15, 0, v1, v2, beta)
    assert k2_expected_utilities(t, 1.0, v1, v2, beta) == pytest.approx(hi, abs=1e-12)


def test_k2_decomposition_matches_vertex():
    v1, v2, a, beta = 0.4, 1.0, 0.5, 0.2
    seg = merge_to_canonical(first_degree_segmentation([1 - a, a]), "lowest", beta, ValueGrid([v1, v2]))
    total = sum(g * np.array(k2_expected_utilities(m.mass[1], 0, v1, v2, beta)) for g, m, _ in seg.parts)
    assert total == pytest.approx(k2_vertices(v1, v2, a, beta)["B"], abs=1e-10)


@pytest.mark.parametrize("seed", range(50))
def test_merge_invariance(seed):
    rng = np.random.default_rng(seed)
    K = int(rng.integers(2, 6))
    grid = random_grid(rng, K)
    beta = float(rng.uniform(0, 0.9))
    n = int(rng.integers(1, 8))
    markets = rng.dirichlet(np.ones(K), n)
    w = rng.dirichlet(np.ones(n))
    agg = w @ markets
    agg /= agg.sum()
    seg = Segmentation(tuple(zip(w, markets)), Market(agg))
    policy = ["lowest", "highest", 0.5][seed % 3]
    canon = merge_to_canonical(seg, policy, beta, grid)
    canon.check_prices(beta, grid)
    from privseg.pricing import optimal_price_set
    from privseg.model import utility_table

    before = np.zeros(2)
    for g, m in seg.parts:
        tied = optimal_price_set(m, beta, grid)
        i = tied[0] if policy == "lowest" else tied[-1] if policy == "highest" else None
        row = utility_table(m, grid)
        before += g * (row[i] if i is not None else 0.5 * (row[tied[0]] + row[tied[-1]]))
    assert np.max(np.abs(np.array(canon.sprime_point(grid)) - before)) <= 1e-12
    mix = sum(g * m.mass for g, m, _ in canon.parts)
    assert np.max(np.abs(mix - agg)) <= 1e-12


def test_priced_segmentation_dict_roundtrip(ex1):
    x = EX1_AGGREGATES[0]
    seg = build_segmentation(first_degree_z(x), ex1, x, 0.3)
    back = PricedSegmentation.from_dict(seg.to_dict())
    assert back.to_dict() == seg.to_dict()
    with pytest.raises(ValueError):
        PricedSegmentation(((0.5, Market([1, 0]), 0), (0.5, Market([0, 1]), 0)), Market([0.5, 0.5]))
