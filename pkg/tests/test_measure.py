import numpy as np
import pytest

from privseg import ValueGrid
from privseg.measure import (
    region_probabilities,
    sample_uniform_market,
    sample_uniform_markets,
    shard_rng,
    shift_vector,
)
from privseg.pricing import bar_beta_all


def test_sample_uniform_market():
    rng = shard_rng(0, 0)
    assert sample_uniform_market(rng, 1).mass.tolist() == [1.0]
    m = sample_uniform_markets(shard_rng(1, 0), 1_000_000, 3)
    assert np.allclose(m.sum(axis=1), 1)
    se = m.std(axis=0) / 1000
    assert np.all(np.abs(m.mean(axis=0) - 1 / 3) < 4 * se)
    a = sample_uniform_markets(shard_rng(2, 0), 1_000_000, 2)[:, 1]
    for t in (0.25, 0.5, 0.8):
        p = np.mean(a >= t)
        assert abs(p - (1 - t)) < 4 * np.sqrt(p * (1 - p) / a.size)


def test_exact_regions(ex1):
    assert [e.value for e in region_probabilities(0.3, ValueGrid([1, 2]))] == [0.5, 0.5]
    est = region_probabilities(0.2, ValueGrid([0.6, 1.0]))
    assert [e.value for e in est] == pytest.approx([0.625, 0.375], abs=1e-15)
    assert [e.value for e in region_probabilities(1.0, ex1)] == [0, 0, 1, 0, 0]


def test_mc_regions(ex1):
    est = region_probabilities(0.6, ex1, 200_000, seed=4)
    p = np.array([e.value for e in est])
    assert p.sum() == pytest.approx(1.0, abs=1e-12)
    bb = bar_beta_all(ex1)
    for e, b in zip(est, bb):
        if 0.6 > b:
            assert e.value == 0.0
    again = region_probabilities(0.6, ex1, 200_000, seed=4)
    assert [e.value for e in again] == [e.value for e in est]
    assert [e.std_error for e in again] == [e.std_error for e in est]


def test_k2_exact_vs_mc():
    g = ValueGrid([0.6, 1.0])
    exact = region_probabilities(0.2, g)
    mc = region_probabilities(0.2, g, 1_000_000, seed=9, exact=False)
    for a, b in zip(exact, mc):
        assert abs(a.value - b.value) <= 4 * b.std_error


def test_workers_do_not_change_result(ex1):
    a = region_probabilities(0.3, ex1, 300_000, seed=2, workers=1)
    b = region_probabilities(0.3, ex1, 300_000, seed=2, workers=4)
    assert [e.value for e in a] == [e.value for e in b]


def test_shift_examples():
    g = ValueGrid([0.4, 1.0])
    sh = shift_vector(0.2, [0.5, 0.5], g)
    assert (sh.consumer, sh.producer) == pytest.approx((0.1125, 0.4625))
    sh = shift_vector(0.5, [1.0, 0.0], g)
    assert sh.consumer == 0.0
    eta, a = 0.4, 0.7
    sh = shift_vector(0.0, [1 - a, a], g)
    assert (sh.consumer, sh.producer) == pytest.approx((eta * a * 0.6, eta * 0.4 + (1 - eta) * a))
    d = sh.to_dict()
    assert d["c"] == [sh.consumer, sh.producer]
