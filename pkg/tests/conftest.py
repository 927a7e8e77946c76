import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from privseg import ValueGrid

settings.register_profile(
    "default",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

EX1_VALUES = [0.8, 2.0, 3.0, 4.2, 5.0]
EX1_AGGREGATES = [
    (0.2, 0.1, 0.4, 0.2, 0.1),
    (0.2, 0.3, 0.2, 0.2, 0.1),
    (0.2, 0.1, 0.1, 0.05, 0.55),
]


@pytest.fixture
def ex1():
    return ValueGrid(EX1_VALUES)


def random_grid(rng, K):
    return ValueGrid(np.cumsum(rng.uniform(0.2, 1.5, K)))


def random_market(rng, K, full_support=True):
    m = rng.dirichlet(np.ones(K))
    if full_support:
        m = 0.9 * m + 0.1 / K
    return m / m.sum()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
