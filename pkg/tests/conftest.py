import numpy as np
import pytest


def match_roots(expected, actual):
    """Greedy nearest pairing of two complex multisets; returns worst gap."""
    pool = list(actual)
    worst = 0.0
    assert len(expected) == len(pool)
    for z in expected:
        j = min(range(len(pool)), key=lambda i: abs(z - pool[i]))
        worst = max(worst, abs(z - pool[j]))
        pool.pop(j)
    return worst


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
