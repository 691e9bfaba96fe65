import math

import numpy as np
import pytest

from scatter_topo.signal import Grid

SQRT2 = math.sqrt(2.0)


@pytest.fixture
def small_grid():
    # Nyquist 32, bin width 1/16: large enough for every bank used in unit tests
    return Grid(2 ** 10, 16.0)


@pytest.fixture
def grid():
    return Grid()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# -- independent oracles ----------------------------------------------------

def brute_esupp(freqs, power, eta):
    """Scan symmetric bands outward until (1 - eta) of the energy is inside."""
    order = np.argsort(freqs)
    p = np.asarray(power)[order]
    c = len(p) // 2
    target = (1 - eta) * p.sum()
    df = freqs[order][c + 1] - freqs[order][c]
    for k in range(c + 1):
        if p[max(c - k, 0):c + k + 1].sum() >= target:
            return k * df
    return c * df


def interval_overlap(a, b):
    return max(a[0], b[0]) <= min(a[1], b[1])
