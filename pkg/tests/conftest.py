import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def trapezoid_1d(f, half_width, n=4001):
    """Wide uniform-grid Lebesgue integral for cross-checks."""
    xs = np.linspace(-half_width, half_width, n)
    vals = np.asarray(f(xs[:, None]))
    return np.trapezoid(vals, xs)
