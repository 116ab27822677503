import functools

import numpy as np
import pytest

from kolmo import analysis, catalog

MODELS = ("classical", "relativistic", "pp1", "pp2", "pp3")
BOUNDED = ("classical", "relativistic", "pp1", "pp2")


@functools.lru_cache(maxsize=None)
def analyzed(model):
    return analysis.analyze(model)


@pytest.fixture(params=MODELS)
def model(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rk4(sys, x0, y0, t_end, h):
    """Fixed-step classical Runge-Kutta on arrays of starts; independent oracle."""
    x = np.array(x0, dtype=float)
    y = np.array(y0, dtype=float)
    n = int(round(t_end / h))
    for _ in range(n):
        k1 = sys.rhs(x, y)
        k2 = sys.rhs(x + 0.5 * h * k1[0], y + 0.5 * h * k1[1])
        k3 = sys.rhs(x + 0.5 * h * k2[0], y + 0.5 * h * k2[1])
        k4 = sys.rhs(x + h * k3[0], y + h * k3[1])
        x = x + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y = y + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return x, y


def entry(model, **over):
    return catalog.load_model(model, over or None)
