import math

import numpy as np
import pytest
from scipy.integrate import quad

from kolmo.errors import OutOfTable, QuadratureFailure
from kolmo.quadrature import HermiteTable, antiderivative_table, gk15


def test_gk15_exact_for_polynomials():
    for deg in range(0, 22):
        k, _, _, ok = gk15(lambda x: x ** deg, 0.0, 1.0)
        assert ok[0]
        assert k[0] == pytest.approx(1 / (deg + 1), rel=1e-14)


def test_gk15_gauss_part_exact_to_degree_13():
    for deg in range(0, 14):
        _, err, _, _ = gk15(lambda x: x ** deg, -1.0, 2.0)
        assert err[0] <= 1e-13


def test_table_matches_closed_form_antiderivative():
    t = antiderivative_table(np.cos, 0.0, 6.0, 1.0)
    xs = np.linspace(0.0, 6.0, 997)
    np.testing.assert_allclose(t(xs), np.sin(xs) - math.sin(1.0), atol=1e-11)
    np.testing.assert_allclose(t.derivative(xs), np.cos(xs), atol=1e-7)
    assert t(1.0) == 0.0


def test_log_singular_integrand_against_scipy():
    f = lambda y: (2.0 - y) / y  # noqa: E731
    t = antiderivative_table(f, 1e-6, 5.0, 2.0)
    for y in (1e-6, 1e-3, 0.5, 3.0, 5.0):
        ref, _ = quad(f, 2.0, y, epsabs=1e-13, epsrel=1e-13, limit=200)
        assert float(t(y)) == pytest.approx(ref, abs=1e-9)


def test_anchor_outside_interval_extends_table():
    t = antiderivative_table(lambda x: 2 * x, 2.0, 3.0, 0.0)
    assert t.lo == 0.0 and t.hi == 3.0
    assert float(t(3.0)) == pytest.approx(9.0, rel=1e-14)


def test_degenerate_interval():
    t = antiderivative_table(lambda x: x, 1.0, 1.0, 1.0)
    assert len(t) == 1
    assert float(t(1.0)) == 0.0


def test_out_of_table():
    t = antiderivative_table(np.exp, 0.0, 1.0, 0.0)
    with pytest.raises(OutOfTable):
        t(1.5)
    with pytest.raises(OutOfTable):
        t.derivative(np.array([0.5, -0.1]))


def test_nonintegrable_singularity_fails():
    with pytest.raises(QuadratureFailure), np.errstate(divide="ignore"):
        antiderivative_table(lambda x: 1.0 / (x - 0.5) ** 2, 0.0, 1.0, 0.0)


def test_hermite_reproduces_cubics():
    x = np.array([0.0, 0.7, 2.0])
    F, dF = x ** 3 - x, 3 * x ** 2 - 1
    t = HermiteTable(x, F, dF, 0.0)
    u = np.linspace(0, 2, 41)
    np.testing.assert_allclose(t(u), u ** 3 - u, atol=1e-14)
    np.testing.assert_allclose(t.derivative(u), 3 * u ** 2 - 1, atol=1e-13)


def test_tables_are_read_only():
    t = antiderivative_table(np.exp, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        t.F[0] = 1.0
