import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kolmo import linearize as lin
from kolmo.errors import DivisionByZero
from kolmo.system import find_equilibrium, jacobian_at

from conftest import entry


def test_identity_is_boundary_unstable_node():
    r = lin.classify(np.eye(2))
    assert (r.trace, r.determinant, r.discriminant) == (2.0, 1.0, 0.0)
    assert r.classification == "unstable-node"
    assert r.boundary


@pytest.mark.parametrize("J,cls", [
    ([[1, 0], [0, -1]], "saddle"),
    ([[-1, 0], [0, -2]], "stable-node"),
    ([[-1, 2], [-2, -1]], "stable-spiral"),
    ([[1, 0], [0, 3]], "unstable-node"),
    ([[1, 2], [-2, 1]], "unstable-spiral"),
    ([[0, 1], [-1, 0]], "center-degenerate"),
    ([[1, 1], [1, 1]], "center-degenerate"),
])
def test_sign_table(J, cls):
    assert lin.classify(J).classification == cls


def test_pp3_stable_at_interior():
    for alpha in (1.0, 10.0):
        e = entry("pp3", alpha=alpha)
        s = e.system
        m = s.params["m"]
        g, d = s.params["gamma"], s.params["delta"]
        r = lin.classify(jacobian_at(s, e.equilibrium_guess))
        assert r.trace == pytest.approx(-alpha * g / (m * d))
        assert r.determinant == pytest.approx(alpha * g * (1 - g / (m * d)))
        assert lin.is_stable(r)


@pytest.mark.parametrize("m", ["classical", "relativistic", "pp1", "pp2"])
def test_origin_is_saddle(m):
    s = entry(m).system
    J = jacobian_at(s, (0.0, 0.0))
    r = lin.classify(J)
    assert r.classification == "saddle"
    want = s.g(0.0) * s.dh(0.0) * s.G_x(0.0, 0.0) * s.H(0.0, 0.0)
    assert r.determinant == pytest.approx(want)


@pytest.mark.parametrize("m", ["classical", "pp1", "pp2"])
def test_interior_stable_with_sign_conditions(m):
    e = entry(m)
    s = e.system
    eq = find_equilibrium(s, e.equilibrium_guess)
    w, z = eq.location
    assert s.G_x(w, z) < 0 and s.H_x(w, z) < 0 and s.G_y(w, z) > 0 and s.H_y(w, z) <= 0
    assert lin.is_stable(eq.report)


@pytest.mark.parametrize("m,c", [("pp1", 7.0), ("pp2", 3.0), ("relativistic", 3.0), ("classical", 3.0)])
def test_unstable_slope(m, c):
    assert lin.unstable_slope_c(entry(m).system) == c


def test_unstable_slope_division_by_zero():
    with pytest.raises(DivisionByZero):
        lin.unstable_slope_c(entry("pp3").system)


def test_report_json_shape():
    d = lin.classify([[-1, 2], [-2, -1]]).to_dict()
    assert d["classification"] == "stable-spiral"
    assert d["eigenvalues"] == [[-1.0, 2.0], [-1.0, -2.0]]


# decimal grid: hits exact zeros and node/spiral ties, avoids subnormal products
finite = st.integers(-10**6, 10**6).map(lambda k: k / 1000)


@settings(max_examples=300, deadline=None)
@given(st.lists(finite, min_size=4, max_size=4))
def test_eigen_residual_property(vals):
    r = lin.classify(np.reshape(vals, (2, 2)))
    assert lin.eigen_residual(r) <= 1e-12


def test_eigen_residual_random_matrices(rng):
    for J in rng.normal(scale=10, size=(1000, 2, 2)):
        r = lin.classify(J)
        assert lin.eigen_residual(r) <= 1e-12
        ev = np.sort_complex(np.linalg.eigvals(J))
        np.testing.assert_allclose(np.sort_complex(np.array(r.eigenvalues)), ev, atol=1e-9 * (1 + abs(ev).max()))


def test_classification_consistent_with_signs(rng):
    for J in rng.normal(size=(500, 2, 2)):
        r = lin.classify(J)
        if r.determinant < -1e-9:
            assert r.classification == "saddle"
        elif r.determinant > 1e-9 and abs(r.trace) > 1e-9 and abs(r.discriminant) > 1e-9:
            side = "stable" if r.trace < 0 else "unstable"
            kind = "spiral" if r.discriminant < 0 else "node"
            assert r.classification == f"{side}-{kind}"
