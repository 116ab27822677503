import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import lambertw

from kolmo.errors import DomainViolation
from kolmo.specfun import WBranch, lambert_w, lambert_w_array

E = math.e


@pytest.mark.parametrize("branch,x,want", [
    ("principal", 0.0, 0.0),
    ("principal", E, 1.0),
    ("principal", -1 / E, -1.0),
    ("lower", -1 / E, -1.0),
    ("lower", -1.5 * math.exp(-1.5), -1.5),
])
def test_known_values(branch, x, want):
    assert lambert_w(branch, x) == pytest.approx(want, abs=1e-12)


def test_enum_and_string_branches_agree():
    assert lambert_w(WBranch.LOWER, -0.2) == lambert_w("lower", -0.2)


@pytest.mark.parametrize("branch,x", [
    ("principal", -0.5), ("lower", -0.5), ("lower", 0.0), ("lower", 1.0), ("principal", float("nan")),
])
def test_domain_errors(branch, x):
    with pytest.raises(DomainViolation):
        lambert_w(branch, x)


def test_branch_point_edge_tolerance():
    assert lambert_w("principal", -1 / E - 5e-16) == pytest.approx(-1.0, abs=1e-7)


def test_round_trip_lower(rng):
    ys = rng.uniform(-20, -1, 1000)
    ws = lambert_w_array("lower", ys * np.exp(ys))
    # W is ill-conditioned next to the branch point; compare in x = y e^y
    good = ys < -1.001
    np.testing.assert_allclose(ws[good], ys[good], rtol=1e-12)
    np.testing.assert_allclose(ws * np.exp(ws), ys * np.exp(ys), rtol=1e-13, atol=1e-300)


def test_round_trip_principal(rng):
    ys = rng.uniform(-1, 20, 1000)
    ws = lambert_w_array("principal", ys * np.exp(ys))
    good = ys > -0.999
    np.testing.assert_allclose(ws[good], ys[good], rtol=1e-12, atol=1e-300)


@pytest.mark.parametrize("branch,k,lo,hi", [("principal", 0, -1 / E, 50.0), ("lower", -1, -1 / E, -1e-12)])
def test_matches_scipy(branch, k, lo, hi):
    xs = np.linspace(lo, hi, 3001)[1:]
    ours = lambert_w_array(branch, xs)
    ref = lambertw(xs, k).real
    np.testing.assert_allclose(ours, ref, rtol=2e-8)


def test_monotone_branches():
    xs = np.linspace(-1 / E, 10, 5001)[1:]
    assert np.all(np.diff(lambert_w_array("principal", xs)) > 0)
    xs = np.linspace(-1 / E, -1e-6, 5001)[1:]
    assert np.all(np.diff(lambert_w_array("lower", xs)) < 0)


def test_branch_ranges():
    xs = np.linspace(-1 / E, -1e-9, 200)
    assert np.all(lambert_w_array("principal", xs) >= -1)
    assert np.all(lambert_w_array("lower", xs) <= -1)


@settings(max_examples=400, deadline=None)
@given(st.floats(-1 / E, 1e6))
def test_residual_principal(x):
    w = lambert_w("principal", x)
    assert abs(w * math.exp(w) - x) <= 1e-13 * (1 + abs(x))


@settings(max_examples=400, deadline=None)
@given(st.floats(-1 / E, -1e-300))
def test_residual_lower(x):
    w = lambert_w("lower", x)
    assert abs(w * math.exp(w) - x) <= 1e-13 * (1 + abs(x))
