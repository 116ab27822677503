import os
import subprocess
import sys
import textwrap

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kolmo import _accel
from kolmo import _kernels as K

from conftest import analyzed


def _circle(n=81):
    xs = np.linspace(-2, 2, n)
    ys = np.linspace(-1.5, 2.5, n)
    X, Y = np.meshgrid(xs, ys)
    return X * X + (Y - 0.5) ** 2, xs, ys


def test_circle_contour_points_on_circle():
    F, xs, ys = _circle()
    segs = K.marching_squares(F, xs, ys, 1.0)
    pts = np.vstack([segs[:, :2], segs[:, 2:]])
    r = np.hypot(pts[:, 0], pts[:, 1] - 0.5)
    assert len(segs) > 50
    np.testing.assert_allclose(r, 1.0, atol=5e-3)


def test_no_contour_when_level_outside_range():
    F, xs, ys = _circle()
    assert K.marching_squares(F, xs, ys, 100.0).shape == (0, 4)


def test_nan_cells_skipped():
    F, xs, ys = _circle()
    F[:, :40] = np.nan
    segs = K.marching_squares(F, xs, ys, 1.0)
    assert np.all(segs[:, [0, 2]] >= xs[40] - 1e-12)


def test_saddle_cell_disambiguation():
    F = np.array([[1.0, 0.0], [0.0, 1.0]])
    xs = ys = np.array([0.0, 1.0])
    # centre average 0.5 > 0.4: the high corners connect through the middle
    segs = K.marching_squares_numpy(F, xs, ys, 0.4)
    assert len(segs) == 2
    np.testing.assert_allclose(K.marching_squares_loop(F, xs, ys, 0.4, K._CASES), segs)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 25), st.integers(3, 25), st.floats(-1, 1))
def test_loop_and_numpy_paths_agree(seed, ny, nx, level):
    rng = np.random.default_rng(seed)
    F = rng.normal(size=(ny, nx))
    F[rng.random(F.shape) < 0.05] = np.nan
    xs = np.cumsum(rng.uniform(0.1, 1, nx))
    ys = np.cumsum(rng.uniform(0.1, 1, ny))
    a = K.marching_squares_loop(F, xs, ys, level, K._CASES)
    b = K.marching_squares_numpy(F, xs, ys, level)
    np.testing.assert_allclose(a, b, rtol=1e-14, atol=1e-14)


def test_dopri5_rejects_nothing_and_reports_status():
    s = analyzed("pp2").sys
    d = s.domain
    ts, xs, ys, es, n, status = K.dopri5(s.family, s.p, 0.5, 0.5, 1.0, 1e-8, 1e-10, 0.0, 3,
                                         d.x_lo, d.x_hi, d.y_lo, d.y_hi, 0, 0, 0, 0, 0, False)
    assert status == K.MAX_TIME and n <= 4


def test_custom_family_kernel_matches_catalog_kernel():
    import dataclasses
    s = analyzed("pp1").sys
    d = s.domain
    args = (0.01, 0.03, 20.0, 1e-10, 1e-12, 0.0, 100000, d.x_lo, d.x_hi, d.y_lo, d.y_hi, 0, 0, 0, 0, 0, False)
    ref = K.dopri5(s.family, s.p, *args)
    other = K.dopri5(dataclasses.replace(s.family, name="pp1-copy"), s.p, *args)
    assert ref[4] == other[4]
    np.testing.assert_array_equal(ref[1][:ref[4]], other[1][:other[4]])


FALLBACK = textwrap.dedent("""
    import json
    from kolmo import _accel, analysis, flow
    a = analysis.analyze("pp2")
    tr = flow.shoot_heteroclinic(a.sys, a.c, a.interior, L=a.L)
    print(json.dumps({"numba": _accel.HAS_NUMBA, "X": a.bound.X, "n": len(tr), "final": tr.final}))
""")


def _run(disable):
    env = dict(os.environ)
    env.pop("KOLMO_DISABLE_NUMBA", None)
    if disable:
        env["KOLMO_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", FALLBACK], env=env, capture_output=True, text=True, check=True)
    import json
    return json.loads(out.stdout.strip().splitlines()[-1])


@pytest.mark.skipif(not _accel.HAS_NUMBA, reason="numba not installed")
def test_fallback_path_gives_identical_results():
    fast, slow = _run(False), _run(True)
    assert fast["numba"] and not slow["numba"]
    assert fast["X"] == slow["X"]
    assert fast["n"] == slow["n"]
    np.testing.assert_allclose(fast["final"], slow["final"], rtol=1e-12)


def test_maybe_njit_forms():
    f = _accel.maybe_njit(lambda x: x + 1)
    g = _accel.maybe_njit(cache=False)(lambda x: x * 2)
    assert f(1) == 2 and g(2) == 4
