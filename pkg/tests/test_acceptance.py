"""The ten acceptance criteria, one test each.

Every test records a PASS/FAIL line; the lines are printed together at the
end of the module so they also appear in a captured ``pytest -v`` log.
"""
import math
import time

import numpy as np
import pytest

from kolmo import analysis as A
from kolmo import catalog, flow
from kolmo import lyapunov as Ly
from kolmo.linearize import classify, unstable_slope_c
from kolmo.specfun import lambert_w, lambert_w_array
from kolmo.system import jacobian_at, sample_interior

from conftest import BOUNDED, MODELS

RESULTS = {}
TITLES = {
    1: "classical bound",
    2: "predator-prey II bound and Lambert cross-check",
    3: "predator-prey I slope and intersection",
    4: "relativistic bound vs Lambert closed form",
    5: "Lyapunov decrease",
    6: "heteroclinic shooting",
    7: "backward slope",
    8: "predator-prey III classification and refusal",
    9: "Lambert W library",
    10: "closed-form vs quadrature Lyapunov",
}


@pytest.fixture(scope="module", autouse=True)
def report(request):
    yield
    tr = request.config.pluginmanager.get_plugin("terminalreporter")
    lines = [f"{'PASS' if ok else 'FAIL'} criterion {n:>2} ({TITLES[n]}): {detail}"
             for n, (ok, detail) in sorted(RESULTS.items())]
    if tr is not None:
        tr.write_sep("-", "acceptance criteria")
        for ln in lines:
            tr.write_line(ln)
    else:
        print("\n".join(lines))


def record(n, checks):
    """``checks`` is a list of ``(ok, text)``; the criterion passes only if all do."""
    ok = all(c for c, _ in checks)
    RESULTS[n] = (ok, "; ".join(t for _, t in checks))
    assert ok, RESULTS[n][1]


def test_criterion_01_classical_bound():
    t = time.perf_counter()
    a = A.analyze("classical")
    dt = time.perf_counter() - t
    want = 2 + 2 * math.sqrt(2 - math.log(3))
    X = a.bound.X
    record(1, [
        (abs(X - want) <= 1e-8, f"X={X:.12f} vs {want:.12f} (|d|={abs(X - want):.1e})"),
        (a.to_report()["claims"].get("X < 4") is True and X < 4, "X<4 asserted"),
        (dt < 5.0, f"runtime {dt:.2f}s"),
    ])


def test_criterion_02_pp2_bound():
    a = A.analyze("pp2")
    X = a.bound.X
    W = lambert_w("lower", -1.5 * math.exp(-1.5))
    record(2, [
        (abs(X - 1.75) <= 1e-9, f"X={X!r} (|d|={abs(X - 1.75):.1e})"),
        (abs(W + 1.5) <= 1e-12, f"W_-1(-1.5 e^-1.5)={W!r}"),
    ])


def test_criterion_03_pp1_slope_and_v():
    a = A.analyze("pp1")
    c = unstable_slope_c(a.sys)
    res = abs(3 - 7 * a.v ** 2 * (1 + 2 * a.v))
    record(3, [
        (c == 7.0, f"c={c!r}"),
        (res <= 1e-10, f"v={a.v:.12f} residual {res:.1e}"),
    ])


def test_criterion_04_relativistic_bound():
    a = A.analyze("relativistic")
    w = a.interior.x
    X = a.bound.X
    Xc, branch = catalog.relativistic_closed_X()
    d = 16 * math.pi * abs(X - Xc)
    record(4, [
        (w < X < 1 / (8 * math.pi), f"root X={X!r} inside (w, 1/(8 pi))"),
        (d <= 1e-8, f"closed form ({branch} branch) 16 pi X={16 * math.pi * Xc:.12f}, |d|={d:.1e}"),
    ])


def test_criterion_05_lyapunov_decrease():
    rng = np.random.default_rng(5)
    checks = []
    for m in MODELS:
        a = A.analyze(m)
        (x0, x1), (y0, y1) = a.L.domain
        xs, ys = rng.uniform(x0, x1, 1000), rng.uniform(y0, y1, 1000)
        od = Ly.orbital_derivative_array(a.sys, a.L, xs, ys)
        bad = 0
        sx, sy = sample_interior(a.sys, 100, rng, margin=0.01)
        for x, y in zip(sx, sy):
            tr = flow.integrate(a.sys, (x, y), 40.0, 1e-10, 1e-12, L=a.L, strict=False)
            bad += flow.lyapunov_violations(tr, slack=1e-9).size > 0
        checks.append((od.max() <= 1e-12 and bad == 0, f"{m}: max dL/dt={od.max():.1e}, {bad}/100 bad runs"))
    record(5, checks)


def test_criterion_06_shooting():
    checks = []
    t = time.perf_counter()
    for m in BOUNDED:
        a = A.analyze(m)
        eps = 1e-6 if m == "relativistic" else None
        tr = flow.shoot_heteroclinic(a.sys, a.c, a.interior, eps=eps, tol=1e-5, L=a.L)
        dist = float(np.hypot(*(np.array(tr.final) - a.interior.location)))
        checks.append((tr.termination == flow.REACHED and dist <= 1e-5 and tr.max_x <= a.bound.X + 1e-4,
                       f"{m}: dist {dist:.1e}, max x {tr.max_x:.6g} <= X {a.bound.X:.6g}"))
    dt = time.perf_counter() - t
    checks.append((dt < 30.0, f"runtime {dt:.2f}s"))
    record(6, checks)


def test_criterion_07_backward_slope():
    checks = []
    for m in ("pp1", "pp2"):
        a = A.analyze(m)
        tr = flow.shoot_heteroclinic(a.sys, a.c, a.interior, eps=1e-8, L=a.L)
        p = flow.point_at_radius(tr, 0.1 * a.interior.x)
        s = flow.backward_slope(a.sys, p)
        checks.append((abs(s - a.c) <= 1e-3, f"{m}: y/x={s:.7f} vs c={a.c:g}"))
    record(7, checks)


def test_criterion_08_pp3():
    checks = []
    for alpha, want in ((1.0, "stable-spiral"), (10.0, "stable-node")):
        e = catalog.load_model("pp3", {"alpha": alpha})
        J = jacobian_at(e.system, e.equilibrium_guess)
        tr, det = float(np.trace(J)), float(np.linalg.det(J))
        disc = tr * tr - 4 * det
        got = classify(J).classification
        side = disc < 0 if want == "stable-spiral" else disc > 0
        checks.append((side and got == want, f"alpha={alpha:g}: tr^2-4det={disc:+.3f}, {got}"))
    a = A.analyze("pp3")
    fails = {f["name"]: f for f in (a.refusal or {}).get("failures", [])}
    g00 = fails.get("G(0,0)=0")
    checks.append((a.bound is None and g00 is not None and g00["witness"][2] != 0,
                   f"refused: {g00['detail'] if g00 else 'no G(0,0) failure'}"))
    record(8, checks)


def test_criterion_09_lambert():
    rng = np.random.default_rng(9)
    x0 = rng.uniform(-1 / math.e, 50, 1000)
    x1 = rng.uniform(-1 / math.e, -1e-300, 1000)
    worst = 0.0
    for branch, xs in (("principal", x0), ("lower", x1)):
        w = lambert_w_array(branch, xs)
        worst = max(worst, float(np.max(np.abs(w * np.exp(w) - xs) / np.maximum(np.abs(xs), 1e-300))))
    b0, b1 = lambert_w("principal", -1 / math.e), lambert_w("lower", -1 / math.e)
    record(9, [
        (worst <= 1e-12, f"2000 round trips, worst rel residual {worst:.1e}"),
        (abs(b0 + 1) <= 1e-7 and abs(b1 + 1) <= 1e-7, f"W(-1/e)={b0!r}, {b1!r}"),
    ])


def test_criterion_10_closed_forms():
    checks = []
    for m in BOUNDED:
        a = A.analyze(m)
        cf = a.entry.closed_forms
        (x0, x1), (y0, y1) = a.L.domain
        xs = np.linspace(x0, x1, 2001)
        ys = np.linspace(max(y0, 1e-3), y1, 2001)
        err = max(float(np.max(np.abs(a.L.H(xs) - cf.H(xs)))), float(np.max(np.abs(a.L.G(ys) - cf.G(ys)))))
        checks.append((err <= 1e-8, f"{m}: {err:.1e}"))
    record(10, checks)
