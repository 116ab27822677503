"""Isoclines, the ray intersection ``v`` and the heteroclinic bound ``X``.

``X`` is the right-hand solution of ``L(X, z) = L(w, c v)``, i.e. the
root of ``Hc(X) = Gc(c v)`` on the stretch ``(w, delta)`` where ``Hc`` is
increasing.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from .errors import HypothesisViolated, NoRoot, NoRootInInterval
from .roots import bisect_newton

log = logging.getLogger(__name__)

STRICT_TOL = 1e-12


# -- isoclines and v ----------------------------------------------------------
def isocline_x_plus(sys, y, w):
    """``x`` in ``[x_lo, w]`` with ``G(x, y) = 0``."""
    y = float(y)
    return bisect_newton(
        lambda x: sys.G(x, y), sys.domain.x_lo, w,
        df=lambda x: sys.G_x(x, y), xtol=1e-10, ftol=1e-14,
    )


def _bracket_x(sys, f, lo, hi):
    d = sys.domain
    lo, hi = max(d.x_lo, lo), min(d.x_hi, hi)
    try:
        if (f(lo) > 0) != (f(hi) > 0) or f(lo) == 0 or f(hi) == 0:
            return lo, hi
    except (FloatingPointError, ZeroDivisionError):
        pass
    return d.x_lo, d.x_hi


def isocline_x_minus(sys, y, v, w):
    """``x`` near ``[v, w]`` with ``H(x, y) = 0``."""
    y = float(y)
    margin = 0.25 * (w - v) + 0.05 * w
    f = lambda x: float(sys.H(x, y))  # noqa: E731
    lo, hi = _bracket_x(sys, f, v - margin, w + margin)
    return bisect_newton(f, lo, hi, df=lambda x: sys.H_x(x, y), xtol=1e-10, ftol=1e-14)


def solve_v(sys, c, w):
    """``v`` in ``(0, w]`` with ``H(v, c v) = 0``."""
    if not c > 0:
        raise NoRoot(f"slope c must be positive, got {c!r}")
    return bisect_newton(
        lambda s: sys.H(s, c * s), sys.domain.x_lo, w,
        df=lambda s: sys.H_x(s, c * s) + c * sys.H_y(s, c * s),
        xtol=1e-10, ftol=1e-14,
    )


# -- hypothesis report --------------------------------------------------------
@dataclass
class Check:
    name: str
    passed: bool
    witness: Optional[tuple] = None  # (x, y, value) at the worst violation
    detail: str = ""
    informational: bool = False


@dataclass
class HypothesisReport:
    monotonicity: list = field(default_factory=list)
    stationary: list = field(default_factory=list)
    unstable_tangent: list = field(default_factory=list)
    derivative_sign: list = field(default_factory=list)
    isoclines: list = field(default_factory=list)

    GROUPS = ("monotonicity", "stationary", "unstable_tangent", "derivative_sign", "isoclines")

    def checks(self):
        for g in self.GROUPS:
            yield from getattr(self, g)

    @property
    def all_pass(self):
        return all(c.passed for c in self.checks() if not c.informational)

    def failures(self):
        return [c for c in self.checks() if not c.passed and not c.informational]

    def to_dict(self):
        out = {g: [asdict(c) for c in getattr(self, g)] for g in self.GROUPS}
        out["all_pass"] = self.all_pass
        return out


def _worst(name, X, Y, vals, ok, detail="", informational=False):
    vals = np.broadcast_to(np.asarray(vals, dtype=float), np.shape(X))
    ok = np.broadcast_to(ok, np.shape(X))
    if np.all(ok):
        return Check(name, True, None, detail, informational)
    bad = np.flatnonzero(~np.ravel(ok))
    flat = np.ravel(vals)
    i = bad[np.argmax(np.abs(flat[bad]))]
    return Check(name, False, (float(np.ravel(X)[i]), float(np.ravel(Y)[i]), float(flat[i])),
                 detail, informational)


def _sign_check(name, X, Y, vals, rel, informational=False, detail=""):
    vals = np.broadcast_to(np.asarray(vals, dtype=float), np.shape(X))
    ok = {
        "<0": vals < -STRICT_TOL,
        ">0": vals > STRICT_TOL,
        "<=0": vals <= STRICT_TOL,
        ">=0": vals >= -STRICT_TOL,
    }[rel]
    return _worst(f"{name} {rel}", X, Y, vals, ok, detail, informational)


def detect_delta(L):
    """Right end of the stretch right of ``w`` where ``Hc' > 0``.

    Scans with step ``width / 1e4``, then bisects the first sign change;
    falls back to the table end.
    """
    w = L.anchors[0]
    hi = L.H_comp.hi
    if hi <= w:
        return hi
    xs = np.linspace(w, hi, 10_001)[1:]
    d = np.asarray(L.dH(xs))
    bad = np.flatnonzero(~(d > 0))
    if bad.size == 0:
        return hi
    j = bad[0]
    a = w if j == 0 else xs[j - 1]
    return bisect_newton(lambda x: float(L.dH(x)), a, xs[j], xtol=1e-14)


def check_hypotheses(sys, L, c, v, grid=200, ray_n=500) -> HypothesisReport:
    """Sample every hypothesis of the bound on a grid; failures are data."""
    w, z = L.anchors
    d = sys.domain
    rep = HypothesisReport()

    xs = np.linspace(d.x_lo, d.x_hi, grid)
    ys = np.linspace(d.y_lo, d.y_hi, grid)
    X, Y = np.meshgrid(xs, ys)
    Gx, Gy = sys.G_x(X, Y), sys.G_y(X, Y)
    Hx, Hy = sys.H_x(X, Y), sys.H_y(X, Y)
    rep.monotonicity += [
        _sign_check("G_x", X, Y, Gx, "<0"),
        _sign_check("H_x", X, Y, Hx, "<0"),
        _sign_check("G_y", X, Y, Gy, ">0", detail="reading consistent with the linearization signs"),
        _sign_check("H_y", X, Y, Hy, "<=0", detail="reading consistent with the linearization signs"),
        _sign_check("G_y", X, Y, Gy, "<0", informational=True, detail="reading as printed in the bound statement"),
        _sign_check("H_y", X, Y, Hy, ">=0", informational=True, detail="reading as printed in the bound statement"),
    ]

    def zero_check(name, x, y, val):
        ok = bool(abs(val) <= STRICT_TOL)
        lhs = name.split("=")[0]
        return Check(name, ok, None if ok else (x, y, float(val)), "" if ok else f"{lhs} = {float(val)!r} != 0")

    rep.stationary += [
        zero_check("h(0)=0", 0.0, 0.0, sys.h(0.0)),
        zero_check("H(w,z)=0", w, z, sys.H(w, z)),
        zero_check("G(0,0)=0", 0.0, 0.0, sys.G(0.0, 0.0)),
        zero_check("G(w,z)=0", w, z, sys.G(w, z)),
    ]
    xp, yp = xs[xs > d.x_lo], ys[ys > d.y_lo]
    rep.stationary += [
        _sign_check("g", xp, np.zeros_like(xp), sys.g(xp), ">0"),
        _sign_check("h", np.zeros_like(yp), yp, sys.h(yp), ">0"),
    ]

    if c is None or v is None or not np.isfinite(c) or not np.isfinite(v):
        why = "unstable slope c or intersection v undefined"
        for grp, name in (("unstable_tangent", "hH <= c g G on y=cx"),
                          ("derivative_sign", "Hc' > 0 on (w, cv)"),
                          ("isoclines", "x+ / x- isoclines")):
            getattr(rep, grp).append(Check(name, False, (0.0, 0.0, float("nan")), why))
        return rep

    cv = c * v
    # ray segment from the origin to (v, cv)
    rx = np.linspace(0.0, v, ray_n + 1)[1:]
    ry = c * rx
    gap = sys.h(ry) * sys.H(rx, ry) - c * sys.g(rx) * sys.G(rx, ry)
    scale = 1.0 + np.abs(sys.h(ry) * sys.H(rx, ry))
    rep.unstable_tangent.append(
        _worst("hH <= c g G on y=cx", rx, ry, gap, gap <= STRICT_TOL * scale,
               detail=f"x in (0, v], c={c:.17g}")
    )

    delta = detect_delta(L)
    b = min(cv, delta)
    if b < cv:
        log.info("derivative-sign check truncated to (w, %g) < cv = %g", b, cv)
    dx = np.linspace(w, b, ray_n + 2)[1:-1]
    rep.derivative_sign.append(
        _sign_check("Hc'", dx, np.full_like(dx, z), L.dH(dx), ">0",
                    detail=f"x in (w, {b:.17g}); cv={cv:.17g}, delta={delta:.17g}")
    )

    yp = np.linspace(d.y_lo, z, 201)
    try:
        xpl = np.array([isocline_x_plus(sys, yy, w) for yy in yp])
        inc = np.diff(xpl) > 0
        inside = (xpl >= d.x_lo - 1e-10) & (xpl <= w + 1e-10)
        rep.isoclines.append(_worst("x+ strictly increasing on [0,z]", xpl[1:], yp[1:], np.diff(xpl), inc))
        rep.isoclines.append(_worst("x+ maps into [0,w]", xpl, yp, xpl, inside))
    except NoRoot as e:
        rep.isoclines.append(Check("x+ exists on [0,z]", False, (float("nan"), float("nan"), float("nan")), str(e)))

    ym = np.linspace(z, cv, 201)
    try:
        xmi = np.array([isocline_x_minus(sys, yy, v, w) for yy in ym])
        tol = 1e-9 * max(1.0, abs(w))
        noninc = np.diff(xmi) <= tol
        inside = (xmi >= v - tol) & (xmi <= w + tol)
        rep.isoclines.append(_worst("x- nonincreasing on [z,cv]", xmi[1:], ym[1:], np.diff(xmi), noninc))
        rep.isoclines.append(_worst("x- maps into [v,w]", xmi, ym, xmi, inside))
    except NoRoot as e:
        rep.isoclines.append(Check("x- exists on [z,cv]", False, (float("nan"), float("nan"), float("nan")), str(e)))
    return rep


# -- the bound ----------------------------------------------------------------
@dataclass
class BoundResult:
    c: float
    v: float
    cv: float
    X: float
    level_value: float
    delta: float
    closed_form_X: Optional[float] = None

    def to_dict(self):
        return asdict(self)


def heteroclinic_bound(sys, L, c, v, report: Optional[HypothesisReport] = None,
                       closed_form_X: Optional[float] = None) -> BoundResult:
    if report is not None and not report.all_pass:
        names = ", ".join(ch.name for ch in report.failures())
        raise HypothesisViolated(f"hypotheses failed: {names}", report)
    w, z = L.anchors
    cv = c * v
    level = float(L.G(cv))
    delta = detect_delta(L)
    top = float(L.H(delta))
    if top < level:
        raise NoRootInInterval(
            f"level Gc(cv)={level:.17g} exceeds sup Hc={top:.17g} on (w, delta={delta:.17g})"
        )
    X = bisect_newton(lambda x: float(L.H(x)) - level, w, delta,
                      df=lambda x: float(L.H_comp.derivative(x)), xtol=1e-8, ftol=1e-14)
    return BoundResult(float(c), float(v), float(cv), float(X), level, float(delta), closed_form_X)


def trapping_samples(sys, L, c, v, n=1000):
    """Points on the ray segment ``(0,0)-(v,cv)`` and on the ``x-`` arc
    ``y in [z, cv]``, with ``L`` at each (NaN outside the tables)."""
    w, z = L.anchors
    rx = np.linspace(0.0, v, n + 1)[1:]
    ry = c * rx
    ym = np.linspace(z, c * v, n)
    xm = np.array([isocline_x_minus(sys, yy, v, w) for yy in ym])
    px = np.concatenate([rx, xm])
    py = np.concatenate([ry, ym])
    return px, py, L.values_or_nan(px, py)
