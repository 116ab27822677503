"""Bracketed scalar root finding: bisection to a narrow bracket, then
safeguarded Newton steps that never leave it."""
from __future__ import annotations

import math

from .errors import NoRoot


def bisect_newton(f, lo, hi, df=None, xtol=1e-8, ftol=1e-13, max_newton=50):
    lo, hi = float(lo), float(hi)
    flo, fhi = float(f(lo)), float(f(hi))
    # an endpoint already within ftol is a root (e.g. the bracket ends on it)
    if abs(flo) <= ftol and abs(flo) <= abs(fhi):
        return lo
    if abs(fhi) <= ftol:
        return hi
    if not (math.isfinite(flo) and math.isfinite(fhi)) or (flo > 0) == (fhi > 0):
        raise NoRoot(f"no sign change on [{lo!r}, {hi!r}]: f = ({flo!r}, {fhi!r})")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = float(f(mid))
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    x = lo if abs(flo) < abs(fhi) else hi
    fx = flo if x == lo else fhi
    for _ in range(max_newton):
        if abs(fx) <= ftol:
            break
        if df is not None:
            d = float(df(x))
        else:
            d = (fhi - flo) / (hi - lo)
        step = fx / d if d != 0.0 and math.isfinite(d) else math.inf
        xn = x - step
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        fn = float(f(xn))
        if (fn > 0) == (flo > 0):
            lo, flo = xn, fn
        else:
            hi, fhi = xn, fn
        if xn == x:
            break
        x, fx = xn, fn
        if hi - lo <= 4 * math.ulp(max(abs(lo), abs(hi))):
            break
    return x
