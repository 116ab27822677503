"""Hot loops: the Dormand-Prince 5(4) integrator and marching squares.

Kernels are compiled with numba unless ``KOLMO_DISABLE_NUMBA`` is set, in
which case the identical Python source runs as is. Marching squares also
has a vectorized numpy path that is used when numba is off.
"""
from __future__ import annotations

import types
from functools import lru_cache

import numpy as np

from . import catalog as cat
from ._accel import HAS_NUMBA, maybe_njit

# termination codes
REACHED = 0
MAX_TIME = 1
LEFT_DOMAIN = 2
UNDERFLOW = 3

# Dormand-Prince 5(4) tableau (Hairer, Norsett & Wanner, table 5.2)
C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# fifth-order minus embedded fourth-order weights
E1 = 71.0 / 57600.0
E3 = -71.0 / 16695.0
E4 = 71.0 / 1920.0
E5 = -17253.0 / 339200.0
E6 = 22.0 / 525.0
E7 = -1.0 / 40.0


@lru_cache(maxsize=None)
def make_rhs(family):
    """Compiled ``(fid, x, y, p) -> (g G, h H)`` for a :class:`~kolmo.system.Family`.

    ``fid`` is ignored; it keeps the signature shared with :func:`catalog_rhs`.
    """
    g, G = maybe_njit(family.g), maybe_njit(family.G)
    h, H = maybe_njit(family.h), maybe_njit(family.H)

    @maybe_njit
    def rhs(fid, x, y, p):
        return g(x, p) * G(x, y, p), h(y, p) * H(x, y, p)

    return rhs


def _compiled(fn):
    return maybe_njit(fn)


_cl_g, _cl_G, _cl_h, _cl_H = map(_compiled, (cat.CLASSICAL.g, cat.CLASSICAL.G, cat.CLASSICAL.h, cat.CLASSICAL.H))
_re_H = _compiled(cat.RELATIVISTIC.H)
_p1_H = _compiled(cat.PP1.H)
_p2_H = _compiled(cat.PP2.H)
_p3_g, _p3_G, _p3_h, _p3_H = map(_compiled, (cat.PP3.g, cat.PP3.G, cat.PP3.h, cat.PP3.H))

KERNEL_IDS = {"classical": 0, "relativistic": 1, "pp1": 2, "pp2": 3, "pp3": 4}


@maybe_njit(cache=True)
def catalog_rhs(fid, x, y, p):
    """Vector field of the shipped families, selected by integer id."""
    if fid == 0:
        return _cl_g(x, p) * _cl_G(x, y, p), _cl_h(y, p) * _cl_H(x, y, p)
    if fid == 1:
        return _cl_g(x, p) * _cl_G(x, y, p), _cl_h(y, p) * _re_H(x, y, p)
    if fid == 2:
        return _cl_g(x, p) * _cl_G(x, y, p), _cl_h(y, p) * _p1_H(x, y, p)
    if fid == 3:
        return _cl_g(x, p) * _cl_G(x, y, p), _cl_h(y, p) * _p2_H(x, y, p)
    return _p3_g(x, p) * _p3_G(x, y, p), _p3_h(y, p) * _p3_H(x, y, p)


@maybe_njit
def _grow(a, n):
    out = np.empty(2 * a.shape[0])
    out[:n] = a[:n]
    return out


def _dopri5_py(fid, p, x0, y0, t_end, rtol, atol, h_init, max_steps,
               xlo, xhi, ylo, yhi, tx, ty, kx, ky, qtol, use_target):
    """Adaptive integration of the planar field from ``(x0, y0)`` over ``[0, t_end]``.

    Negative ``t_end`` integrates backward. With ``use_target`` the run stops
    once ``(kx dx^2 + ky dy^2) / 2 <= qtol`` for ``d = state - (tx, ty)``.
    Returns ``(t, x, y, err, n, status)``; the first ``n`` entries are valid.
    """
    sgn = 1.0 if t_end >= 0.0 else -1.0
    span = abs(t_end)
    cap = 1024
    ts = np.empty(cap)
    xs = np.empty(cap)
    ys = np.empty(cap)
    es = np.empty(cap)
    ts[0] = 0.0
    xs[0] = x0
    ys[0] = y0
    es[0] = 0.0
    n = 1

    x, y, tau = x0, y0, 0.0
    if use_target:
        dx, dy = x - tx, y - ty
        if 0.5 * (kx * dx * dx + ky * dy * dy) <= qtol:
            return ts, xs, ys, es, n, REACHED
    if span == 0.0:
        return ts, xs, ys, es, n, MAX_TIME

    k1x, k1y = _rhs(fid, x, y, p)
    k1x *= sgn
    k1y *= sgn
    if h_init > 0.0:
        h = h_init
    else:
        sx = atol + rtol * abs(x)
        sy = atol + rtol * abs(y)
        d0 = np.sqrt(0.5 * ((x / sx) ** 2 + (y / sy) ** 2))
        d1 = np.sqrt(0.5 * ((k1x / sx) ** 2 + (k1y / sy) ** 2))
        if d0 < 1e-5 or d1 < 1e-5:
            h = 1e-6
        else:
            h = 0.01 * d0 / d1
    h = min(h, span)
    hmin = 1e-14 * span
    status = MAX_TIME
    steps = 0
    while tau < span:
        if steps >= max_steps:
            status = MAX_TIME
            break
        steps += 1
        if tau + h > span:
            h = span - tau
        k2x, k2y = _rhs(fid, x + h * A21 * k1x, y + h * A21 * k1y, p)
        k2x *= sgn
        k2y *= sgn
        k3x, k3y = _rhs(fid, x + h * (A31 * k1x + A32 * k2x), y + h * (A31 * k1y + A32 * k2y), p)
        k3x *= sgn
        k3y *= sgn
        k4x, k4y = _rhs(fid, x + h * (A41 * k1x + A42 * k2x + A43 * k3x),
                       y + h * (A41 * k1y + A42 * k2y + A43 * k3y), p)
        k4x *= sgn
        k4y *= sgn
        k5x, k5y = _rhs(fid, x + h * (A51 * k1x + A52 * k2x + A53 * k3x + A54 * k4x),
                       y + h * (A51 * k1y + A52 * k2y + A53 * k3y + A54 * k4y), p)
        k5x *= sgn
        k5y *= sgn
        k6x, k6y = _rhs(fid, x + h * (A61 * k1x + A62 * k2x + A63 * k3x + A64 * k4x + A65 * k5x),
                       y + h * (A61 * k1y + A62 * k2y + A63 * k3y + A64 * k4y + A65 * k5y), p)
        k6x *= sgn
        k6y *= sgn
        xn = x + h * (B1 * k1x + B3 * k3x + B4 * k4x + B5 * k5x + B6 * k6x)
        yn = y + h * (B1 * k1y + B3 * k3y + B4 * k4y + B5 * k5y + B6 * k6y)
        k7x, k7y = _rhs(fid, xn, yn, p)
        k7x *= sgn
        k7y *= sgn
        ex = h * (E1 * k1x + E3 * k3x + E4 * k4x + E5 * k5x + E6 * k6x + E7 * k7x)
        ey = h * (E1 * k1y + E3 * k3y + E4 * k4y + E5 * k5y + E6 * k6y + E7 * k7y)
        sx = atol + rtol * max(abs(x), abs(xn))
        sy = atol + rtol * max(abs(y), abs(yn))
        err = np.sqrt(0.5 * ((ex / sx) ** 2 + (ey / sy) ** 2))
        if not (np.isfinite(err) and np.isfinite(xn) and np.isfinite(yn)):
            h *= 0.2
            if h < hmin:
                status = UNDERFLOW
                break
            continue
        if err <= 1.0:
            tau += h
            x, y = xn, yn
            k1x, k1y = k7x, k7y
            if n == ts.shape[0]:
                ts = _grow(ts, n)
                xs = _grow(xs, n)
                ys = _grow(ys, n)
                es = _grow(es, n)
            ts[n] = sgn * tau
            xs[n] = x
            ys[n] = y
            es[n] = max(abs(ex), abs(ey))
            n += 1
            if x < xlo or x > xhi or y < ylo or y > yhi:
                status = LEFT_DOMAIN
                break
            if use_target:
                dx, dy = x - tx, y - ty
                if 0.5 * (kx * dx * dx + ky * dy * dy) <= qtol:
                    status = REACHED
                    break
            if err == 0.0:
                fac = 5.0
            else:
                fac = min(5.0, max(0.2, 0.9 * err ** -0.2))
            h *= fac
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
            if h < hmin:
                status = UNDERFLOW
                break
    return ts, xs, ys, es, n, status


_rhs = catalog_rhs
dopri5_catalog = maybe_njit(cache=True)(_dopri5_py)


@lru_cache(maxsize=None)
def _dopri5_for(family):
    # same code, with the module global ``_rhs`` rebound to this family's field
    fn = types.FunctionType(_dopri5_py.__code__, {**globals(), "_rhs": make_rhs(family)},
                            "_dopri5_" + family.name)
    return maybe_njit(fn)


def dopri5(family, p, *args):
    """Integrate with the cached catalog kernel when the family has one,
    else with a kernel specialized to ``family``'s functions."""
    p = np.array(p, dtype=np.float64)
    fid = KERNEL_IDS.get(family.name, -1)
    if fid >= 0 and getattr(cat, family.name.upper(), None) is family:
        return dopri5_catalog(fid, p, *args)
    return _dopri5_for(family)(-1, p, *args)


# -- marching squares -----------------------------------------------------------
# For each of the 16 corner-sign cases: up to two segments, each a pair of
# edge ids. Corners: 0=(i,j) 1=(i,j+1) 2=(i+1,j+1) 3=(i+1,j) with i the row
# (y) index and j the column (x) index. Edges: 0 bottom (c0-c1), 1 right
# (c1-c2), 2 top (c2-c3), 3 left (c3-c0). Saddles 5 and 10 are split by the
# cell-centre average.
_CASES = np.array([
    [-1, -1, -1, -1],
    [3, 0, -1, -1],
    [0, 1, -1, -1],
    [3, 1, -1, -1],
    [1, 2, -1, -1],
    [3, 0, 1, 2],     # 5: saddle, resolved below
    [0, 2, -1, -1],
    [3, 2, -1, -1],
    [2, 3, -1, -1],
    [0, 2, -1, -1],
    [0, 1, 2, 3],     # 10: saddle, resolved below
    [1, 2, -1, -1],
    [1, 3, -1, -1],
    [0, 1, -1, -1],
    [3, 0, -1, -1],
    [-1, -1, -1, -1],
], dtype=np.int64)


@maybe_njit
def _edge_point(e, i, j, f0, f1, f2, f3, level, xs, ys):
    if e == 0:
        t = (level - f0) / (f1 - f0)
        return xs[j] + t * (xs[j + 1] - xs[j]), ys[i]
    if e == 1:
        t = (level - f1) / (f2 - f1)
        return xs[j + 1], ys[i] + t * (ys[i + 1] - ys[i])
    if e == 2:
        t = (level - f3) / (f2 - f3)
        return xs[j] + t * (xs[j + 1] - xs[j]), ys[i + 1]
    t = (level - f0) / (f3 - f0)
    return xs[j], ys[i] + t * (ys[i + 1] - ys[i])


@maybe_njit
def marching_squares_loop(F, xs, ys, level, cases):
    """Segments ``(x0, y0, x1, y1)`` of the ``level`` contour of ``F[row, col]``."""
    ny, nx = F.shape
    out = np.empty((2 * (ny - 1) * (nx - 1), 4))
    k = 0
    for i in range(ny - 1):
        for j in range(nx - 1):
            f0, f1, f2, f3 = F[i, j], F[i, j + 1], F[i + 1, j + 1], F[i + 1, j]
            if not (np.isfinite(f0) and np.isfinite(f1) and np.isfinite(f2) and np.isfinite(f3)):
                continue
            code = 0
            if f0 > level:
                code |= 1
            if f1 > level:
                code |= 2
            if f2 > level:
                code |= 4
            if f3 > level:
                code |= 8
            if code == 0 or code == 15:
                continue
            e0, e1, e2, e3 = cases[code, 0], cases[code, 1], cases[code, 2], cases[code, 3]
            if code == 5 or code == 10:
                centre = 0.25 * (f0 + f1 + f2 + f3)
                if (centre > level) == (code == 5):
                    # corners 0 and 2 connected through the centre
                    e0, e1, e2, e3 = 0, 1, 2, 3
                else:
                    e0, e1, e2, e3 = 3, 0, 1, 2
            ax, ay = _edge_point(e0, i, j, f0, f1, f2, f3, level, xs, ys)
            bx, by = _edge_point(e1, i, j, f0, f1, f2, f3, level, xs, ys)
            out[k, 0], out[k, 1], out[k, 2], out[k, 3] = ax, ay, bx, by
            k += 1
            if e2 >= 0:
                ax, ay = _edge_point(e2, i, j, f0, f1, f2, f3, level, xs, ys)
                bx, by = _edge_point(e3, i, j, f0, f1, f2, f3, level, xs, ys)
                out[k, 0], out[k, 1], out[k, 2], out[k, 3] = ax, ay, bx, by
                k += 1
    return out[:k]


def _edge_points_np(e, f0, f1, f2, f3, level, x0, x1, y0, y1):
    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = (level - f0) / (f1 - f0)
        t1 = (level - f1) / (f2 - f1)
        t2 = (level - f3) / (f2 - f3)
        t3 = (level - f0) / (f3 - f0)
    px = np.select([e == 0, e == 1, e == 2], [x0 + t0 * (x1 - x0), x1, x0 + t2 * (x1 - x0)], x0)
    py = np.select([e == 0, e == 1, e == 2], [y0, y0 + t1 * (y1 - y0), y1], y0 + t3 * (y1 - y0))
    return px, py


def marching_squares_numpy(F, xs, ys, level, cases=_CASES):
    """Vectorized equivalent of :func:`marching_squares_loop` (same segment order)."""
    f0, f1 = F[:-1, :-1], F[:-1, 1:]
    f2, f3 = F[1:, 1:], F[1:, :-1]
    code = ((f0 > level) * 1 + (f1 > level) * 2 + (f2 > level) * 4 + (f3 > level) * 8).astype(np.int64)
    finite = np.isfinite(f0) & np.isfinite(f1) & np.isfinite(f2) & np.isfinite(f3)
    active = finite & (code != 0) & (code != 15)
    I, J = np.nonzero(active)
    if I.size == 0:
        return np.empty((0, 4))
    c = code[I, J]
    e = cases[c].copy()
    a0, a1, a2, a3 = f0[I, J], f1[I, J], f2[I, J], f3[I, J]
    sad = (c == 5) | (c == 10)
    centre = 0.25 * (a0 + a1 + a2 + a3)
    joined = sad & ((centre > level) == (c == 5))
    e[joined] = [0, 1, 2, 3]
    e[sad & ~joined] = [3, 0, 1, 2]
    x0, x1 = xs[J], xs[J + 1]
    y0, y1 = ys[I], ys[I + 1]
    ax, ay = _edge_points_np(e[:, 0], a0, a1, a2, a3, level, x0, x1, y0, y1)
    bx, by = _edge_points_np(e[:, 1], a0, a1, a2, a3, level, x0, x1, y0, y1)
    first = np.column_stack([ax, ay, bx, by])
    two = e[:, 2] >= 0
    cx, cy = _edge_points_np(e[:, 2], a0, a1, a2, a3, level, x0, x1, y0, y1)
    dx, dy = _edge_points_np(e[:, 3], a0, a1, a2, a3, level, x0, x1, y0, y1)
    second = np.column_stack([cx, cy, dx, dy])
    # interleave so the order matches the loop kernel
    out = np.empty((I.size + int(two.sum()), 4))
    pos = np.arange(I.size) + np.concatenate([[0], np.cumsum(two)[:-1]])
    out[pos] = first
    out[pos[two] + 1] = second[two]
    return out


def marching_squares(F, xs, ys, level):
    F = np.ascontiguousarray(F, dtype=np.float64)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    if HAS_NUMBA:
        return marching_squares_loop(F, xs, ys, float(level), _CASES)
    return marching_squares_numpy(F, xs, ys, float(level))
