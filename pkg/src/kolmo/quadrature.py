"""Adaptive Gauss-Kronrod antiderivative tables.

:func:`antiderivative_table` tabulates ``F(x) = int_anchor^x f`` on an
interval. Panels are bisected until the Kronrod-Gauss difference and the
cubic-Hermite midpoint defect are both below tolerance, so the returned
:class:`HermiteTable` can be evaluated anywhere in the interval with
interpolation error well below ``interp_tol``.
"""
from __future__ import annotations

import numpy as np

from .errors import OutOfTable, QuadratureFailure

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_EPS = np.finfo(float).eps
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])          # 15 nodes, ascending
_WK15 = np.concatenate([_WK[:-1], _WK[::-1]])
_WG7 = np.zeros(15)
_WG7[1:7:2] = _WG[:3]
_WG7[7] = _WG[3]
_WG7[9:14:2] = _WG[2::-1]


def gk15(f, a, b):
    """Integrals of ``f`` over panels ``[a_i, b_i]``.

    Returns ``(K15, |K15 - G7|, K15 of |f|, all-finite mask)``.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    c = 0.5 * (a + b)
    r = 0.5 * (b - a)
    x = c[:, None] + r[:, None] * _NODES[None, :]
    fx = np.asarray(f(x), dtype=float)
    fx = np.broadcast_to(fx, x.shape)
    k = r * (fx @ _WK15)
    g = r * (fx @ _WG7)
    return k, np.abs(k - g), r * (np.abs(fx) @ _WK15), np.all(np.isfinite(fx), axis=1)


class HermiteTable:
    """Piecewise cubic Hermite interpolant through ``(x_i, F_i, f_i)``."""

    def __init__(self, x, F, dF, anchor):
        self.x = np.asarray(x, dtype=float)
        self.F = np.asarray(F, dtype=float)
        self.dF = np.asarray(dF, dtype=float)
        self.anchor = float(anchor)
        for arr in (self.x, self.F, self.dF):
            arr.setflags(write=False)

    @property
    def lo(self):
        return self.x[0]

    @property
    def hi(self):
        return self.x[-1]

    def __len__(self):
        return len(self.x)

    def contains(self, u):
        return (u >= self.x[0]) & (u <= self.x[-1])

    def _locate(self, u):
        u = np.asarray(u, dtype=float)
        if not np.all(self.contains(u)):
            bad = u[~self.contains(u)] if u.ndim else u
            raise OutOfTable(
                f"{np.ravel(bad)[0]!r} outside tabulated range [{self.lo}, {self.hi}]"
            )
        if len(self.x) == 1:
            return u, None
        i = np.clip(np.searchsorted(self.x, u, side="right") - 1, 0, len(self.x) - 2)
        return u, i

    def __call__(self, u):
        u, i = self._locate(u)
        if i is None:
            return np.zeros_like(u) + self.F[0]
        x0, x1 = self.x[i], self.x[i + 1]
        hw = x1 - x0
        t = (u - x0) / hw
        t2, t3 = t * t, t * t * t
        h00 = 2 * t3 - 3 * t2 + 1
        h10 = t3 - 2 * t2 + t
        h01 = -2 * t3 + 3 * t2
        h11 = t3 - t2
        return (h00 * self.F[i] + h10 * hw * self.dF[i]
                + h01 * self.F[i + 1] + h11 * hw * self.dF[i + 1])

    def derivative(self, u):
        u, i = self._locate(u)
        if i is None:
            return np.zeros_like(u) + self.dF[0]
        x0, x1 = self.x[i], self.x[i + 1]
        hw = x1 - x0
        t = (u - x0) / hw
        t2 = t * t
        return ((6 * t2 - 6 * t) * (self.F[i] - self.F[i + 1]) / hw
                + (3 * t2 - 4 * t + 1) * self.dF[i] + (3 * t2 - 2 * t) * self.dF[i + 1])


def _refine(f, lo, hi, total, quad_tol, interp_tol, n_init, max_panels):
    """Accepted panels ``(left, right, integral)`` covering ``[lo, hi]``."""
    if hi <= lo:
        return np.empty(0), np.empty(0), np.empty(0)
    edges = np.linspace(lo, hi, n_init + 1)
    pend_a, pend_b = edges[:-1], edges[1:]
    out_a, out_b, out_I = [], [], []
    count = 0
    while pend_a.size:
        I, err, absI, ok = gk15(f, pend_a, pend_b)
        m = 0.5 * (pend_a + pend_b)
        I_left, _, _, ok_l = gk15(f, pend_a, m)
        fa = np.broadcast_to(np.asarray(f(pend_a), dtype=float), pend_a.shape)
        fb = np.broadcast_to(np.asarray(f(pend_b), dtype=float), pend_b.shape)
        width = pend_b - pend_a
        herm_mid = 0.5 * I + width * (fa - fb) / 8.0
        defect = np.abs(herm_mid - I_left)
        finite = ok & ok_l & np.isfinite(fa) & np.isfinite(fb)
        # error budget shared by panel width, floored at the rounding level of
        # the integrand values and of the abscissae
        noise = 64 * _EPS * (absI + np.abs(m) * np.abs(fb - fa))
        budget = np.maximum(quad_tol * width / total, noise)
        at_floor = width <= 1e-11 * np.maximum(1.0, np.abs(m))
        accept = finite & (at_floor | ((err <= budget) & (defect <= np.maximum(interp_tol, noise))))
        out_a.append(pend_a[accept])
        out_b.append(pend_b[accept])
        out_I.append(I[accept])
        count += int(accept.sum())
        ra, rb = pend_a[~accept], pend_b[~accept]
        if ra.size == 0:
            break
        tiny = (rb - ra) <= 1e-11 * np.maximum(1.0, np.abs(rb))
        if np.any(tiny) or count + 2 * ra.size > max_panels:
            where = ra[tiny][0] if np.any(tiny) else ra[0]
            raise QuadratureFailure(
                f"integrand not finite or not resolvable near x={where!r}"
            )
        rm = 0.5 * (ra + rb)
        pend_a = np.concatenate([ra, rm])
        pend_b = np.concatenate([rm, rb])
    a = np.concatenate(out_a)
    order = np.argsort(a)
    return a[order], np.concatenate(out_b)[order], np.concatenate(out_I)[order]


def antiderivative_table(
    f, lo, hi, anchor, quad_tol=1e-10, interp_tol=1e-11, n_init=8, max_panels=400_000
) -> HermiteTable:
    """Tabulate ``F(x) = int_anchor^x f(t) dt`` for ``x`` in ``[lo, hi]``.

    ``f`` must accept numpy arrays. ``anchor`` may lie outside ``[lo, hi]``;
    the table then spans the hull of both.
    """
    lo, hi, anchor = float(lo), float(hi), float(anchor)
    lo, hi = min(lo, anchor), max(hi, anchor)
    if lo == hi:
        return HermiteTable([lo], [0.0], [float(np.asarray(f(np.array([lo])))[0])], anchor)
    total = hi - lo
    la, lb, lI = _refine(f, lo, anchor, total, quad_tol, interp_tol, n_init, max_panels)
    ra, rb, rI = _refine(f, anchor, hi, total, quad_tol, interp_tol, n_init, max_panels)
    # left of the anchor: F(a_i) = -sum_{j >= i} I_j
    F_left = -np.cumsum(lI[::-1])[::-1]
    F_right = np.cumsum(rI)
    x = np.concatenate([la, [anchor], rb])
    F = np.concatenate([F_left, [0.0], F_right])
    dF = np.asarray(f(x), dtype=float)
    dF = np.broadcast_to(dF, x.shape).copy()
    return HermiteTable(x, F, dF, anchor)
