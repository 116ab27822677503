"""Separable Lyapunov functions ``L(x, y) = Hc(x) + Gc(y)``.

The components are tabulated antiderivatives of

* ``Hc'(x) = s * H(x, z) / g(x)``
* ``Gc'(y) = -s * G(w, y) / h(y)``

anchored so that ``Hc(w) = Gc(z) = 0``. The sign ``s`` is fixed by the
variant: ``"H+"`` (``s = +1``) applies when ``G_x H_x(x, z) <= 0`` and
``H_y G_y(w, y) >= 0``; ``"H-"`` (``s = -1``) when both signs are reversed.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NeitherVariant, NonpositiveDenominator, OutOfTable
from .quadrature import HermiteTable, antiderivative_table

log = logging.getLogger(__name__)

H_PLUS = "H+"
H_MINUS = "H-"
VARIANTS = (H_PLUS, H_MINUS)

# smallest tabulated coordinate when g or h vanishes at the domain edge
EDGE_CUTOFF = 1e-6


def _sign(variant):
    if variant == H_PLUS:
        return 1.0
    if variant == H_MINUS:
        return -1.0
    raise ValueError(f"unknown variant {variant!r}")


def probe_grid(sys, n=41):
    d = sys.domain
    xs = np.linspace(d.x_lo, d.x_hi, n)
    ys = np.linspace(d.y_lo, d.y_hi, n)
    X, Y = np.meshgrid(xs, ys)
    return X.ravel(), Y.ravel()


def sign_products(sys, eq, X, Y):
    """``(G_x(x,y) * H_x(x,z), H_y(x,y) * G_y(w,y))`` on the probe points."""
    w, z = eq.location
    zz = np.full_like(X, z)
    ww = np.full_like(Y, w)
    p1 = np.broadcast_to(sys.G_x(X, Y) * sys.H_x(X, zz), X.shape)
    p2 = np.broadcast_to(sys.H_y(X, Y) * sys.G_y(ww, Y), X.shape)
    return p1, p2


def select_variant(sys, eq, probe=None) -> str:
    """Pick the sign convention whose hypotheses hold on every probe point.

    When every product vanishes both conventions qualify; ``"H-"`` is
    returned in that case.
    """
    X, Y = probe if probe is not None else probe_grid(sys)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    p1, p2 = sign_products(sys, eq, X, Y)
    minus_ok = (p1 >= 0) & (p2 <= 0)
    if np.all(minus_ok):
        return H_MINUS
    plus_ok = (p1 <= 0) & (p2 >= 0)
    if np.all(plus_ok):
        return H_PLUS
    bad = np.flatnonzero(~minus_ok & ~plus_ok)
    i = bad[0] if bad.size else np.flatnonzero(~minus_ok)[0]
    pt = (float(X[i]), float(Y[i]))
    raise NeitherVariant(
        f"sign conditions fail for both variants at {pt}: "
        f"G_x*H_x^z={p1[i]:.3e}, H_y*G_y^w={p2[i]:.3e}",
        point=pt,
    )


@dataclass(frozen=True, eq=False)
class LyapunovFunction:
    variant: str
    H_comp: HermiteTable
    G_comp: HermiteTable
    anchors: tuple
    domain: tuple  # ((x_lo, x_hi), (y_lo, y_hi)) of the tables
    sys: object

    @property
    def sign(self):
        return _sign(self.variant)

    def H(self, x):
        return self.H_comp(x)

    def G(self, y):
        return self.G_comp(y)

    def dH(self, x):
        """Exact ``Hc'`` from the system, not the interpolant."""
        w, z = self.anchors
        x = np.asarray(x, dtype=float)
        return self.sign * self.sys.H(x, np.full_like(x, z)) / self.sys.g(x)

    def dG(self, y):
        w, z = self.anchors
        y = np.asarray(y, dtype=float)
        return -self.sign * self.sys.G(np.full_like(y, w), y) / self.sys.h(y)

    def contains(self, x, y):
        return self.H_comp.contains(x) & self.G_comp.contains(y)

    def __call__(self, x, y):
        return self.H_comp(x) + self.G_comp(y)

    def values_or_nan(self, x, y):
        """``L`` where tabulated, NaN elsewhere."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.full(np.broadcast(x, y).shape, np.nan)
        ok = self.contains(x, y)
        if np.any(ok):
            xb, yb = np.broadcast_arrays(x, y)
            out[ok] = self.H_comp(xb[ok]) + self.G_comp(yb[ok])
        return out


def default_intervals(sys):
    """Table intervals covering the domain, cut at ``EDGE_CUTOFF`` where g or h vanish."""
    d = sys.domain
    x_lo = d.x_lo if float(sys.g(d.x_lo)) > 0 else d.x_lo + EDGE_CUTOFF
    y_lo = d.y_lo if float(sys.h(d.y_lo)) > 0 else d.y_lo + EDGE_CUTOFF
    return (x_lo, d.x_hi), (y_lo, d.y_hi)


def build(sys, eq, variant, intervals=None, quad_tol=1e-10, interp_tol=1e-11) -> LyapunovFunction:
    w, z = eq.location
    s = _sign(variant)
    if intervals is None:
        intervals = default_intervals(sys)
    (x_lo, x_hi), (y_lo, y_hi) = intervals

    for name, fn, lo, hi in (("g", sys.g, x_lo, x_hi), ("h", sys.h, y_lo, y_hi)):
        lo_, hi_ = min(lo, w if name == "g" else z), max(hi, w if name == "g" else z)
        probe = np.linspace(lo_, hi_, 2001)
        vals = np.broadcast_to(fn(probe), probe.shape)
        if np.any(vals <= 0):
            i = int(np.flatnonzero(vals <= 0)[0])
            raise NonpositiveDenominator(f"{name}({probe[i]!r}) = {vals[i]!r} <= 0 inside the table interval")

    def dH(x):
        return s * sys.H(x, np.full_like(x, z)) / sys.g(x)

    def dG(y):
        return -s * sys.G(np.full_like(y, w), y) / sys.h(y)

    Ht = antiderivative_table(dH, x_lo, x_hi, w, quad_tol, interp_tol)
    Gt = antiderivative_table(dG, y_lo, y_hi, z, quad_tol, interp_tol)
    L = LyapunovFunction(variant, Ht, Gt, (float(w), float(z)),
                         ((Ht.lo, Ht.hi), (Gt.lo, Gt.hi)), sys)
    witness = positivity_witness(L)
    if witness is not None:
        log.warning("Lyapunov component not positive away from its anchor: %s", witness)
    return L


def positivity_witness(L: LyapunovFunction) -> Optional[tuple]:
    """First table node where a component is not strictly positive off-anchor, or None.

    Nodes within ``sqrt(eps)`` of the anchor are skipped: the component is
    quadratic there and its value is at rounding level.
    """
    for name, t in (("H", L.H_comp), ("G", L.G_comp)):
        off = np.abs(t.x - t.anchor) > np.sqrt(np.finfo(float).eps) * (1.0 + abs(t.anchor))
        bad = off & (t.F <= 0)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            return name, float(t.x[i]), float(t.F[i])
    return None


def eval(L: LyapunovFunction, p) -> float:  # noqa: A001 - mirrors the math name
    x, y = float(p[0]), float(p[1])
    return float(L(x, y))


def orbital_derivative(sys, L: LyapunovFunction, p) -> float:
    """``x' Hc'(x) + y' Gc'(y)``.

    ``g`` and ``h`` cancel between the vector field and the component
    derivatives, leaving ``s * (G(x,y) H(x,z) - H(x,y) G(w,y))``, which is
    also defined on the axes where ``g`` or ``h`` vanish.
    """
    x, y = float(p[0]), float(p[1])
    if not bool(L.contains(x, y)):
        raise OutOfTable(f"({x}, {y}) outside the Lyapunov tables {L.domain}")
    val = float(orbital_derivative_array(sys, L, x, y))
    if log.isEnabledFor(logging.DEBUG):
        est = float(mvt_estimate(sys, L, x, y))
        if (val > 1e-12) != (est > 1e-12):
            log.debug("orbital derivative %.3e and mean-value estimate %.3e disagree in sign at (%g, %g)",
                      val, est, x, y)
    return val


def orbital_derivative_array(sys, L, x, y):
    """Vectorized :func:`orbital_derivative` without table-range checks."""
    w, z = L.anchors
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return L.sign * (sys.G(x, y) * sys.H(x, np.full_like(x, z))
                     - sys.H(x, y) * sys.G(np.full_like(y, w), y))


def mvt_estimate(sys, L, x, y):
    """``s (G_x H_x^z (x-w)^2 - H_y G_y^w (y-z)^2)`` with partials taken at the point.

    The exact identity needs partials at unknown intermediate points, so this
    is only an advisory cross-check of the sign.
    """
    w, z = L.anchors
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return L.sign * (sys.G_x(x, y) * sys.H_x(x, np.full_like(x, z)) * (x - w) ** 2
                     - sys.H_y(x, y) * sys.G_y(np.full_like(y, w), y) * (y - z) ** 2)


def export_csv(L: LyapunovFunction, component: str, fh):
    """Write one component table as ``coordinate,value,derivative`` rows."""
    t = {"H": L.H_comp, "G": L.G_comp}[component]
    wr = csv.writer(fh, lineterminator="\n")
    wr.writerow(["coordinate", "value", "derivative"])
    for row in zip(t.x, t.F, t.dF):
        wr.writerow([f"{v:.17g}" for v in row])
