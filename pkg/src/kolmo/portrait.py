"""Static SVG phase portraits.

Each data layer is an SVG group with a fixed ``id``: ``vector-field``,
``isoclines``, ``ray``, ``level-curve``, ``heteroclinic``,
``trajectory-sample`` and ``equilibria``. Layers that depend on a refused
bound are left out. Coordinates are printed with fixed precision so equal
inputs give byte-identical files.
"""
from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

import numpy as np

from . import bound as B
from . import flow
from ._kernels import marching_squares
from .errors import KolmoError, NoRoot

WIDTH = HEIGHT = 640
MARGIN = 56
LAYERS = ("vector-field", "isoclines", "ray", "level-curve", "heteroclinic",
          "trajectory-sample", "equilibria")
STYLE = {
    "vector-field": 'stroke="#9aa3ad" stroke-width="0.8" fill="none"',
    "isoclines": 'stroke="#2b7bb9" stroke-width="1.4" fill="none"',
    "ray": 'stroke="#444" stroke-width="1" stroke-dasharray="5,4" fill="none"',
    "level-curve": 'stroke="#d9822b" stroke-width="1.4" fill="none"',
    "heteroclinic": 'stroke="#c0392b" stroke-width="1.8" fill="none"',
    "trajectory-sample": 'stroke="#7d3c98" stroke-width="1.4" fill="none"',
    "equilibria": 'stroke="#000" stroke-width="1" fill="#fff"',
}


class _Frame:
    def __init__(self, domain):
        self.x0, self.x1, self.y0, self.y1 = domain
        self.sx = (WIDTH - 2 * MARGIN) / (self.x1 - self.x0)
        self.sy = (HEIGHT - 2 * MARGIN) / (self.y1 - self.y0)

    def px(self, x):
        return MARGIN + (np.asarray(x, dtype=float) - self.x0) * self.sx

    def py(self, y):
        return HEIGHT - MARGIN - (np.asarray(y, dtype=float) - self.y0) * self.sy


def _num(v):
    return f"{float(v):.2f}"


def _polyline(frame, xs, ys, cls, stride=None):
    xs, ys = np.asarray(xs), np.asarray(ys)
    ok = np.isfinite(xs) & np.isfinite(ys)
    xs, ys = xs[ok], ys[ok]
    if stride is None:
        stride = max(1, len(xs) // 1500)
    keep = np.unique(np.append(np.arange(0, len(xs), stride), len(xs) - 1)) if len(xs) else []
    pts = " ".join(f"{_num(a)},{_num(b)}" for a, b in zip(frame.px(xs[keep]), frame.py(ys[keep])))
    return f'<polyline class={quoteattr(cls)} points="{pts}"/>'


def _segments_path(frame, segs, cls):
    if len(segs) == 0:
        return f'<path class={quoteattr(cls)} d=""/>'
    X0, Y0 = frame.px(segs[:, 0]), frame.py(segs[:, 1])
    X1, Y1 = frame.px(segs[:, 2]), frame.py(segs[:, 3])
    d = " ".join(f"M{_num(a)} {_num(b)}L{_num(c)} {_num(e)}" for a, b, c, e in zip(X0, Y0, X1, Y1))
    return f'<path class={quoteattr(cls)} d="{d}"/>'


def _grid(domain, nx, ny, inset=0.0):
    x0, x1, y0, y1 = domain
    dx, dy = inset * (x1 - x0), inset * (y1 - y0)
    return np.linspace(x0 + dx, x1 - dx, nx), np.linspace(y0 + dy, y1 - dy, ny)


def _vector_field(frame, sys, nx, ny):
    xs, ys = _grid(sys.domain, nx, ny, inset=0.5 / max(nx, ny))
    X, Y = np.meshgrid(xs, ys)
    with np.errstate(all="ignore"):
        U, V = sys.rhs(X, Y)
    U = np.broadcast_to(U, X.shape) * frame.sx
    V = -np.broadcast_to(V, X.shape) * frame.sy
    n = np.hypot(U, V)
    cell = 0.4 * min((WIDTH - 2 * MARGIN) / nx, (HEIGHT - 2 * MARGIN) / ny)
    ok = np.isfinite(n) & (n > 0)
    parts = []
    for cx, cy, u, v in zip(frame.px(X[ok]), frame.py(Y[ok]), U[ok] / n[ok] * cell, V[ok] / n[ok] * cell):
        hx, hy = cx + u, cy + v
        # arrow head: two short strokes back from the tip
        ax, ay = hx - 0.35 * u + 0.2 * v, hy - 0.35 * v - 0.2 * u
        bx, by = hx - 0.35 * u - 0.2 * v, hy - 0.35 * v + 0.2 * u
        parts.append(f"M{_num(cx - u)} {_num(cy - v)}L{_num(hx)} {_num(hy)}"
                     f"M{_num(ax)} {_num(ay)}L{_num(hx)} {_num(hy)}L{_num(bx)} {_num(by)}")
    return [f'<path class="arrows" d="{" ".join(parts)}"/>']


def _nullclines(frame, sys, n=241):
    xs, ys = _grid(sys.domain, n, n)
    X, Y = np.meshgrid(xs, ys)
    with np.errstate(all="ignore"):
        Gv = np.broadcast_to(sys.G(X, Y), X.shape)
        Hv = np.broadcast_to(sys.H(X, Y), X.shape)
    return [_segments_path(frame, marching_squares(Gv, xs, ys, 0.0), "nullcline-G"),
            _segments_path(frame, marching_squares(Hv, xs, ys, 0.0), "nullcline-H")]


def _isocline_arcs(frame, sys, L, c, v):
    w, z = L.anchors
    out = []
    try:
        yp = np.linspace(sys.domain.y_lo, z, 121)
        out.append(_polyline(frame, [B.isocline_x_plus(sys, y, w) for y in yp], yp, "x-plus"))
        ym = np.linspace(z, c * v, 121)
        out.append(_polyline(frame, [B.isocline_x_minus(sys, y, v, w) for y in ym], ym, "x-minus"))
    except NoRoot:
        pass
    return out


def _level_curve(frame, sys, L, level, n=301):
    (hx0, hx1), (gy0, gy1) = L.domain
    d = sys.domain
    xs = np.linspace(max(hx0, d.x_lo), min(hx1, d.x_hi), n)
    ys = np.linspace(max(gy0, d.y_lo), min(gy1, d.y_hi), n)
    X, Y = np.meshgrid(xs, ys)
    F = L.values_or_nan(X, Y)
    return [_segments_path(frame, marching_squares(F, xs, ys, level), "level")]


def _marker(frame, x, y, label, r=4.5):
    return (f'<circle class="marker" data-label={quoteattr(label)} data-x="{float(x):.17g}" '
            f'data-y="{float(y):.17g}" cx="{_num(frame.px(x))}" cy="{_num(frame.py(y))}" r="{r}"/>')


def _axes(frame):
    x0, x1, y0, y1 = frame.x0, frame.x1, frame.y0, frame.y1
    out = [f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" '
           f'height="{HEIGHT - 2 * MARGIN}" fill="none" stroke="#000"/>']
    for t in np.linspace(x0, x1, 5):
        out.append(f'<text x="{_num(frame.px(t))}" y="{HEIGHT - MARGIN + 18}" '
                   f'text-anchor="middle">{t:.4g}</text>')
    for t in np.linspace(y0, y1, 5):
        out.append(f'<text x="{MARGIN - 6}" y="{_num(frame.py(t) + 4)}" text-anchor="end">{t:.4g}</text>')
    out.append(f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle">x</text>')
    out.append(f'<text x="14" y="{HEIGHT / 2:.0f}" text-anchor="middle">y</text>')
    return out


def render(analysis, grid=(20, 20), heteroclinic=None, sample=None) -> str:
    """SVG text for an :class:`~kolmo.analysis.Analysis`.

    ``heteroclinic`` and ``sample`` are optional precomputed trajectories;
    when absent they are integrated here.
    """
    a = analysis
    sys = a.sys
    frame = _Frame(sys.domain)
    layers = {}

    layers["vector-field"] = _vector_field(frame, sys, *grid)
    iso = _nullclines(frame, sys)
    if a.L is not None and a.c is not None and a.v is not None:
        iso += _isocline_arcs(frame, sys, a.L, a.c, a.v)
    layers["isoclines"] = iso

    w, z = a.interior.location
    markers = [_marker(frame, 0.0, 0.0, "origin"), _marker(frame, w, z, "attractor")]
    if a.c is not None and a.v is not None:
        top = min(sys.domain.x_hi, sys.domain.y_hi / a.c)
        layers["ray"] = [_polyline(frame, [0.0, top], [0.0, a.c * top], "ray")]
        markers.append(_marker(frame, a.v, a.c * a.v, "ray-isocline", r=3.5))

    if a.bound is not None:
        layers["level-curve"] = _level_curve(frame, sys, a.L, a.bound.level_value)
        if heteroclinic is None:
            try:
                heteroclinic = flow.shoot_heteroclinic(sys, a.c, a.interior, L=a.L)
            except KolmoError:
                heteroclinic = None
        if heteroclinic is not None:
            layers["heteroclinic"] = [_polyline(frame, heteroclinic.x, heteroclinic.y, "orbit")]
    else:
        if sample is None:
            start = (min(1.6 * w, 0.9 * sys.domain.x_hi), min(1.6 * z, 0.9 * sys.domain.y_hi))
            try:
                sample = flow.integrate(sys, start, 400.0, 1e-9, 1e-12, target=(w, z),
                                        target_tol=1e-4, strict=False)
            except KolmoError:
                sample = None
        if sample is not None:
            layers["trajectory-sample"] = [_polyline(frame, sample.x, sample.y, "orbit")]
    layers["equilibria"] = markers

    title = f"{a.entry.id}: {a.entry.description}"
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f"<title>{escape(title)}</title>",
        '<rect width="100%" height="100%" fill="#fff"/>',
        *_axes(frame),
    ]
    for name in LAYERS:
        if name in layers:
            out.append(f'<g id="{name}" {STYLE[name]}>')
            out.extend(layers[name])
            out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
