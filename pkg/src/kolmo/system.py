"""Planar Kolmogorov systems ``x' = g(x) G(x, y)``, ``y' = h(y) H(x, y)``.

A :class:`Family` bundles the scalar building blocks of one model family as
plain functions of ``(x, p)`` / ``(x, y, p)``, where ``p`` is a float64
parameter vector. The functions must be written with numpy operations only,
so they broadcast over arrays and can also be compiled by numba for the
integrator kernels.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping, NamedTuple, Optional

import numpy as np

from .errors import DomainViolation, NoConvergence, SingularJacobian
from .linearize import classify

FD_REL_STEP = 1e-6


class Domain(NamedTuple):
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def contains(self, x, y):
        return (x >= self.x_lo) & (x <= self.x_hi) & (y >= self.y_lo) & (y <= self.y_hi)


@dataclass(frozen=True)
class Family:
    """Building blocks of a model family.

    The partial-derivative slots are optional; missing ones are replaced by
    central differences with step ``1e-6 * (1 + |x|)``.
    """

    name: str
    param_names: tuple
    g: Callable
    dg: Callable
    h: Callable
    dh: Callable
    G: Callable
    H: Callable
    G_x: Optional[Callable] = None
    G_y: Optional[Callable] = None
    H_x: Optional[Callable] = None
    H_y: Optional[Callable] = None


def _fd1(f, x, *rest):
    step = FD_REL_STEP * (1.0 + np.abs(x))
    return (f(x + step, *rest) - f(x - step, *rest)) / (2.0 * step)


@dataclass(frozen=True, eq=False)
class SystemDefinition:
    name: str
    family: Family
    params: Mapping[str, float]
    domain: Domain
    p: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        params = MappingProxyType(dict(self.params))
        object.__setattr__(self, "params", params)
        vec = np.array([float(params[k]) for k in self.family.param_names], dtype=np.float64)
        vec.setflags(write=False)
        object.__setattr__(self, "p", vec)
        object.__setattr__(self, "domain", Domain(*map(float, self.domain)))

    # scalar building blocks -------------------------------------------------
    def g(self, x):
        return self.family.g(x, self.p)

    def h(self, y):
        return self.family.h(y, self.p)

    def dg(self, x):
        return self.family.dg(x, self.p)

    def dh(self, y):
        return self.family.dh(y, self.p)

    def G(self, x, y):
        return self.family.G(x, y, self.p)

    def H(self, x, y):
        return self.family.H(x, y, self.p)

    def G_x(self, x, y):
        f = self.family.G_x
        if f is None:
            return _fd1(lambda u: self.G(u, y), x)
        return f(x, y, self.p)

    def G_y(self, x, y):
        f = self.family.G_y
        if f is None:
            return _fd1(lambda u: self.G(x, u), y)
        return f(x, y, self.p)

    def H_x(self, x, y):
        f = self.family.H_x
        if f is None:
            return _fd1(lambda u: self.H(u, y), x)
        return f(x, y, self.p)

    def H_y(self, x, y):
        f = self.family.H_y
        if f is None:
            return _fd1(lambda u: self.H(x, u), y)
        return f(x, y, self.p)

    def rhs(self, x, y):
        return self.g(x) * self.G(x, y), self.h(y) * self.H(x, y)

    def contains(self, x, y):
        return self.domain.contains(x, y)


def violated_bounds(domain: Domain, x, y):
    """Human-readable list of the domain bounds that ``(x, y)`` breaks."""
    out = []
    for name, val, lo, hi in (("x", x, domain.x_lo, domain.x_hi), ("y", y, domain.y_lo, domain.y_hi)):
        if not np.isfinite(val):
            out.append(f"{name}={val!r} is not finite")
        elif val < lo:
            out.append(f"{name}={val!r} < {name}_lo={lo!r}")
        elif val > hi:
            out.append(f"{name}={val!r} > {name}_hi={hi!r}")
    return out


def _check_point(sys, p):
    x, y = float(p[0]), float(p[1])
    if not (np.isfinite(x) and np.isfinite(y)) or not sys.contains(x, y):
        raise DomainViolation(
            f"point ({x!r}, {y!r}) outside the domain of {sys.name}: "
            + "; ".join(violated_bounds(sys.domain, x, y))
        )
    return x, y


def eval_rhs(sys: SystemDefinition, p) -> np.ndarray:
    x, y = _check_point(sys, p)
    return np.array(sys.rhs(x, y), dtype=float)


def jacobian_at(sys: SystemDefinition, p) -> np.ndarray:
    """Analytic Jacobian ``[[g'G + g G_x, g G_y], [h H_x, h'H + h H_y]]``."""
    x, y = _check_point(sys, p)
    g, h = sys.g(x), sys.h(y)
    G, H = sys.G(x, y), sys.H(x, y)
    return np.array(
        [
            [sys.dg(x) * G + g * sys.G_x(x, y), g * sys.G_y(x, y)],
            [h * sys.H_x(x, y), sys.dh(y) * H + h * sys.H_y(x, y)],
        ],
        dtype=float,
    )


def fd_jacobian(sys: SystemDefinition, p) -> np.ndarray:
    """Central-difference Jacobian of the vector field, for cross-checks."""
    x, y = float(p[0]), float(p[1])
    hx = FD_REL_STEP * (1.0 + abs(x))
    hy = FD_REL_STEP * (1.0 + abs(y))
    fxp, fxm = np.array(sys.rhs(x + hx, y)), np.array(sys.rhs(x - hx, y))
    fyp, fym = np.array(sys.rhs(x, y + hy)), np.array(sys.rhs(x, y - hy))
    return np.column_stack([(fxp - fxm) / (2 * hx), (fyp - fym) / (2 * hy)])


@dataclass(frozen=True)
class Equilibrium:
    location: tuple
    jacobian: np.ndarray
    kind: str            # origin-saddle | interior-attractor | other
    classification: str  # saddle | stable-node | stable-spiral | unstable | degenerate
    report: object = field(default=None, repr=False, compare=False)

    @property
    def x(self):
        return self.location[0]

    @property
    def y(self):
        return self.location[1]


_COARSE = {
    "saddle": "saddle",
    "stable-node": "stable-node",
    "stable-spiral": "stable-spiral",
    "unstable-node": "unstable",
    "unstable-spiral": "unstable",
    "center-degenerate": "degenerate",
}


def make_equilibrium(sys: SystemDefinition, location, atol=1e-10) -> Equilibrium:
    """Wrap a known stationary point; rejects points that are not stationary."""
    x, y = _check_point(sys, location)
    res = np.hypot(*sys.rhs(x, y))
    if res > atol * (1.0 + np.hypot(x, y)):
        raise NoConvergence(f"({x}, {y}) is not stationary for {sys.name}: |f| = {res:.3e}")
    J = jacobian_at(sys, (x, y))
    rep = classify(J)
    cls = _COARSE[rep.classification]
    if x == 0.0 and y == 0.0 and cls == "saddle":
        kind = "origin-saddle"
    elif x > 0 and y > 0 and cls in ("stable-node", "stable-spiral"):
        kind = "interior-attractor"
    else:
        kind = "other"
    return Equilibrium((x, y), J, kind, cls, rep)


def find_equilibrium(
    sys: SystemDefinition, guess, tol: float = 1e-12, max_iter: int = 100
) -> Equilibrium:
    """Damped Newton on the interior nullcline system ``G = H = 0``.

    Each step is halved (at most 30 times) until the residual norm drops and
    the trial point stays inside the domain.
    """
    x, y = _check_point(sys, guess)

    def resid(u, v):
        return np.array([sys.G(u, v), sys.H(u, v)], dtype=float)

    F = resid(x, y)
    r = np.linalg.norm(F)
    for _ in range(max_iter):
        if r <= tol:
            return make_equilibrium(sys, (x, y))
        J = np.array([[sys.G_x(x, y), sys.G_y(x, y)], [sys.H_x(x, y), sys.H_y(x, y)]])
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        if not np.isfinite(det) or det == 0.0:
            raise SingularJacobian(f"Newton matrix singular at ({x}, {y})")
        step = np.linalg.solve(J, -F)
        lam = 1.0
        for _ in range(31):
            xn, yn = x + lam * step[0], y + lam * step[1]
            if sys.contains(xn, yn):
                Fn = resid(xn, yn)
                rn = np.linalg.norm(Fn)
                if np.isfinite(rn) and rn < r:
                    break
            lam *= 0.5
        else:
            raise NoConvergence(f"damped Newton stalled at ({x}, {y}), residual {r:.3e}")
        x, y, F, r = xn, yn, Fn, rn
    if r <= tol:
        return make_equilibrium(sys, (x, y))
    raise NoConvergence(f"no convergence after {max_iter} iterations, residual {r:.3e}")


def sample_interior(sys: SystemDefinition, n: int, rng, margin: float = 0.0):
    """``n`` uniform points in the domain shrunk by ``margin`` of its width."""
    d = sys.domain
    wx, wy = d.x_hi - d.x_lo, d.y_hi - d.y_lo
    xs = rng.uniform(d.x_lo + margin * wx, d.x_hi - margin * wx, n)
    ys = rng.uniform(d.y_lo + margin * wy, d.y_hi - margin * wy, n)
    return xs, ys


def check_partials(sys: SystemDefinition, n: int = 12, rtol: float = 1e-6, margin: float = 0.05):
    """Compare supplied partials against central differences on an ``n x n`` grid.

    Returns a list of ``(name, x, y, supplied, fd)`` mismatches (empty if fine).
    Guards against transcription errors in hand-written partials.
    """
    d = sys.domain
    wx, wy = d.x_hi - d.x_lo, d.y_hi - d.y_lo
    xs = np.linspace(d.x_lo + margin * wx, d.x_hi - margin * wx, n)
    ys = np.linspace(d.y_lo + margin * wy, d.y_hi - margin * wy, n)
    X, Y = np.meshgrid(xs, ys)
    X, Y = X.ravel(), Y.ravel()
    bad = []
    checks = [
        ("G_x", sys.G_x(X, Y), _fd1(lambda u: sys.G(u, Y), X)),
        ("G_y", sys.G_y(X, Y), _fd1(lambda u: sys.G(X, u), Y)),
        ("H_x", sys.H_x(X, Y), _fd1(lambda u: sys.H(u, Y), X)),
        ("H_y", sys.H_y(X, Y), _fd1(lambda u: sys.H(X, u), Y)),
        ("g'", sys.dg(X) + 0 * X, _fd1(sys.g, X) + 0 * X),
        ("h'", sys.dh(Y) + 0 * Y, _fd1(sys.h, Y) + 0 * Y),
    ]
    for name, a, b in checks:
        a = np.broadcast_to(a, X.shape)
        b = np.broadcast_to(b, X.shape)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise DomainViolation(f"{name} not finite on the interior grid of {sys.name}")
        err = np.abs(a - b) > rtol * np.maximum(1.0, np.abs(a))
        for i in np.flatnonzero(err):
            bad.append((name, X[i], Y[i], a[i], b[i]))
    return bad
