"""Trajectories of the planar field: plain integration, shooting along the
origin's unstable tangent, and backward-time slope measurement."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels as K
from .errors import (DidNotApproachOrigin, DomainViolation, InvalidParameters, LeftDomain,
                     NoConvergence, NotASaddle, StepUnderflow)
from .linearize import classify
from .system import jacobian_at, violated_bounds

REACHED = "reached-attractor"
MAX_TIME = "max-time"
LEFT = "left-domain"
UNDERFLOW = "step-underflow"
_STATUS = {K.REACHED: REACHED, K.MAX_TIME: MAX_TIME, K.LEFT_DOMAIN: LEFT, K.UNDERFLOW: UNDERFLOW}

MAX_STEPS = 2_000_000


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Samples at the integrator's accepted steps.

    ``t`` is monotone in the direction of integration (decreasing for
    backward runs). ``L`` is NaN where the state is outside the Lyapunov
    tables and None when no Lyapunov function was attached.
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    err: np.ndarray
    termination: str
    L: Optional[np.ndarray] = None

    def __post_init__(self):
        for a in (self.t, self.x, self.y, self.err, self.L):
            if a is not None:
                a.setflags(write=False)

    def __len__(self):
        return len(self.t)

    @property
    def samples(self):
        Ls = self.L if self.L is not None else [None] * len(self.t)
        return [(float(t), (float(x), float(y)), float(e), None if v is None else float(v))
                for t, x, y, e, v in zip(self.t, self.x, self.y, self.err, Ls)]

    @property
    def final(self):
        return float(self.x[-1]), float(self.y[-1])

    @property
    def max_x(self):
        return float(np.max(self.x))

    def to_csv(self, fh, stride: int = 1):
        """Rows ``t,x,y,err,L``; ``stride`` keeps every n-th sample plus the last."""
        idx = np.arange(0, len(self.t), max(1, int(stride)))
        if idx[-1] != len(self.t) - 1:
            idx = np.append(idx, len(self.t) - 1)
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["t", "x", "y", "err", "L"])
        for i in idx:
            row = [f"{v:.17g}" for v in (self.t[i], self.x[i], self.y[i], self.err[i])]
            row.append("" if self.L is None else f"{self.L[i]:.17g}")
            wr.writerow(row)


def lyapunov_violations(traj: Trajectory, slack: float = 1e-9):
    """Indices ``i`` where ``L[i+1] > L[i] + slack (1 + |L[i]|)``; NaN entries are skipped."""
    if traj.L is None or len(traj.L) < 2:
        return np.empty(0, dtype=int)
    a, b = traj.L[:-1], traj.L[1:]
    with np.errstate(invalid="ignore"):
        bad = b > a + slack * (1.0 + np.abs(a))
    return np.flatnonzero(bad & np.isfinite(a) & np.isfinite(b))


def _check_tol(rtol, atol):
    for name, v in (("rel_tol", rtol), ("abs_tol", atol)):
        if not (1e-14 <= v <= 1e-2):
            raise InvalidParameters(f"{name}={v!r} outside [1e-14, 1e-2]")


def _check_start(sys, p0):
    x0, y0 = float(p0[0]), float(p0[1])
    if not (math.isfinite(x0) and math.isfinite(y0)) or not sys.contains(x0, y0):
        raise DomainViolation(f"start ({x0!r}, {y0!r}) outside the domain of {sys.name}: "
                              + "; ".join(violated_bounds(sys.domain, x0, y0)))
    return x0, y0


def _run(sys, x0, y0, t_end, rtol, atol, target=None, weights=(1.0, 1.0), qtol=0.0,
         domain=None, max_steps=MAX_STEPS):
    d = domain or sys.domain
    tx, ty = target if target is not None else (0.0, 0.0)
    ts, xs, ys, es, n, status = K.dopri5(
        sys.family, sys.p, float(x0), float(y0), float(t_end), float(rtol), float(atol),
        0.0, int(max_steps), d[0], d[1], d[2], d[3],
        float(tx), float(ty), float(weights[0]), float(weights[1]), float(qtol), target is not None,
    )
    return ts[:n].copy(), xs[:n].copy(), ys[:n].copy(), es[:n].copy(), _STATUS[int(status)]


def _attach(sys, L, ts, xs, ys, es, status):
    Ls = L.values_or_nan(xs, ys) if L is not None else None
    return Trajectory(ts, xs, ys, es, status, Ls)


def integrate(sys, p0, t_end, rel_tol=1e-8, abs_tol=1e-10, L=None, target=None,
              target_tol=1e-4, strict=True) -> Trajectory:
    """Adaptive Dormand-Prince 5(4) run from ``p0`` over ``[0, t_end]``.

    With ``target`` the run stops, as ``reached-attractor``, once within
    ``target_tol`` of that point. With ``strict`` a domain exit or step
    underflow raises, carrying the trajectory as ``.trajectory``.
    """
    _check_tol(rel_tol, abs_tol)
    x0, y0 = _check_start(sys, p0)
    qtol = 0.5 * target_tol ** 2
    traj = _attach(sys, L, *_run(sys, x0, y0, t_end, rel_tol, abs_tol, target, (1.0, 1.0), qtol))
    if strict and traj.termination == LEFT:
        e = LeftDomain(f"trajectory left the domain at {traj.final} (t={traj.t[-1]:.6g})")
        e.trajectory = traj
        raise e
    if strict and traj.termination == UNDERFLOW:
        e = StepUnderflow(f"step size underflow at {traj.final} (t={traj.t[-1]:.6g})")
        e.trajectory = traj
        raise e
    return traj


def check_origin_saddle(sys):
    """Raise :class:`NotASaddle` unless the origin is a saddle with ``h(0) = G(0,0) = 0``."""
    if float(sys.h(0.0)) != 0.0:
        raise NotASaddle(f"h(0) = {float(sys.h(0.0))!r} != 0")
    if abs(float(sys.G(0.0, 0.0))) > 1e-14:
        raise NotASaddle(f"G(0,0) = {float(sys.G(0.0, 0.0))!r} != 0")
    rep = classify(jacobian_at(sys, (0.0, 0.0)))
    if rep.classification != "saddle":
        raise NotASaddle(f"origin is {rep.classification}, not a saddle")
    return rep


def lyapunov_weights(sys, L):
    """``(Hc''(w), Gc''(z))``, the curvatures of ``L`` at its minimum."""
    w, z = L.anchors
    kx = L.sign * float(sys.H_x(w, z)) / float(sys.g(w))
    ky = -L.sign * float(sys.G_y(w, z)) / float(sys.h(z))
    return kx, ky


def shoot_heteroclinic(sys, c, eq, eps=None, tol=1e-5, t_max=1e3, L=None,
                       rel_tol=1e-11, abs_tol=None) -> Trajectory:
    """Integrate forward from ``(eps, c eps)`` until within ``tol`` of ``eq``.

    Proximity is judged on the quadratic model of ``L`` at the attractor
    (when ``L`` is given), scaled so that reaching it implies Euclidean
    distance at most ``tol``.
    """
    check_origin_saddle(sys)
    w, z = eq.location if hasattr(eq, "location") else eq
    if eps is None:
        eps = 1e-5 * min(w, z)
    if not (1e-8 <= eps <= 1e-2):
        raise InvalidParameters(f"eps={eps!r} outside [1e-8, 1e-2]")
    if abs_tol is None:
        abs_tol = 1e-6 * eps * rel_tol
    weights = (1.0, 1.0)
    if L is not None:
        kx, ky = lyapunov_weights(sys, L)
        if kx > 0 and ky > 0:
            weights = (kx, ky)
    qtol = 0.5 * min(weights) * tol ** 2
    # the abs_tol floor of the public integrator does not apply here
    traj = _attach(sys, L, *_run(sys, eps, c * eps, t_max, rel_tol, abs_tol, (w, z), weights, qtol))
    if traj.termination != REACHED:
        e = NoConvergence(f"shooting ended with {traj.termination} at {traj.final}")
        e.trajectory = traj
        raise e
    return traj


def backward_slope(sys, p0, t_back=200.0, r_stop=1e-6, rel_tol=1e-12, abs_tol=1e-20) -> float:
    """``y/x`` once backward integration from ``p0`` comes within ``r_stop`` of the origin."""
    x0, y0 = _check_start(sys, p0)
    ts, xs, ys, es, status = _run(sys, x0, y0, -abs(t_back), rel_tol, abs_tol,
                                  (0.0, 0.0), (1.0, 1.0), 0.5 * r_stop ** 2)
    if status != REACHED or xs[-1] <= 0.0:
        raise DidNotApproachOrigin(
            f"backward run ended with {status} at ({xs[-1]:.6g}, {ys[-1]:.6g}), t={ts[-1]:.6g}"
        )
    return float(ys[-1] / xs[-1])


def point_at_radius(traj: Trajectory, r: float):
    """First sample of ``traj`` at distance at least ``r`` from the origin."""
    rad = np.hypot(traj.x, traj.y)
    i = int(np.argmax(rad >= r))
    if rad[i] < r:
        raise ValueError(f"trajectory never reaches radius {r}")
    return float(traj.x[i]), float(traj.y[i])
