"""Real branches of the Lambert W function.

``lambert_w("principal", x)`` solves ``w e^w = x`` with ``w >= -1`` for
``x >= -1/e``; ``lambert_w("lower", x)`` gives the ``w <= -1`` solution for
``-1/e <= x < 0``. Both use a branch-specific seed followed by Halley
iteration.
"""
from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .errors import DomainViolation

INV_E = math.exp(-1.0)
EDGE_TOL = 1e-15


class WBranch(str, Enum):
    PRINCIPAL = "principal"
    LOWER = "lower"


def _branch_point_seed(p: float, sign: float) -> float:
    # w = -1 + s p - s^2 p^2/3 + 11/72 s^3 p^3, p = sqrt(2 (e x + 1))
    q = sign * p
    return -1.0 + q - q * q / 3.0 + 11.0 / 72.0 * q * q * q


def _seed(branch: WBranch, x: float) -> float:
    p2 = 2.0 * (math.e * x + 1.0)
    p = math.sqrt(max(p2, 0.0))
    if branch is WBranch.PRINCIPAL:
        if p < 0.6:
            return _branch_point_seed(p, 1.0)
        if abs(x) < 0.3:
            return x * (1.0 - x + 1.5 * x * x)
        if x < 3.0:
            return math.log1p(x) * 0.8
        l1 = math.log(x)
        return l1 - math.log(l1)
    if p < 0.6:
        return _branch_point_seed(p, -1.0)
    l1 = math.log(-x)
    return l1 - math.log(-l1)


def lambert_w(branch, x: float, max_iter: int = 64) -> float:
    branch = WBranch(branch)
    x = float(x)
    if not math.isfinite(x):
        raise DomainViolation(f"lambert_w: non-finite argument {x!r}")
    if x < -INV_E - EDGE_TOL:
        raise DomainViolation(f"lambert_w: {x!r} < -1/e")
    if branch is WBranch.LOWER and x >= 0.0:
        raise DomainViolation(f"lambert_w lower branch needs x < 0, got {x!r}")
    if x <= -INV_E:
        return -1.0
    if x == 0.0:
        return 0.0

    w = _seed(branch, x)
    for _ in range(max_iter):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0:
            break
        dw = f / denom
        w_new = w - dw
        # stay on the requested side of the branch point
        if branch is WBranch.PRINCIPAL and w_new < -1.0:
            w_new = 0.5 * (w - 1.0)
        elif branch is WBranch.LOWER and w_new > -1.0:
            w_new = 0.5 * (w - 1.0)
        if abs(w_new - w) <= 4e-16 * (1.0 + abs(w_new)):
            w = w_new
            break
        w = w_new
    return w


def lambert_w_array(branch, x) -> np.ndarray:
    """Elementwise :func:`lambert_w` over an array."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for i, xi in np.ndenumerate(x):
        out[i] = lambert_w(branch, xi)
    return out
