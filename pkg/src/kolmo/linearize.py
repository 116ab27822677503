"""Trace/determinant classification of 2x2 linearizations and the origin's
unstable tangent slope."""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import DivisionByZero

CLASSES = (
    "saddle",
    "stable-node",
    "stable-spiral",
    "unstable-node",
    "unstable-spiral",
    "center-degenerate",
)


@dataclass(frozen=True)
class StabilityReport:
    trace: float
    determinant: float
    discriminant: float
    eigenvalues: tuple
    classification: str
    # discriminant within the node/spiral tie band; classified as a node
    boundary: bool = False

    def to_dict(self):
        d = asdict(self)
        d["eigenvalues"] = [[z.real, z.imag] for z in self.eigenvalues]
        return d


def eigenvalues_from(tr: float, det: float):
    """Roots of ``lam^2 - tr lam + det = 0`` without cancellation."""
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        s = math.sqrt(disc)
        q = 0.5 * (tr + math.copysign(s, tr))
        if q == 0.0:
            return complex(0.0), complex(0.0)
        return complex(q), complex(det / q)
    s = math.sqrt(-disc)
    return complex(0.5 * tr, 0.5 * s), complex(0.5 * tr, -0.5 * s)


def classify(J) -> StabilityReport:
    J = np.asarray(J, dtype=float)
    tr = float(J[0, 0] + J[1, 1])
    det = float(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])
    disc = tr * tr - 4.0 * det
    scale = 1.0 + float(np.sum(J * J))
    lam = eigenvalues_from(tr, det)
    boundary = False
    if abs(det) <= 1e-12 * scale:
        cls = "center-degenerate"
    elif det < 0.0:
        cls = "saddle"
    elif abs(tr) <= 1e-12 * math.sqrt(scale):
        cls = "center-degenerate"
    else:
        side = "stable" if tr < 0.0 else "unstable"
        if abs(disc) < 1e-12 * (1.0 + tr * tr):
            boundary = True
            cls = side + "-node"
        elif disc < 0.0:
            cls = side + "-spiral"
        else:
            cls = side + "-node"
    return StabilityReport(tr, det, disc, lam, cls, boundary)


def eigen_residual(rep: StabilityReport) -> float:
    """Largest relative residual of the characteristic equation at the eigenvalues."""
    worst = 0.0
    for z in rep.eigenvalues:
        val = z * z - rep.trace * z + rep.determinant
        mag = abs(z) ** 2 + abs(rep.trace * z) + abs(rep.determinant)
        worst = max(worst, abs(val) / mag if mag else abs(val))
    return worst


def unstable_slope_c(sys) -> float:
    """Limit of ``y/x`` along orbits leaving the origin:
    ``(H(0,0) h'(0) / g(0) - G_x(0,0)) / G_y(0,0)``."""
    g0 = float(sys.g(0.0))
    gy = float(sys.G_y(0.0, 0.0))
    if g0 == 0.0:
        raise DivisionByZero(f"g(0) = 0 for {sys.name}")
    if gy == 0.0:
        raise DivisionByZero(f"G_y(0,0) = 0 for {sys.name}")
    return (float(sys.H(0.0, 0.0)) * float(sys.dh(0.0)) / g0 - float(sys.G_x(0.0, 0.0))) / gy


def is_stable(rep: StabilityReport) -> bool:
    return rep.trace < 0.0 and rep.determinant > 0.0


__all__ = ["StabilityReport", "classify", "eigen_residual", "eigenvalues_from",
           "unstable_slope_c", "is_stable", "CLASSES"]
