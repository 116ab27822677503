"""The five shipped model families.

Astrophysical models use ``g = 1``, ``h(y) = y``, ``G = y - x`` and
``H = a(x) - b(x) y``:

* ``classical``: ``a = 2 - x``, ``b = 0`` (Newtonian / Smoluchowski-Poisson limit).
* ``relativistic``: ``(1 - 8 pi x) a = 2 - 24 pi x``, ``(1 - 8 pi x) b = 8 pi``
  (Tolman-Oppenheimer-Volkoff equation in Milne variables).

Predator-prey models:

* ``pp1``: ``H = alpha / (1 + kappa x) - beta x y``.
* ``pp2``: ``H = alpha / (1 + kappa x) - beta y``.
* ``pp3``: ``x' = x (delta y - gamma)``, ``y' = alpha y (1 - y/m - x)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import InvalidParameters, UnknownModel
from .specfun import lambert_w
from .system import Domain, Family, SystemDefinition

PI = math.pi
REL_MARGIN = 1e-9


# -- shared pieces ----------------------------------------------------------
def _one(x, p):
    return 1.0 + 0.0 * x


def _zero(x, p):
    return 0.0 * x


def _ident(x, p):
    return x


def _zero2(x, y, p):
    return 0.0 * x + 0.0 * y


def _one2(x, y, p):
    return 1.0 + 0.0 * x + 0.0 * y


def _minus_one2(x, y, p):
    return -1.0 + 0.0 * x + 0.0 * y


def _G_diag(x, y, p):
    return y - x


# -- classical --------------------------------------------------------------
def _cl_H(x, y, p):
    return 2.0 - x + 0.0 * y


CLASSICAL = Family(
    "classical", (), g=_one, dg=_zero, h=_ident, dh=_one,
    G=_G_diag, H=_cl_H,
    G_x=_minus_one2, G_y=_one2, H_x=_minus_one2, H_y=_zero2,
)


# -- relativistic -----------------------------------------------------------
def _rel_H(x, y, p):
    return (2.0 - 24.0 * np.pi * x - 8.0 * np.pi * y) / (1.0 - 8.0 * np.pi * x)


def _rel_Hx(x, y, p):
    d = 1.0 - 8.0 * np.pi * x
    return (-8.0 * np.pi - 64.0 * np.pi * np.pi * y) / (d * d)


def _rel_Hy(x, y, p):
    return -8.0 * np.pi / (1.0 - 8.0 * np.pi * x) + 0.0 * y


RELATIVISTIC = Family(
    "relativistic", (), g=_one, dg=_zero, h=_ident, dh=_one,
    G=_G_diag, H=_rel_H,
    G_x=_minus_one2, G_y=_one2, H_x=_rel_Hx, H_y=_rel_Hy,
)


# -- predator-prey I: p = (alpha, kappa, beta) -------------------------------
def _pp1_H(x, y, p):
    return p[0] / (1.0 + p[1] * x) - p[2] * x * y


def _pp1_Hx(x, y, p):
    d = 1.0 + p[1] * x
    return -p[0] * p[1] / (d * d) - p[2] * y


def _pp1_Hy(x, y, p):
    return -p[2] * x + 0.0 * y


PP1 = Family(
    "pp1", ("alpha", "kappa", "beta"), g=_one, dg=_zero, h=_ident, dh=_one,
    G=_G_diag, H=_pp1_H,
    G_x=_minus_one2, G_y=_one2, H_x=_pp1_Hx, H_y=_pp1_Hy,
)


# -- predator-prey II: p = (alpha, kappa, beta) ------------------------------
def _pp2_H(x, y, p):
    return p[0] / (1.0 + p[1] * x) - p[2] * y


def _pp2_Hx(x, y, p):
    d = 1.0 + p[1] * x
    return -p[0] * p[1] / (d * d) + 0.0 * y


def _pp2_Hy(x, y, p):
    return -p[2] + 0.0 * x + 0.0 * y


PP2 = Family(
    "pp2", ("alpha", "kappa", "beta"), g=_one, dg=_zero, h=_ident, dh=_one,
    G=_G_diag, H=_pp2_H,
    G_x=_minus_one2, G_y=_one2, H_x=_pp2_Hx, H_y=_pp2_Hy,
)


# -- predator-prey III: p = (alpha, gamma, delta, m) -------------------------
def _pp3_G(x, y, p):
    return p[2] * y - p[1] + 0.0 * x


def _pp3_Gy(x, y, p):
    return p[2] + 0.0 * x + 0.0 * y


def _pp3_H(x, y, p):
    return p[0] * (1.0 - y / p[3]) - p[0] * x


def _pp3_Hx(x, y, p):
    return -p[0] + 0.0 * x + 0.0 * y


def _pp3_Hy(x, y, p):
    return -p[0] / p[3] + 0.0 * x + 0.0 * y


PP3 = Family(
    "pp3", ("alpha", "gamma", "delta", "m"), g=_ident, dg=_one, h=_ident, dh=_one,
    G=_pp3_G, H=_pp3_H,
    G_x=_zero2, G_y=_pp3_Gy, H_x=_pp3_Hx, H_y=_pp3_Hy,
)


# -- catalog entries --------------------------------------------------------
@dataclass(frozen=True)
class ClosedForms:
    """Hand-derived reference data for cross-checking the numerics.

    ``consistent`` is False when the printed formulas disagree with the
    general construction; such forms are kept for the record only.
    """

    H: Optional[Callable] = None
    G: Optional[Callable] = None
    w: Optional[float] = None
    z: Optional[float] = None
    c: Optional[float] = None
    v: Optional[float] = None
    X: Optional[float] = None
    consistent: bool = True
    note: str = ""


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    description: str
    system: SystemDefinition
    closed_forms: Optional[ClosedForms]
    equilibrium_guess: tuple


DESCRIPTIONS = {
    "classical": "Newtonian self-gravitating particles (Smoluchowski-Poisson, radial static): a(x)=2-x, b=0",
    "relativistic": "Relativistic self-gravitating particles (TOV equation in Milne variables): (1-8 pi x)a=2-24 pi x, (1-8 pi x)b=8 pi",
    "pp1": "Predator-prey model I: H=alpha/(1+kappa x)-beta x y, G=y-x",
    "pp2": "Predator-prey model II: H=alpha/(1+kappa x)-beta y, G=y-x",
    "pp3": "Predator-prey model III with self-limited prey: x'=x(delta y-gamma), y'=alpha y(1-y/m-x)",
}

DEFAULTS = {
    "classical": {},
    "relativistic": {},
    "pp1": {"alpha": 6.0, "kappa": 2.0, "beta": 2.0},
    "pp2": {"alpha": 2.0, "kappa": 2.0, "beta": 2.0 / 3.0},
    "pp3": {"alpha": 1.0, "gamma": 1.0, "delta": 2.0},
}


def list_models():
    """``[(id, description), ...]`` for every shipped model."""
    return [(k, DESCRIPTIONS[k]) for k in DEFAULTS]


def _bisect(f, lo, hi, iters=200):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= 4e-16 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def _diag_equilibrium(H, hi=1e6):
    # G = y - x, so the interior equilibrium solves H(x, x) = 0, H decreasing
    return _bisect(lambda s: H(s, s), 0.0, hi)


def _classical(params):
    sys = SystemDefinition("classical", CLASSICAL, params, Domain(0.0, 8.0, 0.0, 12.0))
    cf = ClosedForms(
        H=lambda x: 0.5 * (np.asarray(x) - 2.0) ** 2,
        G=lambda y: np.asarray(y) - 2.0 - 2.0 * np.log(np.asarray(y) / 2.0),
        w=2.0, z=2.0, c=3.0, v=2.0,
        X=2.0 + 2.0 * math.sqrt(2.0 - math.log(3.0)),
    )
    return sys, cf, (2.0, 2.0)


def relativistic_closed_X():
    """Bound from ``16 pi X = 2 + W(-2^(1/3) e^(-4/3))``.

    The branch is the one whose value lands inside ``(w, 1/(8 pi))``.
    Returns ``(X, branch)``.
    """
    arg = -(2.0 ** (1.0 / 3.0)) * math.exp(-4.0 / 3.0)
    w = 1.0 / (16.0 * PI)
    for branch in ("principal", "lower"):
        X = (2.0 + lambert_w(branch, arg)) / (16.0 * PI)
        if w < X < 1.0 / (8.0 * PI):
            return X, branch
    raise ArithmeticError("no Lambert branch lands in (w, 1/(8 pi))")


def _relativistic(params):
    sys = SystemDefinition(
        "relativistic", RELATIVISTIC, params,
        Domain(0.0, 1.0 / (8.0 * PI) - REL_MARGIN, 0.0, 1.0),
    )
    k = 16.0 * PI
    cf = ClosedForms(
        H=lambda x: (-48.0 * PI * np.asarray(x) - 3.0 * np.log(1.0 - 8.0 * PI * np.asarray(x))
                     + 3.0 - 3.0 * math.log(2.0)) / k,
        G=lambda y: np.asarray(y) - (1.0 + np.log(k * np.asarray(y))) / k,
        w=1.0 / k, z=1.0 / k, c=3.0, v=1.0 / (24.0 * PI),
        X=relativistic_closed_X()[0],
    )
    return sys, cf, (1.0 / k, 1.0 / k)


def _check_positive(params, names):
    for n in names:
        if not (math.isfinite(params[n]) and params[n] > 0.0):
            raise InvalidParameters(f"parameter {n} must be positive and finite, got {params[n]!r}")


def _pp1(params):
    _check_positive(params, ("alpha", "kappa", "beta"))
    a, k, b = params["alpha"], params["kappa"], params["beta"]
    w = _diag_equilibrium(lambda x, y: a / (1 + k * x) - b * x * y)
    s = max(1.0, w)
    sys = SystemDefinition("pp1", PP1, params, Domain(0.0, 4.0 * s, 0.0, 8.0 * s))
    cf = None
    if params == DEFAULTS["pp1"]:
        roots = np.roots([14.0, 7.0, 0.0, -3.0])
        v = float(min(r.real for r in roots if abs(r.imag) < 1e-12 and r.real > 0))
        cf = ClosedForms(
            H=lambda x: np.asarray(x) ** 2 - 1.0 + 3.0 * math.log(3.0) - 3.0 * np.log(2.0 * np.asarray(x) + 1.0),
            G=lambda y: np.asarray(y) - np.log(np.asarray(y)) - 1.0,
            w=1.0, z=1.0, c=7.0, v=v,
        )
    return sys, cf, (w, w)


def _pp2(params):
    _check_positive(params, ("alpha", "kappa", "beta"))
    a, k, b = params["alpha"], params["kappa"], params["beta"]
    w = _diag_equilibrium(lambda x, y: a / (1 + k * x) - b * y)
    s = max(1.0, w)
    sys = SystemDefinition("pp2", PP2, params, Domain(0.0, 4.0 * s, 0.0, 4.0 * s))
    cf = None
    if params == DEFAULTS["pp2"]:
        cf = ClosedForms(
            H=lambda x: (2.0 * np.asarray(x) - 2.0 + 3.0 * math.log(3.0)
                         - 3.0 * np.log(2.0 * np.asarray(x) + 1.0)) / 3.0,
            G=lambda y: np.asarray(y) - np.log(np.asarray(y)) - 1.0,
            w=1.0, z=1.0, c=3.0, v=0.5,
            X=-1.5 * lambert_w("lower", -1.5 * math.exp(-1.5)) - 0.5,
        )
    return sys, cf, (w, w)


def _pp3(params):
    params = dict(params)
    _check_positive(params, ("alpha", "gamma", "delta"))
    a, g, d = params["alpha"], params["gamma"], params["delta"]
    if "m" not in params:
        if d <= g:
            raise InvalidParameters("pp3 needs delta > gamma when m is derived as 1/(delta/gamma - 1)")
        params["m"] = 1.0 / (d / g - 1.0)
    _check_positive(params, ("m",))
    m = params["m"]
    w, z = 1.0 - g / (m * d), g / d
    if w <= 0.0:
        raise InvalidParameters(f"pp3 interior equilibrium needs 1 - gamma/(m delta) > 0, got {w}")
    sys = SystemDefinition(
        "pp3", PP3, params, Domain(0.0, 4.0 * max(1.0, w), 0.0, 4.0 * max(1.0, z))
    )
    cf = ClosedForms(
        H=lambda x: a * np.asarray(x) / g + (a / (m * d) - a / g * np.log(np.asarray(x))),
        G=lambda y: np.asarray(y) - g / d * np.log(d * np.asarray(y) / g) - g / d,
        w=w, z=z,
        consistent=False,
        note="printed H-component does not vanish at w and differs from the "
             "construction H' = -H(x,z)/g(x); kept for reference only",
    )
    return sys, cf, (w, z)


_BUILDERS = {
    "classical": _classical,
    "relativistic": _relativistic,
    "pp1": _pp1,
    "pp2": _pp2,
    "pp3": _pp3,
}


def load_model(model_id: str, overrides=None) -> CatalogEntry:
    if model_id not in _BUILDERS:
        raise UnknownModel(f"unknown model {model_id!r}; choose from {sorted(_BUILDERS)}")
    params = dict(DEFAULTS[model_id])
    allowed = set(params) | ({"m"} if model_id == "pp3" else set())
    for k, val in (overrides or {}).items():
        if k not in allowed:
            raise InvalidParameters(f"{model_id} has no parameter {k!r} (allowed: {sorted(allowed)})")
        try:
            params[k] = float(val)
        except (TypeError, ValueError):
            raise InvalidParameters(f"parameter {k}={val!r} is not a number") from None
    sys, cf, guess = _BUILDERS[model_id](params)
    return CatalogEntry(model_id, DESCRIPTIONS[model_id], sys, cf, guess)


def load_config(source) -> CatalogEntry:
    """Model from a JSON config ``{"model": id, "parameters": {name: value}}``.

    ``source`` is a mapping, a JSON string or a path to a JSON file.
    """
    if isinstance(source, Mapping):
        cfg = dict(source)
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            with open(text, encoding="utf-8") as fh:
                text = fh.read()
        try:
            cfg = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidParameters(f"config is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict) or "model" not in cfg:
        raise InvalidParameters('config must be an object with a "model" key')
    extra = set(cfg) - {"model", "parameters"}
    if extra:
        raise InvalidParameters(f"unknown config keys: {sorted(extra)}")
    params = cfg.get("parameters") or {}
    if not isinstance(params, dict):
        raise InvalidParameters('"parameters" must be an object')
    return load_model(cfg["model"], params)
