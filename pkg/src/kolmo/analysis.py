"""The full analysis pipeline and its JSON report.

equilibria -> classification -> variant -> Lyapunov tables -> c -> v ->
hypothesis checks -> bound ``X``. Hypothesis failures are recorded as a
refusal with a witness; they never raise.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import bound as B
from . import catalog
from . import lyapunov as Ly
from .errors import DivisionByZero, NeitherVariant, NonpositiveDenominator, NoRoot
from .linearize import unstable_slope_c
from .system import find_equilibrium, make_equilibrium

SCHEMA_VERSION = 1

# statements about X made alongside the closed forms, checked when X exists
CLAIMS = {
    "classical": ("X < 4", lambda X: X < 4.0),
    "pp2": ("X = 1.75", lambda X: abs(X - 1.75) <= 1e-9),
}


@dataclass
class Analysis:
    entry: catalog.CatalogEntry
    origin: object = None
    interior: object = None
    variant: Optional[str] = None
    L: object = None
    c: Optional[float] = None
    v: Optional[float] = None
    hypotheses: Optional[B.HypothesisReport] = None
    bound: Optional[B.BoundResult] = None
    refusal: Optional[dict] = None
    notes: list = field(default_factory=list)
    runtimes: dict = field(default_factory=dict)

    @property
    def sys(self):
        return self.entry.system

    @property
    def refused(self):
        return self.refusal is not None

    def to_report(self) -> dict:
        e = self.entry
        eqs = []
        for role, eq in (("origin", self.origin), ("interior", self.interior)):
            if eq is not None:
                eqs.append({
                    "role": role,
                    "location": list(eq.location),
                    "kind": eq.kind,
                    "classification": eq.classification,
                    "linearization": eq.report.to_dict(),
                })
        rep = {
            "schema_version": SCHEMA_VERSION,
            "model": e.id,
            "description": e.description,
            "parameters": dict(self.sys.params),
            "domain": list(self.sys.domain),
            "equilibria": eqs,
            "variant": self.variant,
            "c": self.c,
            "v": self.v,
            "cv": None if self.c is None or self.v is None else self.c * self.v,
            "X": None if self.bound is None else self.bound.X,
            "bound": None if self.bound is None else self.bound.to_dict(),
            "claims": {},
            "refusal": self.refusal,
            "hypotheses": None if self.hypotheses is None else self.hypotheses.to_dict(),
            "notes": list(self.notes),
            "runtimes": dict(self.runtimes),
        }
        if self.bound is not None and e.id in CLAIMS:
            text, pred = CLAIMS[e.id]
            rep["claims"][text] = bool(pred(self.bound.X))
        return rep


class _Clock:
    def __init__(self, out):
        self.out = out

    def __call__(self, name):
        clock = self

        class _Ctx:
            def __enter__(self):
                self.t = time.perf_counter()

            def __exit__(self, *exc):
                clock.out[name] = time.perf_counter() - self.t

        return _Ctx()


def _refusal(reason, witness=None, failures=None):
    return {"reason": reason, "witness": witness, "failures": failures or []}


def analyze(model_id: str, overrides=None) -> Analysis:
    """Run the pipeline for a catalog model. Module errors other than
    hypothesis refusals propagate."""
    entry = catalog.load_model(model_id, overrides)
    a = Analysis(entry)
    sys = entry.system
    tick = _Clock(a.runtimes)

    with tick("equilibria"):
        a.origin = make_equilibrium(sys, (0.0, 0.0))
        a.interior = find_equilibrium(sys, entry.equilibrium_guess)
    w, z = a.interior.location

    with tick("variant"):
        try:
            a.variant = Ly.select_variant(sys, a.interior)
        except NeitherVariant as exc:
            a.refusal = _refusal(str(exc), list(exc.point))
            return a

    with tick("lyapunov"):
        try:
            a.L = Ly.build(sys, a.interior, a.variant)
        except NonpositiveDenominator as exc:
            a.refusal = _refusal(str(exc))
            return a

    with tick("slope"):
        try:
            a.c = unstable_slope_c(sys)
        except DivisionByZero as exc:
            a.notes.append(f"c undefined: {exc}")
        if a.c is not None:
            try:
                a.v = B.solve_v(sys, a.c, w)
            except NoRoot as exc:
                a.notes.append(f"v undefined: {exc}")

    with tick("hypotheses"):
        a.hypotheses = B.check_hypotheses(sys, a.L, a.c, a.v)
    if not a.hypotheses.all_pass:
        fails = [{"group": g, "name": ch.name, "witness": ch.witness, "detail": ch.detail}
                 for g in B.HypothesisReport.GROUPS for ch in getattr(a.hypotheses, g)
                 if not ch.passed and not ch.informational]
        names = ", ".join(f["name"] for f in fails)
        a.refusal = _refusal(f"hypotheses failed: {names}", fails[0]["witness"], fails)
        return a

    cf = entry.closed_forms
    cfx = cf.X if cf is not None and cf.consistent else None
    with tick("bound"):
        try:
            a.bound = B.heteroclinic_bound(sys, a.L, a.c, a.v, a.hypotheses, cfx)
        except NoRoot as exc:
            a.refusal = _refusal(str(exc), [a.c * a.v if a.c else None])
    return a


# -- JSON with 17 significant digits ----------------------------------------------
def _fmt(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or (isinstance(obj, float) and not math.isfinite(obj)):
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        s = f"{float(obj):.17g}"
        # keep integral values typed as floats after a parse
        return s if any(ch in s for ch in ".e") else s + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_fmt(str(k), indent, level + 1)}: {_fmt(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [_fmt(v, indent, level + 1) for v in obj]
        return "[" + ", ".join(items) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2) -> str:
    """JSON text with every float written to 17 significant digits; NaN and inf become null."""
    return _fmt(obj, indent, 0) + "\n"
