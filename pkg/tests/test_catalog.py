import math

import numpy as np
import pytest

from kolmo import catalog
from kolmo.errors import InvalidParameters, UnknownModel
from kolmo.system import find_equilibrium

from conftest import MODELS

PI = math.pi


def test_list_models_has_five_round_tripping_entries():
    models = catalog.list_models()
    assert len(models) == 5
    for mid, desc in models:
        assert catalog.load_model(mid).id == mid
        assert desc


def test_pp1_defaults():
    e = catalog.load_model("pp1")
    s = e.system
    assert s.H(0.0, 0.0) == 6.0
    assert s.G(0.0, 0.0) == 0.0
    np.testing.assert_allclose(find_equilibrium(s, e.equilibrium_guess).location, (1, 1), atol=1e-12)


def test_classical_closed_forms():
    cf = catalog.load_model("classical").closed_forms
    x = np.linspace(0.5, 5, 7)
    np.testing.assert_allclose(2 * cf.H(x), (x - 2) ** 2)
    y = np.array([0.5, 2.0, 7.0])
    np.testing.assert_allclose(cf.G(y), y - 2 - 2 * np.log(y / 2))


def test_relativistic_closed_form():
    cf = catalog.load_model("relativistic").closed_forms
    x = np.array([0.001, 0.01, 0.03])
    want = (-48 * PI * x - 3 * np.log(1 - 8 * PI * x) + 3 - 3 * math.log(2)) / (16 * PI)
    np.testing.assert_allclose(cf.H(x), want, rtol=1e-14)


@pytest.mark.parametrize("m", MODELS)
def test_closed_forms_vanish_at_anchors(m):
    cf = catalog.load_model(m).closed_forms
    if cf is None or not cf.consistent:
        pytest.skip("no consistent closed form")
    assert abs(float(cf.H(cf.w))) <= 1e-12
    assert abs(float(cf.G(cf.z))) <= 1e-12


def test_pp3_printed_form_is_flagged():
    cf = catalog.load_model("pp3").closed_forms
    assert cf.consistent is False
    assert abs(float(cf.H(cf.w))) > 1e-6


def test_relativistic_equilibrium_residual():
    e = catalog.load_model("relativistic")
    s = e.system
    w = 1 / (16 * PI)
    assert abs(s.G(w, w)) <= 1e-12 and abs(s.H(w, w)) <= 1e-12
    assert s.domain.x_hi == pytest.approx(1 / (8 * PI) - 1e-9, abs=0)


def test_relativistic_lambert_branch_is_principal():
    X, branch = catalog.relativistic_closed_X()
    assert branch == "principal"
    assert 1 / (16 * PI) < X < 1 / (8 * PI)


def test_pp1_closed_v_solves_cubic():
    v = catalog.load_model("pp1").closed_forms.v
    assert abs(3 - 7 * v * v * (1 + 2 * v)) <= 1e-12


def test_overrides():
    s = catalog.load_model("pp2", {"alpha": 3}).system
    assert s.params["alpha"] == 3.0
    assert catalog.load_model("pp2", {"alpha": 3}).closed_forms is None


def test_pp3_m_derived_and_overridable():
    assert catalog.load_model("pp3").system.params["m"] == pytest.approx(1.0)
    assert catalog.load_model("pp3", {"gamma": 1, "delta": 3}).system.params["m"] == pytest.approx(0.5)
    assert catalog.load_model("pp3", {"m": 2.0}).system.params["m"] == 2.0


@pytest.mark.parametrize("m,over", [
    ("pp1", {"alpha": -1}),
    ("pp2", {"beta": 0}),
    ("pp2", {"gamma": 1}),
    ("classical", {"alpha": 1}),
    ("pp3", {"delta": 0.5}),
    ("pp3", {"m": 0.4}),
    ("pp1", {"kappa": "abc"}),
    ("pp1", {"kappa": float("nan")}),
])
def test_invalid_parameters(m, over):
    with pytest.raises(InvalidParameters):
        catalog.load_model(m, over)


def test_unknown_model():
    with pytest.raises(UnknownModel):
        catalog.load_model("lotka")


def test_load_config(tmp_path):
    e = catalog.load_config({"model": "pp1", "parameters": {"alpha": 5}})
    assert e.system.params["alpha"] == 5.0
    p = tmp_path / "m.json"
    p.write_text('{"model": "pp2"}')
    assert catalog.load_config(str(p)).id == "pp2"
    with pytest.raises(InvalidParameters):
        catalog.load_config({"parameters": {}})
    with pytest.raises(InvalidParameters):
        catalog.load_config('{"model": "pp2", "extra": 1}')
    with pytest.raises(InvalidParameters):
        catalog.load_config("{not json")
