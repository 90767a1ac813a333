import json
import logging
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from floquet_qa.errors import InvalidParameter
from floquet_qa.models import (
    SIGMA_X,
    SIGMA_Z,
    SchwingerRabiParams,
    TwoToneParams,
    build_dual,
    build_generic,
    build_schwinger_rabi,
    build_two_tone,
    load_model,
    model_from_config,
    random_generic,
)

SIGMA_Y = np.array([[0, -1j], [1j, 0]])


def all_models():
    rng = np.random.default_rng(7)
    sr = build_schwinger_rabi(SchwingerRabiParams(1.0, 0.7, 1.3))
    return {
        "schwinger_rabi": sr,
        "dual": build_dual(sr),
        "two_tone": build_two_tone(TwoToneParams(1.0, 0.05, 0.002, 1.0, 3)),
        "two_tone_truncated": build_two_tone(TwoToneParams(1.0, 0.05, 0.002, 1.0, 3), truncated=True),
        "generic3": random_generic(rng, 3, 4.0, 1.0, 0.3, 2),
    }


MODELS = all_models()


def test_sr_theta_zero_is_static():
    H = build_schwinger_rabi(SchwingerRabiParams(1.0, 0.0, 1.0))
    for t in (0.0, 0.3, 17.2):
        assert np.allclose(H.evaluate(t), np.diag([0.5, -0.5]), atol=1e-15)


def test_sr_matrix_elements():
    H = build_schwinger_rabi(SchwingerRabiParams(1.0, math.pi / 2, 1.0))
    assert np.allclose(H.evaluate(0.0), [[0, 0.5], [0.5, 0]], atol=1e-15)

    H = build_schwinger_rabi(SchwingerRabiParams(1.0, math.pi / 3, 2.0))
    m = H.evaluate(math.pi / 4)
    assert m[0, 0].real == pytest.approx(0.25)
    assert m[0, 1] == pytest.approx(0.4330127 * np.exp(-0.5j * math.pi), abs=1e-7)
    assert m[1, 0] == pytest.approx(0.4330127 * np.exp(0.5j * math.pi), abs=1e-7)
    assert H.period == pytest.approx(math.pi)


@pytest.mark.parametrize(
    "kw",
    [
        dict(omega0=1, theta=math.pi, omega=1),
        dict(omega0=1, theta=-0.1, omega=1),
        dict(omega0=0, theta=0.1, omega=1),
        dict(omega0=1, theta=0.1, omega=-2),
        dict(omega0=1, theta=0.1, omega=float("nan")),
    ],
)
def test_sr_rejects_bad_params(kw):
    with pytest.raises(InvalidParameter):
        SchwingerRabiParams(**kw)


@pytest.mark.parametrize("name", sorted(MODELS))
def test_hermitian_and_periodic(name):
    H = MODELS[name]
    ts = np.random.default_rng(3).uniform(0, 5 * H.period, 256)
    a = H.evaluate(ts)
    scale = max(1.0, np.abs(a).max())
    assert np.abs(a - np.conj(np.swapaxes(a, 1, 2))).max() <= 1e-12 * scale
    # the dual is realised by numerical propagation, so periodicity is only as good as the integrator
    tol = 1e-8 if name == "dual" else 1e-12
    assert np.abs(H.evaluate(ts + H.period) - a).max() <= tol * scale


@pytest.mark.parametrize("name", sorted(MODELS))
def test_derivative_matches_central_difference(name):
    H = MODELS[name]
    h = H.period * 1e-6
    ts = np.random.default_rng(4).uniform(0, H.period, 32)
    d = H.derivative(ts)
    fd = (H.evaluate(ts + h) - H.evaluate(ts - h)) / (2 * h)
    assert np.abs(d - fd).max() <= 1e-6 * (1 + np.abs(d).max())


def test_dual_theta_zero_is_minus_h():
    H = build_dual(build_schwinger_rabi(SchwingerRabiParams(1.0, 0.0, 1.0)))
    for t in (0.0, 1.0, 4.5):
        assert np.allclose(H.evaluate(t), np.diag([-0.5, 0.5]), atol=1e-12)


def test_dual_period_and_spectrum():
    H = build_dual(build_schwinger_rabi(SchwingerRabiParams(1.0, math.pi / 3, 1.0)))
    assert H.period == pytest.approx(2 * math.pi)
    ts = np.linspace(0, 3 * H.period, 64)
    assert np.abs(H.evaluate(ts + H.period) - H.evaluate(ts)).max() < 1e-8
    w = np.linalg.eigvalsh(H.evaluate(ts))
    assert np.abs(w - [-0.5, 0.5]).max() < 1e-8


def test_dual_needs_period_for_other_bases():
    base = random_generic(np.random.default_rng(0), 2, 3.0)
    with pytest.raises(InvalidParameter):
        build_dual(base)
    assert build_dual(base, period=3.0).period == 3.0


def test_two_tone_examples():
    p = TwoToneParams(1.0, 0.05, 0.0, 1.0, 3)
    H = build_two_tone(p)
    assert np.allclose(H.evaluate(0.0), [[-0.5, -0.05], [-0.05, 0.5]])
    assert H.period == pytest.approx(6 * math.pi)
    Ht = build_two_tone(p, truncated=True)
    assert Ht.period == pytest.approx(2 * math.pi)
    assert np.allclose(Ht.evaluate(math.pi / 2), np.diag([-0.5, 0.5]), atol=1e-15)


def test_two_tone_regime_warning(caplog):
    with caplog.at_level(logging.WARNING, logger="floquet_qa.models"):
        TwoToneParams(1.0, 0.5, 0.0, 1.0, 2)
    assert "outside" in caplog.text
    caplog.clear()
    with caplog.at_level(logging.WARNING, logger="floquet_qa.models"):
        TwoToneParams(1.0, 0.02, 0.001, 1.0, 40)
    assert caplog.text == ""


@pytest.mark.parametrize("kw", [dict(V=0.0), dict(Vprime=-1e-3), dict(N_tone=0), dict(N_tone=2.5), dict(omega=0.0)])
def test_two_tone_rejects(kw):
    base = dict(omega0=1.0, V=0.02, Vprime=0.0, omega=1.0, N_tone=4)
    with pytest.raises(InvalidParameter):
        TwoToneParams(**{**base, **kw})


def test_generic_static():
    H = build_generic(2, 1.7, [(0, np.diag([1.0, -1.0]) / 2, None)])
    assert np.allclose(H.evaluate(np.linspace(0, 9, 5)), np.diag([0.5, -0.5]))
    assert np.allclose(H.derivative(0.4), 0)


def test_generic_reproduces_schwinger_rabi():
    w0, th, w = 1.3, 0.8, 0.9
    half = w0 / 2
    coeffs = [
        (0, half * math.cos(th) * SIGMA_Z, None),
        (1, half * math.sin(th) * SIGMA_X, half * math.sin(th) * SIGMA_Y),
    ]
    G = build_generic(2, 2 * math.pi / w, coeffs)
    H = build_schwinger_rabi(SchwingerRabiParams(w0, th, w))
    ts = np.random.default_rng(5).uniform(-20, 20, 100)
    assert np.abs(G.evaluate(ts) - H.evaluate(ts)).max() <= 1e-14
    assert np.abs(G.derivative(ts) - H.derivative(ts)).max() <= 1e-13


def test_generic_rejects_non_hermitian():
    with pytest.raises(InvalidParameter):
        build_generic(2, 1.0, [(0, np.eye(2), None), (1, np.array([[0, 1], [0, 0]]), None)])
    with pytest.raises(InvalidParameter):
        build_generic(2, 1.0, [(0, np.eye(3), None)])
    with pytest.raises(InvalidParameter):
        build_generic(2, 1.0, [(-1, np.eye(2), None)])


@pytest.mark.parametrize("name", ["schwinger_rabi", "two_tone", "two_tone_truncated", "generic3"])
def test_config_roundtrip(name, tmp_path):
    H = MODELS[name]
    path = tmp_path / "model.json"
    path.write_text(json.dumps(H.to_config()))
    H2 = load_model(path)
    ts = np.linspace(0, H.period, 17)
    assert H2.period == H.period
    assert np.array_equal(H2.evaluate(ts), H.evaluate(ts))


def test_config_accepts_hyphenated_ids():
    H = model_from_config({"model": "schwinger-rabi", "params": {"omega0": 1, "theta": 0.2, "omega": 2}})
    assert H.label == "schwinger_rabi"


@pytest.mark.parametrize(
    "conf",
    [
        {"model": "nope", "params": {}},
        {"params": {}},
        {"model": "schwinger_rabi", "params": {"omega0": 1}},
        {"model": "schwinger_rabi", "params": {"omega0": 1, "theta": 0.1, "omega": 1, "extra": 2}},
        {"model": "generic", "params": {"N": 2}},
    ],
)
def test_config_errors(conf):
    with pytest.raises(InvalidParameter):
        model_from_config(conf)


@given(
    theta=st.floats(0, math.pi, exclude_max=True),
    omega=st.floats(0.05, 5),
    t=st.floats(-100, 100),
)
def test_sr_spectrum_is_fixed(theta, omega, t):
    H = build_schwinger_rabi(SchwingerRabiParams(1.0, theta, omega))
    assert np.allclose(np.linalg.eigvalsh(H.evaluate(t)), [-0.5, 0.5], atol=1e-14)
