import json
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from floquet_qa import oracle
from floquet_qa.conditions import (
    Threshold,
    analyze,
    delta_or_inf,
    finite_time_bound,
    finite_time_condition,
    finite_time_domain_ok,
    floquet_condition,
    frequency_condition,
    overlap_lower_bound,
    traditional_condition,
)
from floquet_qa.errors import DegenerateQuasienergies, InvalidParameter
from floquet_qa.evolution import overlap_series
from floquet_qa.floquet import decompose
from floquet_qa.models import SchwingerRabiParams, build_schwinger_rabi, random_generic
from floquet_qa.propagator import monodromy
from floquet_qa.spectrum import coupling_profile


def sr(theta, omega, omega0=1.0):
    return build_schwinger_rabi(SchwingerRabiParams(omega0, theta, omega))


def parts(H):
    return coupling_profile(H), decompose(monodromy(H), H.omega)


def test_traditional_ratio():
    prof, _ = parts(sr(0.1, 1.0))
    assert traditional_condition(prof) == pytest.approx(0.04992, abs=5e-6)
    prof, _ = parts(sr(math.pi - 0.1, 20.0))
    assert traditional_condition(prof) == pytest.approx(0.99833, abs=5e-6)
    prof, _ = parts(sr(0.0, 1.0))
    assert traditional_condition(prof) == 0.0


def test_frequency_ratio():
    prof, _ = parts(sr(0.3, 0.01))
    assert frequency_condition(0.01, prof) == pytest.approx(0.01, abs=1e-12)
    prof, _ = parts(sr(math.pi - 0.1, 20.0))
    assert frequency_condition(20.0, prof) == pytest.approx(20.0)


def test_floquet_counterexample_point():
    fc = floquet_condition(*parts(sr(0.1, 1.0)), 2)
    assert fc.ratio == pytest.approx(0.71797, abs=5e-5)
    assert fc.delta == pytest.approx(0.25563, abs=5e-5)
    assert not fc.domain_violation


def test_floquet_adiabatic_point():
    p = SchwingerRabiParams(1.0, 0.01, 0.3)
    fc = floquet_condition(*parts(build_schwinger_rabi(p)), 2)
    assert fc.ratio == pytest.approx(0.0256, abs=5e-5)
    assert oracle.example1(p).exact_criterion == pytest.approx(9.2e-6, rel=1e-2)


def test_floquet_static_model():
    fc = floquet_condition(*parts(sr(0.0, 1.0)), 2)
    assert fc.ratio == 0.0 and fc.delta == 0.0


def test_floquet_resonance_raises_and_maps_to_inf():
    w1 = oracle.resonances(1.0, 0.3)[2]
    prof, d = parts(sr(0.3, w1))
    with pytest.raises(DegenerateQuasienergies):
        floquet_condition(prof, d, 2)
    assert delta_or_inf(prof, d, 2) == math.inf


def test_overlap_lower_bound():
    assert overlap_lower_bound(0.0) == 1.0
    assert overlap_lower_bound(0.05) == pytest.approx(0.89443, abs=5e-6)
    assert overlap_lower_bound(0.3) == 0.0
    with pytest.raises(InvalidParameter):
        overlap_lower_bound(-0.1)


def test_finite_time_example():
    p = SchwingerRabiParams(1.0, 0.1, 1.0)
    prof, _ = parts(build_schwinger_rabi(p))
    assert finite_time_condition(prof, 2, 1.0) == pytest.approx(0.03530, abs=5e-6)
    bound = finite_time_bound(prof.max_coupling, 2, 1.0)
    assert bound == pytest.approx(0.001246, abs=5e-7)
    assert 1 - oracle.example1(p).overlap(1.0) <= bound
    assert finite_time_bound(prof.max_coupling, 2, 0.0) == 0.0
    with pytest.raises(InvalidParameter):
        finite_time_condition(prof, 2, 0.0)


def test_finite_time_horizon_scale():
    # the condition reaches 1 at tau = sqrt(2) T / (pi sin theta)
    theta, omega = 0.4, 1.5
    prof, _ = parts(sr(theta, omega))
    T = 2 * math.pi / omega
    assert finite_time_condition(prof, 2, math.sqrt(2) * T / (math.pi * math.sin(theta))) == pytest.approx(1.0)


def test_threshold_validation():
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(InvalidParameter):
            Threshold(bad)


def test_analyze_counterexample_1():
    rep = analyze(sr(0.1, 1.0))
    assert rep.verdicts == {"traditional": True, "frequency": False, "floquet": False}
    assert rep.quasienergies == pytest.approx(oracle.example1(SchwingerRabiParams(1.0, 0.1, 1.0)).quasienergies_monodromy, abs=1e-9)


def test_analyze_counterexample_2():
    rep = analyze(sr(math.pi - 0.1, 20.0), evolve_periods=20)
    v = rep.verdicts
    assert not v["traditional"] and not v["frequency"] and v["exact"]
    assert rep.min_overlap == pytest.approx(0.99547, abs=1e-5)


def test_analyze_static_all_true():
    rep = analyze(sr(0.0, 0.01), evolve_periods=1)
    assert all(rep.verdicts.values())
    assert rep.delta == 0.0
    assert rep.bound_overlap == 1.0


def test_analyze_error_context():
    H = sr(0.3, oracle.resonances(1.0, 0.3)[1])
    with pytest.raises(DegenerateQuasienergies) as info:
        analyze(H)
    assert info.value.context["stage"] == "floquet"
    assert info.value.context["model"] == "schwinger_rabi"


def test_report_json_schema():
    rep = analyze(sr(0.2, 0.4))
    doc = json.loads(json.dumps(rep.to_json()))
    for key in ("params", "quasienergies", "max_coupling", "min_gap", "delta", "ratios", "verdicts", "bound_overlap"):
        assert key in doc
    assert set(doc["ratios"]) == {"traditional", "frequency", "floquet"}
    assert doc["params"] == {"model": "schwinger_rabi", "params": {"omega0": 1.0, "theta": 0.2, "omega": 0.4}}


def test_domain_violation_withholds_verdict():
    rep = analyze(sr(1.5, 2.0), thr=Threshold(0.9))
    assert rep.domain_violation
    assert rep.bound_overlap == 0.0
    assert rep.verdicts["floquet"] is False


@given(theta=st.floats(0.0, 3.1), omega=st.floats(0.05, 3.0))
def test_bound_sufficiency_twenty_periods(theta, omega):
    H = sr(theta, omega)
    prof, d = parts(H)
    delta = delta_or_inf(prof, d, 2)
    assume(delta < 0.25)
    dmin = overlap_series(H, 0, 0.0, 20 * H.period, samples_per_period=128).overlaps.min()
    assert dmin >= math.sqrt(1 - 4 * delta) - 1e-6


@given(seed=st.integers(0, 10**6), N=st.integers(2, 3), frac=st.floats(0.01, 1.0))
def test_finite_time_bound_property(seed, N, frac):
    rng = np.random.default_rng(seed)
    H = random_generic(rng, N, float(rng.uniform(1, 8)), 1.0, float(rng.uniform(0.01, 0.5)), 2)
    c = coupling_profile(H).max_coupling
    tau = frac * math.pi / 2 / (math.sqrt(N - 1) * c)
    assert finite_time_domain_ok(c, N, tau)
    d = overlap_series(H, 0, 0.0, tau, times=np.array([tau])).overlaps[0]
    assert 1 - d <= finite_time_bound(c, N, tau) + 1e-7
