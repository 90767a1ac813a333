import csv
import json
import math

import numpy as np
import pytest

from floquet_qa import oracle
from floquet_qa.errors import InvalidParameter
from floquet_qa.experiments import (
    Axis,
    SweepSpec,
    counterexamples,
    fig1,
    fig2,
    fig2_containment,
    run_sweep,
    worker_count,
)
from floquet_qa.models import SchwingerRabiParams
from floquet_qa.propagator import IntegratorConfig

FAST = IntegratorConfig(steps_per_period=1024)


def omega_sweep(points=256, quantities=("exact_population", "two_delta")):
    return SweepSpec(
        model="schwinger-rabi",
        params={"omega0": 1.0, "theta": 0.1},
        axes=[Axis("omega", 0.1, 3.0, points)],
        quantities=list(quantities),
        integrator=FAST,
    )


def test_axis_values():
    assert Axis("x", 0, 1, 3).values().tolist() == [0, 0.5, 1]
    assert Axis("x", 1, 100, 3, "log").values() == pytest.approx([1, 10, 100])
    for bad in (dict(points=1), dict(scale="cubic"), dict(scale="log", min=0.0)):
        with pytest.raises(InvalidParameter):
            Axis(**{"name": "x", "min": 0.0, "max": 1.0, "points": 4, **bad})


def test_spec_validation():
    with pytest.raises(InvalidParameter):
        SweepSpec(model="schwinger_rabi", axes=[])
    with pytest.raises(InvalidParameter):
        SweepSpec(model="schwinger_rabi", axes=[Axis("omega", 1, 2, 2)], quantities=["bogus"])
    with pytest.raises(InvalidParameter):
        SweepSpec(model="nope", axes=[Axis("omega", 1, 2, 2)])


def test_empty_quantities_smoke():
    spec = SweepSpec(
        model="schwinger_rabi",
        params={"omega0": 1.0},
        axes=[Axis("theta", 0.0, 1.0, 3), Axis("omega", 0.5, 1.5, 4)],
    )
    res = run_sweep(spec)
    assert len(res.rows) == 12
    assert res.columns == ["theta", "omega", "omega0"]
    # row-major: the last axis varies fastest
    assert [r["omega"] for r in res.rows[:4]] == pytest.approx([0.5, 0.8333333, 1.1666667, 1.5])
    assert res.rows[4]["theta"] == 0.5


def test_population_below_four_delta():
    res = run_sweep(omega_sweep())
    assert len(res.rows) == 256
    checked = 0
    for r in res.rows:
        p = SchwingerRabiParams(1.0, 0.1, r["omega"])
        assert r["exact_population_oracle"] == pytest.approx((r["omega"] * math.sin(0.1) / p.rabi) ** 2)
        if not r["error"] and r["delta"] < 0.25 and not r["domain_violation"]:
            assert r["exact_population_oracle"] <= r["four_delta"] + 1e-6
            checked += 1
    assert checked > 200


def test_resonance_row_carries_marker():
    w1 = oracle.resonances(1.0, 0.1)[1]
    assert w1 == pytest.approx(0.50251, abs=5e-6)
    spec = SweepSpec(
        model="schwinger_rabi",
        params={"omega0": 1.0, "theta": 0.1},
        quantities=["ratios"],
        points=[({"omega": 0.4}, {}), ({"omega": w1}, {}), ({"omega": 0.6}, {})],
    )
    rows = run_sweep(spec).rows
    assert [r["error"] for r in rows] == ["", "DegenerateQuasienergies", ""]
    assert rows[1]["gap_factor"] < 1e-12
    assert rows[1]["traditional_ratio"] is None


def test_resonance_mask():
    w1 = oracle.resonances(1.0, 0.1)[1]
    spec = SweepSpec(
        model="schwinger_rabi",
        params={"omega0": 1.0, "theta": 0.1},
        quantities=["exact_population", "ratios"],
        resonance_mask=True,
        points=[({"omega": w1}, {}), ({"omega": 0.6}, {})],
    )
    rows = run_sweep(spec).rows
    assert rows[0]["error"] == "ResonanceMasked"
    assert rows[0]["exact_population_oracle"] is not None
    assert rows[1]["error"] == ""


def test_invalid_point_is_recorded():
    spec = SweepSpec(
        model="schwinger_rabi",
        params={"omega0": 1.0, "omega": 1.0},
        axes=[Axis("theta", 3.0, 3.3, 2)],
        quantities=["ratios"],
        integrator=FAST,
    )
    rows = run_sweep(spec).rows
    assert rows[0]["error"] == ""
    assert rows[1]["error"] == "InvalidParameter"


def test_overlap_min_and_verdicts():
    spec = SweepSpec(
        model="schwinger_rabi",
        params={"omega0": 1.0, "theta": 0.3},
        axes=[Axis("omega", 0.2, 0.4, 3)],
        quantities=["overlap_min", "verdicts", "exact_population"],
        evolution_horizon=20,
        integrator=FAST,
    )
    res = run_sweep(spec)
    for r in res.rows:
        assert r["overlap_min"] == pytest.approx(r["overlap_min_oracle"], abs=1e-4)
        assert r["exact_population"] == pytest.approx(1 - r["overlap_min"] ** 2)
        assert r["verdict_exact"] == (1 - r["overlap_min"] <= 0.05)
        assert isinstance(r["verdict_exact_oracle"], bool)


def test_generic_sweep_uses_numeric_population():
    A0 = np.diag([0.5, -0.5])
    A1 = 0.05 * np.array([[0, 1], [1, 0]])
    params = {"N": 2, "coeffs": [{"k": 0, "A": A0.tolist()}, {"k": 1, "A": A1.tolist()}]}
    spec = SweepSpec(
        model="generic",
        params=params,
        axes=[Axis("T", 2.0, 4.0, 2)],
        quantities=["exact_population"],
        evolution_horizon=2,
        integrator=FAST,
    )
    res = run_sweep(spec)
    assert "exact_population" in res.columns and "exact_population_oracle" not in res.columns
    assert all(0 <= r["exact_population"] < 1 for r in res.rows)


def test_csv_deterministic_across_workers(tmp_path, monkeypatch):
    spec = omega_sweep(24, ("ratios", "two_delta", "exact_population", "verdicts"))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_sweep(spec, workers=1).to_csv(a)
    run_sweep(spec, workers=4).to_csv(b)
    assert a.read_bytes() == b.read_bytes()
    with open(a) as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    assert "exact_population_oracle" in header and "error" in header
    val = rows[1][header.index("omega")]
    assert float(val) == 0.1 and val == format(0.1, ".17g")


def test_metadata_and_json(tmp_path):
    spec = omega_sweep(4)
    res = run_sweep(spec)
    assert res.metadata["config_hash"] == omega_sweep(4).config_hash()
    assert res.metadata["config_hash"] != omega_sweep(5).config_hash()
    assert res.metadata["integrator"]["steps_per_period"] == 1024
    out = tmp_path / "r.json"
    res.to_json(out)
    doc = json.loads(out.read_text())
    assert len(doc["rows"]) == 4 and doc["metadata"]["rows"] == 4


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("FLOQUET_THREADS", "1")
    assert worker_count() == 1
    monkeypatch.setenv("FLOQUET_THREADS", "many")
    with pytest.raises(InvalidParameter):
        worker_count()


def test_fig1_values():
    res = fig1(thetas=[0.0, 0.1], omega_range=(1.0, 3.0), points=3, inset_points=0, cfg=FAST)
    rows = {(r["theta"], r["omega"], r["window"]): r for r in res.rows}
    r = rows[(0.1, 1.0, "main")]
    assert r["exact_population_oracle"] == pytest.approx(0.99750, abs=5e-6)
    assert r["two_delta"] == pytest.approx(0.5113, abs=5e-5)
    # Omega = sqrt(10 - 6 cos 0.1) = 2.00748
    r = rows[(0.1, 3.0, "main")]
    assert r["exact_population_oracle"] == pytest.approx(0.022258, abs=5e-7)
    for (th, _, win), r in rows.items():
        if th == 0.0 and win == "main":
            assert r["exact_population_oracle"] == 0.0 and r["two_delta"] == 0.0
    assert {"window", "resonance_k", "omega_over_omega0"} <= set(res.columns)


def test_fig1_resonance_rows():
    res = fig1(thetas=[0.1], points=4, inset_points=4)
    windows = [r["window"] for r in res.rows]
    assert windows.count("inset") == 4
    true_rows = [r for r in res.rows if r["window"] == "resonance"]
    assert true_rows and all(r["error"] == "DegenerateQuasienergies" for r in true_rows)
    assert all(r["gap_factor"] < 1e-3 for r in true_rows)


def test_fig2_default_grid_and_containment():
    res = fig2()
    assert len(res.rows) == 40000
    c = fig2_containment(res)
    assert c["floquet_not_exact"] == 0 and c["frequency_not_exact"] == 0
    assert c["traditional_not_exact"] >= 1 and c["exact_not_traditional"] >= 1
    # exact is a theta-only criterion
    by_theta = {}
    for r in res.rows:
        by_theta.setdefault(r["theta"], set()).add(r["exact"])
    for th, vals in by_theta.items():
        assert len(vals) == 1
        if math.sin(th) ** 2 / 2 > 0.05:
            assert vals == {False}


def test_fig2_closed_matches_numeric():
    th = Axis("theta", 0.05, 1.2, 4)
    om = Axis("omega", 0.15, 2.7, 4)
    closed = fig2(th, om, method="closed").rows
    numeric = fig2(th, om, method="numeric", cfg=IntegratorConfig(steps_per_period=2048)).rows
    for a, b in zip(closed, numeric):
        assert (a["theta"], a["omega"]) == (b["theta"], b["omega"])
        assert b["error"] == ""
        for k in ("exact", "traditional", "frequency", "floquet"):
            assert a[k] == b[k]
        assert b["gap_factor"] == pytest.approx(a["gap_factor"], abs=1e-8)
        # near a crossing the ratios scale like 1 / gap_factor, so compare them relative to that
        rel = 1e-6 / max(a["gap_factor"], 1e-6)
        for k in ("traditional_ratio", "frequency_ratio", "floquet_ratio", "delta"):
            assert b[k] == pytest.approx(a[k], rel=rel, abs=1e-9)


def test_fig2_method_validation():
    with pytest.raises(InvalidParameter):
        fig2(Axis("theta", 0, 1, 2), Axis("omega", 0.1, 1, 2), method="magic")


def test_counterexample_table():
    rows = {r["name"]: r for r in counterexamples()}
    r1, r2 = rows["counterexample_1"], rows["counterexample_2"]
    assert r1["verdict_traditional"] and not r1["adiabatic"] and not r1["verdict_floquet"]
    assert r1["floquet_ratio"] == pytest.approx(0.718, abs=5e-4)
    assert r1["min_overlap"] == pytest.approx(0.04998, abs=1e-4)
    assert not r2["verdict_traditional"] and r2["adiabatic"]
    assert r2["min_overlap"] == pytest.approx(0.99547, abs=1e-5)
