"""Parameter sweeps and the figure / counterexample pipelines.

Rows come back in row-major grid order whatever the worker count, and the
CSV writer uses a fixed float format, so a given spec always produces the
same bytes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from itertools import product
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from . import oracle
from .conditions import Threshold, analyze
from .errors import DegenerateQuasienergies, FloquetQAError, InvalidParameter
from .evolution import overlap_series
from .models import SchwingerRabiParams, model_from_config, normalize_model_id
from .propagator import IntegratorConfig

QUANTITIES = ("exact_population", "two_delta", "ratios", "verdicts", "overlap_min")

_RATIO_COLUMNS = [
    "traditional_ratio",
    "frequency_ratio",
    "floquet_ratio",
    "delta",
    "gap_factor",
    "max_coupling",
    "min_gap",
    "domain_violation",
]


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.points < 2:
            raise InvalidParameter("an axis needs at least 2 points", axis=self.name)
        if self.scale not in ("linear", "log"):
            raise InvalidParameter("axis scale must be linear or log", axis=self.name)
        if self.scale == "log" and not (self.min > 0 and self.max > 0):
            raise InvalidParameter("log axis needs positive bounds", axis=self.name)

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.points)
        return np.linspace(self.min, self.max, self.points)


@dataclass
class SweepSpec:
    model: str
    params: dict = field(default_factory=dict)
    axes: list[Axis] = field(default_factory=list)
    quantities: list[str] = field(default_factory=list)
    evolution_horizon: int = 20
    resonance_mask: bool = False
    delta_T: float = 0.05
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    profile_points: int = 2048
    # explicit grid: list of (params, labels); replaces the axes product
    points: list[tuple[dict, dict]] | None = None

    def __post_init__(self):
        self.model = normalize_model_id(self.model)
        if not 1 <= len(self.axes) <= 2 and self.points is None:
            raise InvalidParameter("a sweep needs 1 or 2 axes")
        unknown = set(self.quantities) - set(QUANTITIES)
        if unknown:
            raise InvalidParameter(f"unknown quantities {sorted(unknown)}")
        Threshold(self.delta_T)

    def grid(self) -> list[tuple[dict, dict]]:
        if self.points is not None:
            return list(self.points)
        names = [a.name for a in self.axes]
        return [(dict(zip(names, map(float, vals))), {}) for vals in product(*(a.values() for a in self.axes))]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["integrator"] = asdict(self.integrator)
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=float)
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class SweepResult:
    columns: list[str]
    rows: list[dict]
    metadata: dict

    def column(self, name: str) -> list:
        return [r.get(name) for r in self.rows]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.columns)
            for r in self.rows:
                w.writerow([_fmt(r.get(c)) for c in self.columns])

    def to_json(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            json.dump({"metadata": self.metadata, "columns": self.columns, "rows": self.rows}, fh, indent=1, default=_json_default)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _json_default(x):
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(type(x).__name__)


def worker_count() -> int:
    cap = os.environ.get("FLOQUET_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError as exc:
            raise InvalidParameter("FLOQUET_THREADS must be an integer", value=cap) from exc
    return n


def _closed_form(model: str, params: dict):
    if model not in ("schwinger_rabi", "dual"):
        return None
    p = SchwingerRabiParams(**{k: params[k] for k in ("omega0", "theta", "omega")})
    return oracle.example1(p) if model == "schwinger_rabi" else oracle.example2(p)


def _is_resonant(model: str, params: dict, tol: float = 1e-9) -> bool:
    closed = _closed_form(model, params)
    if closed is None:
        return False
    p = closed.params
    if model == "schwinger_rabi":
        return abs(math.sin(math.pi * closed.Omega / p.omega)) < tol and math.sin(p.theta) != 0
    return closed.Omega > 0 and abs(math.sin(math.pi * p.omega / closed.Omega)) < tol and math.sin(p.theta) != 0


def _columns(spec: SweepSpec, sample: tuple[dict, dict]) -> list[str]:
    params, labels = sample
    cols = list(params) + [k for k in spec.params if k not in params] + list(labels)
    q = spec.quantities
    oracle_ok = spec.model in ("schwinger_rabi", "dual")
    if "ratios" in q or "two_delta" in q:
        cols += _RATIO_COLUMNS if "ratios" in q else ["delta", "gap_factor", "domain_violation"]
    if "two_delta" in q:
        cols += ["two_delta", "four_delta", "bound_overlap"]
    if "verdicts" in q:
        cols += ["verdict_traditional", "verdict_frequency", "verdict_floquet"]
        if oracle_ok:
            cols.append("verdict_exact_oracle")
        if "overlap_min" in q:
            cols.append("verdict_exact")
    if "exact_population" in q:
        if oracle_ok:
            cols.append("exact_population_oracle")
        if "overlap_min" in q or not oracle_ok:
            cols.append("exact_population")
    if "overlap_min" in q:
        cols.append("overlap_min")
        if oracle_ok:
            cols.append("overlap_min_oracle")
    if q:
        cols += ["error", "error_detail"]
    return list(dict.fromkeys(cols))


def _evaluate_point(spec: SweepSpec, sample: tuple[dict, dict]) -> dict:
    point, labels = sample
    params = {**spec.params, **point}
    row: dict[str, Any] = {**params, **labels}
    q = set(spec.quantities)
    if not q:
        return row
    row["error"] = ""
    row["error_detail"] = ""
    thr = Threshold(spec.delta_T)
    try:
        closed = _closed_form(spec.model, params)
    except FloquetQAError as exc:
        row["error"], row["error_detail"] = type(exc).__name__, str(exc)
        return row
    if closed is not None:
        if "exact_population" in q:
            row["exact_population_oracle"] = closed.max_population
        if "overlap_min" in q:
            row["overlap_min_oracle"] = closed.min_overlap
        if "verdicts" in q:
            row["verdict_exact_oracle"] = closed.exact_criterion <= thr.delta_T
    if spec.resonance_mask and _is_resonant(spec.model, params):
        row["error"] = "ResonanceMasked"
        return row
    try:
        H = model_from_config({"model": spec.model, "params": params}, spec.integrator)
        if q & {"ratios", "two_delta", "verdicts"}:
            try:
                rep = analyze(H, cfg=spec.integrator, thr=thr, profile_points=spec.profile_points)
            except DegenerateQuasienergies as exc:
                row["gap_factor"] = exc.context.get("gap_factor")
                raise
            row.update(
                traditional_ratio=rep.traditional_ratio,
                frequency_ratio=rep.frequency_ratio,
                floquet_ratio=rep.floquet_ratio,
                delta=rep.delta,
                gap_factor=rep.gap_factor,
                max_coupling=rep.max_coupling,
                min_gap=rep.min_gap,
                domain_violation=rep.domain_violation,
                two_delta=2 * rep.delta,
                four_delta=4 * rep.delta,
                bound_overlap=rep.bound_overlap,
            )
            v = rep.verdicts
            row.update(
                verdict_traditional=v["traditional"], verdict_frequency=v["frequency"], verdict_floquet=v["floquet"]
            )
        if "overlap_min" in q or ("exact_population" in q and closed is None):
            series = overlap_series(H, 0, 0.0, spec.evolution_horizon * H.period, spec.integrator)
            dmin = float(series.overlaps.min())
            row["overlap_min"] = dmin
            row["exact_population"] = 1 - dmin * dmin
            row["verdict_exact"] = 1 - dmin <= thr.delta_T
    except FloquetQAError as exc:
        row["error"], row["error_detail"] = type(exc).__name__, str(exc)
    return row


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Evaluate every grid point; per-point failures are recorded in the row."""
    grid = spec.grid()
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda s: _evaluate_point(spec, s), grid))
    else:
        rows = [_evaluate_point(spec, s) for s in grid]
    columns = _columns(spec, grid[0]) if grid else []
    for r in rows:
        for c in columns:
            r.setdefault(c, None)
    return SweepResult(columns=columns, rows=rows, metadata=_metadata(spec, len(rows)))


def _metadata(spec: SweepSpec, n: int) -> dict:
    return {
        "config_hash": spec.config_hash(),
        "integrator": asdict(spec.integrator),
        "model": spec.model,
        "rows": n,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


# ---------------------------------------------------------------------------
# Figure 1: excited population vs 2 delta for the Schwinger-Rabi model

FIG1_THETAS = (0.05, 0.1, 0.2)
FIG1_RANGE = (0.1, 3.0)
FIG1_INSET = (0.8, 1.2)


def fig1_spec(
    thetas: Iterable[float] = FIG1_THETAS,
    omega_range: tuple[float, float] = FIG1_RANGE,
    points: int = 256,
    inset_points: int = 64,
    omega0: float = 1.0,
    k_max: int = oracle.DEFAULT_K_MAX,
    cfg: IntegratorConfig | None = None,
    quantities: Iterable[str] = ("exact_population", "two_delta", "ratios"),
) -> SweepSpec:
    """Main grid, inset window and resonance rows for every ``theta``.

    Resonance rows come in two flavours: ``resonance`` (true quasienergy
    crossings) and ``resonance_reference`` (the reference closed form).
    """
    lo, hi = omega_range
    pts: list[tuple[dict, dict]] = []
    for th in thetas:
        for w in np.linspace(lo, hi, points):
            pts.append(({"theta": float(th), "omega": float(w * omega0)}, {"window": "main", "resonance_k": None}))
        if inset_points:
            for w in np.linspace(*FIG1_INSET, inset_points):
                pts.append(({"theta": float(th), "omega": float(w * omega0)}, {"window": "inset", "resonance_k": None}))
        for tag, table in (
            ("resonance", oracle.resonances(omega0, th, k_max)),
            ("resonance_reference", oracle.resonances_reference(omega0, th, k_max)),
        ):
            for k, w in table.items():
                if lo * omega0 <= w <= hi * omega0:
                    pts.append(({"theta": float(th), "omega": float(w)}, {"window": tag, "resonance_k": k}))
    for p, _ in pts:
        p["omega_over_omega0"] = p["omega"] / omega0
    return SweepSpec(
        model="schwinger_rabi",
        params={"omega0": omega0},
        quantities=list(quantities),
        integrator=cfg or IntegratorConfig(),
        points=pts,
    )


def fig1(thetas=FIG1_THETAS, omega_range=FIG1_RANGE, points: int = 256, **kw) -> SweepResult:
    spec = fig1_spec(thetas, omega_range, points, **kw)
    # omega_over_omega0 is a label, not a model parameter
    grid = [({k: v for k, v in p.items() if k != "omega_over_omega0"}, {"omega_over_omega0": p["omega_over_omega0"], **lab}) for p, lab in spec.points]
    spec.points = grid
    return run_sweep(spec)


# ---------------------------------------------------------------------------
# Figure 2: condition regions for the dual model

FIG2_THETA = Axis("theta", 0.0, math.pi / 2, 200)
FIG2_OMEGA = Axis("omega", 0.01, 3.0, 200)
FIG2_COLUMNS = [
    "theta",
    "omega",
    "exact",
    "traditional",
    "frequency",
    "floquet",
    "exact_ratio",
    "traditional_ratio",
    "frequency_ratio",
    "floquet_ratio",
    "delta",
    "gap_factor",
    "domain_violation",
    "error",
]


def fig2(
    theta_axis: Axis = FIG2_THETA,
    omega_axis: Axis = FIG2_OMEGA,
    delta_T: float = 0.05,
    omega0: float = 1.0,
    method: str = "closed",
    cfg: IntegratorConfig | None = None,
) -> SweepResult:
    """Region membership per grid point, one row per point (theta-major).

    ``method="closed"`` uses the dual-model identities from :mod:`oracle`;
    ``method="numeric"`` runs the full pipeline on the numerically built
    dual Hamiltonian at every point (slow; meant for spot checks).
    """
    thr = Threshold(delta_T)
    th, w = np.meshgrid(theta_axis.values(), omega_axis.values() * omega0, indexing="ij")
    th, w = th.ravel(), w.ravel()
    spec_dict = {
        "theta_axis": asdict(theta_axis),
        "omega_axis": asdict(omega_axis),
        "delta_T": delta_T,
        "omega0": omega0,
        "method": method,
        "integrator": asdict(cfg or IntegratorConfig()),
    }
    meta = {
        "config_hash": hashlib.sha256(json.dumps(spec_dict, sort_keys=True).encode()).hexdigest(),
        "method": method,
        "model": "dual",
        "rows": int(th.size),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    rows = []
    if method == "closed":
        r = oracle.example2_ratios(th, w, omega0)
        for k in range(th.size):
            degenerate = bool(r["degenerate"][k])
            rows.append(
                {
                    "theta": float(th[k]),
                    "omega": float(w[k]),
                    "exact": bool(r["exact"][k] <= thr.delta_T),
                    "traditional": bool(r["traditional"][k] <= thr.delta_T),
                    "frequency": bool(r["frequency"][k] <= thr.delta_T),
                    "floquet": bool(r["floquet"][k] <= thr.delta_T and not r["domain_violation"][k]),
                    "exact_ratio": float(r["exact"][k]),
                    "traditional_ratio": float(r["traditional"][k]),
                    "frequency_ratio": float(r["frequency"][k]),
                    "floquet_ratio": float(r["floquet"][k]),
                    "delta": float(r["delta"][k]),
                    "gap_factor": float(r["gap_factor"][k]),
                    "domain_violation": bool(r["domain_violation"][k]),
                    "error": "DegenerateQuasienergies" if degenerate else "",
                }
            )
    elif method == "numeric":
        spec = SweepSpec(
            model="dual",
            params={"omega0": omega0},
            quantities=["ratios", "verdicts"],
            delta_T=delta_T,
            integrator=cfg or IntegratorConfig(),
            points=[({"theta": float(a), "omega": float(b)}, {}) for a, b in zip(th, w)],
        )
        for src in run_sweep(spec).rows:
            p = SchwingerRabiParams(omega0, src["theta"], src["omega"])
            exact_ratio = oracle.example2(p).exact_criterion
            failed = bool(src["error"])
            rows.append(
                {
                    "theta": src["theta"],
                    "omega": src["omega"],
                    "exact": exact_ratio <= thr.delta_T,
                    "traditional": None if failed else src["verdict_traditional"],
                    "frequency": None if failed else src["verdict_frequency"],
                    "floquet": False if failed else src["verdict_floquet"],
                    "exact_ratio": exact_ratio,
                    "traditional_ratio": src["traditional_ratio"],
                    "frequency_ratio": src["frequency_ratio"],
                    "floquet_ratio": src["floquet_ratio"],
                    "delta": src["delta"],
                    "gap_factor": src["gap_factor"],
                    "domain_violation": src["domain_violation"],
                    "error": src["error"],
                }
            )
    else:
        raise InvalidParameter("method must be 'closed' or 'numeric'", method=method)
    return SweepResult(columns=list(FIG2_COLUMNS), rows=rows, metadata=meta)


def fig2_containment(result: SweepResult) -> dict[str, int]:
    """Counts of points inside one region but outside another."""
    out = {
        "floquet_not_exact": 0,
        "frequency_not_exact": 0,
        "traditional_not_exact": 0,
        "exact_not_traditional": 0,
        "floquet": 0,
        "frequency": 0,
        "traditional": 0,
        "exact": 0,
    }
    for r in result.rows:
        e = bool(r["exact"])
        for name in ("floquet", "frequency", "traditional", "exact"):
            out[name] += bool(r[name])
        out["floquet_not_exact"] += bool(r["floquet"]) and not e
        out["frequency_not_exact"] += bool(r["frequency"]) and not e
        out["traditional_not_exact"] += bool(r["traditional"]) and not e
        out["exact_not_traditional"] += e and not bool(r["traditional"])
    return out


# ---------------------------------------------------------------------------
# Counterexamples to the traditional condition

COUNTEREXAMPLES = {
    "counterexample_1": SchwingerRabiParams(omega0=1.0, theta=0.1, omega=1.0),
    "counterexample_2": SchwingerRabiParams(omega0=1.0, theta=math.pi - 0.1, omega=20.0),
}


def counterexamples(cfg: IntegratorConfig | None = None, delta_T: float = 0.05, periods: int = 20) -> list[dict]:
    """Both named points with all ratios, verdicts and the evolved minimum overlap."""
    cfg = cfg or IntegratorConfig()
    out = []
    for name, p in COUNTEREXAMPLES.items():
        from .models import build_schwinger_rabi

        H = build_schwinger_rabi(p)
        rep = analyze(H, cfg=cfg, thr=Threshold(delta_T))
        series = overlap_series(H, 0, 0.0, periods * H.period, cfg, samples_per_period=2048)
        closed = oracle.example1(p)
        dmin = float(series.overlaps.min())
        out.append(
            {
                "name": name,
                "omega0": p.omega0,
                "theta": p.theta,
                "omega": p.omega,
                "traditional_ratio": rep.traditional_ratio,
                "frequency_ratio": rep.frequency_ratio,
                "floquet_ratio": rep.floquet_ratio,
                "delta": rep.delta,
                "min_overlap": dmin,
                "min_overlap_oracle": closed.min_overlap,
                "verdict_traditional": rep.verdicts["traditional"],
                "verdict_frequency": rep.verdicts["frequency"],
                "verdict_floquet": rep.verdicts["floquet"],
                "adiabatic": 1 - dmin <= delta_T,
            }
        )
    return out


def format_table(rows: list[dict], columns: list[str]) -> str:
    cells = [[_short(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)


def _short(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.6g}"
    if isinstance(x, (bool, np.bool_)):
        return "yes" if x else "no"
    return str(x)
