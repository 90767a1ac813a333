"""Command-line entry point.

Exit codes: 0 success, 1 failed verification, 2 invalid input,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import oracle
from .conditions import Threshold, analyze
from .errors import FloquetQAError, InvalidParameter
from .evolution import overlap_series
from .experiments import (
    Axis,
    FIG2_OMEGA,
    FIG2_THETA,
    SweepSpec,
    counterexamples,
    fig1,
    fig2,
    fig2_containment,
    format_table,
    run_sweep,
)
from .models import SchwingerRabiParams, load_model, model_from_config, normalize_model_id
from .propagator import IntegratorConfig

log = logging.getLogger("floquet_qa")


def _integrator_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("integrator")
    g.add_argument("--steps", type=int, default=4096, help="steps per period")
    g.add_argument("--scheme", default="magnus4", choices=["magnus4", "midpoint_exponential"])
    g.add_argument("--unitarity-tol", type=float, default=1e-10)


def _model_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("model")
    g.add_argument("--model", default="schwinger-rabi", help="schwinger-rabi | dual | two-tone | generic")
    g.add_argument("--config", type=Path, help="JSON model (or sweep) config")
    g.add_argument("--omega0", type=float, default=1.0)
    g.add_argument("--theta", type=float)
    g.add_argument("--omega", type=float)
    g.add_argument("--V", type=float)
    g.add_argument("--Vprime", type=float, default=0.0)
    g.add_argument("--N-tone", dest="N_tone", type=int)
    g.add_argument("--truncated", action="store_true", help="two-tone: drop the slow V' term")


def _cfg(args) -> IntegratorConfig:
    return IntegratorConfig(steps_per_period=args.steps, scheme=args.scheme, unitarity_tol=args.unitarity_tol)


def _model_config(args) -> dict:
    if args.config is not None:
        return json.loads(Path(args.config).read_text())
    model = normalize_model_id(args.model)
    if model in ("schwinger_rabi", "dual"):
        params = {"omega0": args.omega0, "theta": args.theta, "omega": args.omega}
    elif model == "two_tone":
        params = {"omega0": args.omega0, "V": args.V, "Vprime": args.Vprime, "omega": args.omega, "N_tone": args.N_tone}
        if args.truncated:
            params["truncated"] = True
    else:
        raise InvalidParameter("generic models must be given with --config")
    missing = [k for k, v in params.items() if v is None]
    if missing:
        raise InvalidParameter(f"missing model parameters: {', '.join(missing)}")
    return {"model": model, "params": params}


def _build(args):
    if args.config is not None:
        return load_model(args.config, _cfg(args))
    return model_from_config(_model_config(args), _cfg(args))


def _write_json(obj, out: Path | None):
    text = json.dumps(obj, indent=2, default=float)
    if out is None:
        print(text)
    else:
        out.write_text(text + "\n")


# ---------------------------------------------------------------------------


def cmd_analyze(args) -> int:
    H = _build(args)
    rep = analyze(H, t0=args.t0, cfg=_cfg(args), thr=Threshold(args.delta_t), evolve_periods=args.periods)
    if args.json or args.out:
        _write_json(rep.to_json(), args.out)
        return 0
    print(f"model           {H.label}  N={H.dimension}  T={H.period:.10g}")
    print(f"quasienergies   {', '.join(f'{e:.10g}' for e in rep.quasienergies)}")
    print(f"max coupling    {rep.max_coupling:.10g}")
    print(f"min gap         {rep.min_gap:.10g}")
    print(f"delta           {rep.delta:.10g}  (bound overlap {rep.bound_overlap:.10g})")
    for name, ratio in (("traditional", rep.traditional_ratio), ("frequency", rep.frequency_ratio), ("floquet", rep.floquet_ratio)):
        print(f"{name:<15} {ratio:.10g}  {'pass' if rep.verdicts[name] else 'fail'}")
    if rep.domain_violation:
        print("note            bound domain violated; floquet verdict withheld")
    if rep.min_overlap is not None:
        print(f"min overlap     {rep.min_overlap:.10g}  {'pass' if rep.verdicts['exact'] else 'fail'}")
    return 0


def cmd_evolve(args) -> int:
    H = _build(args)
    series = overlap_series(H, args.level, args.t0, args.t0 + args.periods * H.period, _cfg(args), args.samples)
    ref = None
    conf = H.params
    if conf.get("model") in ("schwinger_rabi", "dual") and args.level == 0 and args.t0 == 0:
        p = SchwingerRabiParams(**conf["params"])
        ref = oracle.example1(p).overlap if conf["model"] == "schwinger_rabi" else oracle.example2(p).overlap
    out = args.out or Path("overlap.csv")
    series.to_csv(out, oracle=ref)
    print(f"wrote {len(series.times)} rows to {out}; min overlap {series.overlaps.min():.10g}")
    return 0


def cmd_sweep(args) -> int:
    if args.config is None:
        raise InvalidParameter("sweep needs --config with a sweep spec")
    raw = json.loads(Path(args.config).read_text())
    axes = [Axis(**a) for a in raw.get("axes", [])]
    spec = SweepSpec(
        model=raw["model"],
        params=raw.get("params", {}),
        axes=axes,
        quantities=raw.get("quantities", []),
        evolution_horizon=int(raw.get("evolution_horizon", 20)),
        resonance_mask=bool(raw.get("resonance_mask", False)),
        delta_T=float(raw.get("delta_T", args.delta_t)),
        integrator=_cfg(args),
    )
    res = run_sweep(spec)
    _emit(res, args.out or Path("sweep.csv"))
    return 0


def _emit(res, out: Path):
    if out.suffix == ".json":
        res.to_json(out)
    else:
        res.to_csv(out)
    failed = sum(1 for r in res.rows if r.get("error"))
    print(f"wrote {len(res.rows)} rows to {out} ({failed} rows with an error marker)")


def cmd_fig1(args) -> int:
    thetas = args.thetas or [0.05, 0.1, 0.2]
    res = fig1(thetas, (args.omega_min, args.omega_max), args.points, omega0=args.omega0, cfg=_cfg(args))
    _emit(res, args.out or Path("fig1.csv"))
    return 0


def cmd_fig2(args) -> int:
    th = Axis("theta", FIG2_THETA.min, FIG2_THETA.max, args.theta_points)
    om = Axis("omega", FIG2_OMEGA.min, FIG2_OMEGA.max, args.omega_points)
    res = fig2(th, om, args.delta_t, omega0=args.omega0, method=args.method, cfg=_cfg(args))
    _emit(res, args.out or Path("fig2.csv"))
    for k, v in fig2_containment(res).items():
        print(f"  {k:<22} {v}")
    return 0


def cmd_counterexamples(args) -> int:
    rows = counterexamples(_cfg(args), args.delta_t)
    cols = [
        "name",
        "theta",
        "omega",
        "traditional_ratio",
        "verdict_traditional",
        "frequency_ratio",
        "verdict_frequency",
        "floquet_ratio",
        "verdict_floquet",
        "min_overlap",
        "adiabatic",
    ]
    print(format_table(rows, cols))
    if args.out:
        _write_json(rows, args.out)
    return 0


def cmd_verify(args) -> int:
    from .acceptance import run_all

    results = run_all(quick=not args.full, report=lambda r: print(r.line(), flush=True))
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return 0 if passed == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="floquet-qa", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="all adiabaticity conditions at one point")
    _model_args(p)
    _integrator_args(p)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--delta-t", type=float, default=0.05)
    p.add_argument("--periods", type=int, default=0, help="also evolve this many periods for the exact verdict")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("evolve", help="overlap time series from an instantaneous eigenstate")
    _model_args(p)
    _integrator_args(p)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--periods", type=float, default=20)
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--samples", type=int, default=512, help="samples per period")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("sweep", help="grid sweep from a JSON spec")
    p.add_argument("--config", type=Path)
    p.add_argument("--delta-t", type=float, default=0.05)
    p.add_argument("--out", type=Path)
    _integrator_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fig1", help="excited population and 2 delta vs omega/omega0")
    p.add_argument("--thetas", type=float, nargs="+")
    p.add_argument("--omega0", type=float, default=1.0)
    p.add_argument("--omega-min", type=float, default=0.1)
    p.add_argument("--omega-max", type=float, default=3.0)
    p.add_argument("--points", type=int, default=256)
    p.add_argument("--out", type=Path)
    _integrator_args(p)
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("fig2", help="condition regions for the dual model")
    p.add_argument("--theta-points", type=int, default=200)
    p.add_argument("--omega-points", type=int, default=200)
    p.add_argument("--delta-t", type=float, default=0.05)
    p.add_argument("--omega0", type=float, default=1.0)
    p.add_argument("--method", choices=["closed", "numeric"], default="closed")
    p.add_argument("--out", type=Path)
    _integrator_args(p)
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("counterexamples", help="verdict table for the two counterexamples")
    p.add_argument("--delta-t", type=float, default=0.05)
    p.add_argument("--out", type=Path)
    _integrator_args(p)
    p.set_defaults(func=cmd_counterexamples)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--full", action="store_true", help="full sample sizes (minutes)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InvalidParameter as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FloquetQAError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
