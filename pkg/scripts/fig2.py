"""Adiabaticity-condition regions for the dual model on a theta x omega grid."""

import argparse
import time
from pathlib import Path

from floquet_qa.experiments import FIG2_OMEGA, FIG2_THETA, Axis, fig2, fig2_containment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta-points", type=int, default=200)
    ap.add_argument("--omega-points", type=int, default=200)
    ap.add_argument("--delta-t", type=float, default=0.05)
    ap.add_argument("--method", choices=["closed", "numeric"], default="closed")
    ap.add_argument("--out", type=Path, default=Path("results/fig2.csv"))
    args = ap.parse_args()

    t0 = time.perf_counter()
    res = fig2(
        Axis("theta", FIG2_THETA.min, FIG2_THETA.max, args.theta_points),
        Axis("omega", FIG2_OMEGA.min, FIG2_OMEGA.max, args.omega_points),
        args.delta_t,
        method=args.method,
    )
    args.out.parent.mkdir(parents=True, exist_ok=True)
    res.to_csv(args.out)
    for k, v in fig2_containment(res).items():
        print(f"{k:<22} {v}")
    print(f"wrote {args.out} ({len(res.rows)} rows, {time.perf_counter() - t0:.1f}s)")


if __name__ == "__main__":
    main()
