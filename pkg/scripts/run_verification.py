#!/usr/bin/env python3
"""Run the full theory-versus-simulation verification campaign.

Covers the bivariate normal model on a (rho, n) grid and the heavy-tail
contaminated model, writing one comparison CSV per campaign plus a
PASS/FAIL summary to stderr. Expect a few minutes at the default trial
count; pass --trials to scale it down.
"""

import argparse
import pathlib
import sys

from rankmoments.contaminated import ContaminationParams
from rankmoments.simulate import (ExperimentConfig, compare_report,
                                  format_report_csv, run_experiment)


def campaign(name, config, tol, out_dir):
    report = run_experiment(config)
    summary = compare_report(report, tol)
    path = out_dir / f"{name}.csv"
    path.write_text(format_report_csv(summary.rows))
    print(f"{name}: PASS={summary.passed} FAIL={summary.failed} "
          f"SKIP={summary.skipped} -> {path}", file=sys.stderr)
    return summary


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=20260826)
    parser.add_argument("--tol-sigmas", type=float, default=4.0)
    parser.add_argument("--out-dir", default="reports", type=pathlib.Path)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    binormal = ExperimentConfig(
        model="binormal",
        rho_grid=(-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9),
        n_list=(10, 20, 40), trials=args.trials, seed=args.seed)
    campaign("binormal", binormal, args.tol_sigmas, args.out_dir)

    for eps in (0.01, 0.05):
        cont = ContaminationParams(rho=0.0, epsilon=eps, lambda_x=100.0,
                                   lambda_y=100.0, rho_prime=0.0)
        config = ExperimentConfig(
            model="contaminated",
            rho_grid=(-0.9, -0.6, -0.3, 0.3, 0.6, 0.9),
            n_list=(50,), trials=args.trials, seed=args.seed,
            contamination=cont)
        campaign(f"contaminated_eps{eps:g}", config, args.tol_sigmas,
                 args.out_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
