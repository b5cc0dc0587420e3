"""Empirical mean stopping time of the chi-squared test against the analytic E[N].

Sweeps coin biases for each bit width and prints one summary row per setting.

    python3 scripts/stopping_time.py --b 1 2 3 --p0 0.55 0.6 0.65 0.75 --trials 10000
"""

import argparse
import csv
import sys

from unfair_dice.chi2_analysis import Chi2Plan
from unfair_dice.montecarlo import estimate_stopping_moments


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--b", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--p0", type=float, nargs="+", default=[0.55, 0.6, 0.65, 0.75])
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=12345)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["b", "p0", "alpha", "trials", "capped", "mean_N", "std_err", "analytic_EN", "ratio"])
    for b in args.b:
        plan = Chi2Plan(b, args.alpha)
        for p0 in args.p0:
            s = estimate_stopping_moments(p0, plan, args.trials, args.seed, workers=args.workers)
            w.writerow([b, p0, args.alpha, s.trials, s.capped, f"{s.mean_N:.4f}", f"{s.std_err:.4f}",
                        f"{s.analytic_EN:.4f}", f"{s.ratio:.4f}"])
            sys.stdout.flush()


if __name__ == "__main__":
    main()
