"""Tabulate F for a family of coins on a dyadic grid (data for a CDF figure).

    python3 scripts/cdf_curves.py --p0 0.1 0.25 0.4 0.5 --points 1025 > cdf_curves.csv
"""

import argparse
import csv
import sys
from fractions import Fraction

from unfair_dice import coin, eval_cdf


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p0", nargs="+", default=["0.1", "0.25", "0.4", "0.5"])
    ap.add_argument("--points", type=int, default=1025)
    args = ap.parse_args()

    dice = [coin(p) for p in args.p0]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["x"] + [f"F_p0={p}" for p in args.p0])
    m = args.points - 1
    for k in range(args.points):
        x = Fraction(k, m)
        w.writerow([repr(float(x))] + [repr(eval_cdf(d, x).value) for d in dice])


if __name__ == "__main__":
    main()
