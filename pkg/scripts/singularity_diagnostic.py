"""Density-ratio medians for uniform points versus points drawn from the dice law.

For an unfair die the ratio collapses toward 0 at Lebesgue-typical points
and blows up at points typical for the die itself.

    python3 scripts/singularity_diagnostic.py --die 0.25,0.75 --ranks 5,10,20,40,80
"""

import argparse
import csv
import sys

from unfair_dice.prob_model import parse_die
from unfair_dice.montecarlo import density_ratio_diagnostic


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--die", default="0.25,0.75")
    ap.add_argument("--ranks", default="5,10,20,40,80")
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rows = density_ratio_diagnostic(parse_die(args.die), [int(r) for r in args.ranks.split(",")], args.points, args.seed)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["rank", "median_ratio_uniform", "median_ratio_mu"])
    for r in rows:
        w.writerow([r.rank, f"{r.median_uniform:.6g}", f"{r.median_mu:.6g}"])


if __name__ == "__main__":
    main()
