"""Arclength of the rank-n iterates for several coins, next to the sup-norm bound.

    python3 scripts/arclength_sweep.py --n-max 200
"""

import argparse
import csv
import sys

from unfair_dice import coin
from unfair_dice.comparison import arclength_grouped, supnorm_bound, supnorm_uniform_to_fn


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p0", nargs="+", default=["0.1", "0.25", "0.4", "0.5"])
    ap.add_argument("--n-max", type=int, default=100)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["p0", "n", "length", "supnorm_fn", "supnorm_bound"])
    for p in args.p0:
        die = coin(p)
        bound = supnorm_bound(die)
        for n in range(args.n_max + 1):
            length = arclength_grouped(die, n).length
            w.writerow([p, n, repr(length), repr(supnorm_uniform_to_fn(die, n)), repr(bound)])


if __name__ == "__main__":
    main()
