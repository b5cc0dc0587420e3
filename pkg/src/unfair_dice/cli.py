"""Command-line entry point: ``unfair-dice <subcommand> [flags]``.

Exit codes: 0 success, 2 configuration error, 3 resource cap,
4 mathematical precondition violated (e.g. a fair coin where bias is required).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import comparison, montecarlo
from .cdf_engine import DEFAULT_MAX_DEPTH, DEFAULT_TOL, eval_cdf, sample_many
from .chi2_analysis import Chi2Plan, bias_sums, expected_N
from .errors import ConfigError, UnfairDiceError
from .prob_model import ProbabilityVector, coin, parse_die, to_fraction


@dataclass
class RunConfig:
    command: str
    die: Optional[ProbabilityVector] = None
    p0: Optional[float] = None
    b: int = 1
    alpha: float = 0.05
    n: Optional[int] = None
    n_min: int = 0
    n_max: int = 10
    points: Optional[int] = None
    depth: int = 32
    tol: float = DEFAULT_TOL
    trials: int = 1000
    seed: int = 0
    min_n: int = 1
    n_cap: int = montecarlo.DEFAULT_N_CAP
    method: str = "grouped"
    ranks: list = field(default_factory=lambda: [10, 20, 40])
    format: Optional[str] = None
    workers: int = 1
    out: Optional[str] = None
    summary: Optional[str] = None

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        cfg = cls(command=ns.command)
        for name in vars(cfg):
            if name in ("command", "die", "p0") or not hasattr(ns, name):
                continue
            value = getattr(ns, name)
            if value is not None:
                setattr(cfg, name, value)
        if getattr(ns, "die", None) and getattr(ns, "p0", None) is not None:
            raise ConfigError("give either --die or --p0, not both")
        if getattr(ns, "die", None):
            cfg.die = parse_die(ns.die)
        elif getattr(ns, "p0", None) is not None:
            cfg.p0 = float(to_fraction(ns.p0))
            cfg.die = coin(ns.p0)
        cfg.validate()
        return cfg

    def validate(self):
        needs_die = self.command in ("cdf-table", "arclength", "supnorm", "diagnose", "sample", "digit-check")
        if needs_die and self.die is None:
            raise ConfigError(f"{self.command} needs --die or --p0")
        if self.command in ("expected-samples", "simulate"):
            if self.p0 is None:
                raise ConfigError(f"{self.command} needs --p0")
            if not 0.0 < self.p0 < 1.0:
                raise ConfigError("--p0 must lie strictly between 0 and 1")
        if self.tol <= 0:
            raise ConfigError("--tol must be positive")
        if self.points is not None and self.points < 2:
            raise ConfigError("--points must be at least 2")
        if self.n_min > self.n_max:
            raise ConfigError("--n-min must not exceed --n-max")
        if self.workers < 1 or self.trials < 1 or self.depth < 1:
            raise ConfigError("--workers, --trials and --depth must be positive")
        if self.format not in (None, "csv", "json"):
            raise ConfigError("--format must be csv or json")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _table(cfg: RunConfig, header, rows) -> str:
    if cfg.format == "json":
        return _json_text([dict(zip(header, r)) for r in rows])
    return _csv_text(header, rows)


def _scalar(cfg: RunConfig, obj: dict) -> str:
    if cfg.format == "csv":
        keys = sorted(obj)
        return _csv_text(keys, [[obj[k] for k in keys]])
    return _json_text(obj)


def cmd_cdf_table(cfg: RunConfig) -> str:
    """F on the grid ``k / (points-1)``; pick ``points - 1 = q**m`` for a base-q grid."""
    points = 1025 if cfg.points is None else cfg.points
    m = points - 1
    rows = []
    for k in range(points):
        x = Fraction(k, m)
        v = eval_cdf(cfg.die, x, tol=cfg.tol, max_depth=DEFAULT_MAX_DEPTH)
        rows.append([repr(float(x)), repr(v.value), repr(v.error_bound)])
    return _table(cfg, ["x", "F", "err"], rows)


def cmd_arclength(cfg: RunConfig) -> str:
    rows = []
    if cfg.method == "both":
        for n in range(cfg.n_min, cfg.n_max + 1):
            a = comparison.arclength_naive(cfg.die, n)
            g = comparison.arclength_grouped(cfg.die, n)
            rows.append([n, repr(a.length), repr(g.length)])
        return _table(cfg, ["n", "length_naive", "length_grouped"], rows)
    for n in range(cfg.n_min, cfg.n_max + 1):
        r = comparison.arclength(cfg.die, n, cfg.method)
        rows.append([n, repr(r.length), r.method])
    return _table(cfg, ["n", "length", "method"], rows)


def cmd_supnorm(cfg: RunConfig) -> str:
    n = 8 if cfg.n is None else cfg.n
    return _scalar(
        cfg,
        {
            "n": n,
            "f1_norm": comparison.supnorm_uniform_to_f1(cfg.die),
            "bound": comparison.supnorm_bound(cfg.die),
            "fn_norm": comparison.supnorm_uniform_to_fn(cfg.die, n),
        },
    )


def cmd_expected_samples(cfg: RunConfig) -> str:
    plan = Chi2Plan(cfg.b, cfg.alpha)
    en = expected_N(plan, cfg.p0)
    s2, s_half = bias_sums(cfg.b, cfg.p0)
    return _scalar(cfg, {"b": plan.b, "alpha": plan.alpha, "p0": cfg.p0, "df": plan.df, "crit": plan.crit,
                         "EN": en, "S2": s2, "S_half": s_half})


def cmd_simulate(cfg: RunConfig) -> str:
    plan = Chi2Plan(cfg.b, cfg.alpha)
    records = montecarlo.run_stopping_trials(cfg.p0, plan, cfg.trials, cfg.seed, cfg.n_cap, cfg.min_n, cfg.workers)
    summary = montecarlo.summarize(records, plan, cfg.p0).as_dict()
    summary.update(b=plan.b, alpha=plan.alpha, crit=plan.crit, p0=cfg.p0, seed=cfg.seed, min_n=cfg.min_n,
                   n_cap=cfg.n_cap)
    if cfg.summary:
        with open(cfg.summary, "w") as fh:
            fh.write(_json_text(summary))
    if cfg.format == "json":
        return _json_text(summary)
    rows = [[r.trial_index, r.stop_N, repr(r.final_statistic), r.seed, int(r.capped)] for r in records]
    return _csv_text(["trial_index", "stop_N", "final_statistic", "seed", "capped"], rows)


def cmd_diagnose(cfg: RunConfig) -> str:
    points = 1000 if cfg.points is None else cfg.points
    rows = montecarlo.density_ratio_diagnostic(cfg.die, cfg.ranks, points, cfg.seed)
    return _table(cfg, ["rank", "median_ratio_uniform", "median_ratio_mu"],
                  [[r.rank, repr(r.median_uniform), repr(r.median_mu)] for r in rows])


def cmd_sample(cfg: RunConfig) -> str:
    count = 10 if cfg.n is None else cfg.n
    ks = sample_many(cfg.die, cfg.depth, count, cfg.seed)
    den = cfg.die.q**cfg.depth
    rows = []
    for i, k in enumerate(ks):
        f = Fraction(int(k), den)
        rows.append([i, f.numerator, f.denominator, repr(float(f))])
    return _table(cfg, ["index", "numerator", "denominator", "x"], rows)


def cmd_digit_check(cfg: RunConfig) -> str:
    n_digits = 10**6 if cfg.n is None else cfg.n
    rows = montecarlo.digit_frequency_check(cfg.die, n_digits, cfg.seed)
    return _table(cfg, ["digit", "count", "frequency", "p", "band", "pass"],
                  [[r.digit, r.count, repr(r.frequency), repr(r.p), repr(r.band), int(r.passed)] for r in rows])


HANDLERS = {
    "cdf-table": cmd_cdf_table,
    "arclength": cmd_arclength,
    "supnorm": cmd_supnorm,
    "expected-samples": cmd_expected_samples,
    "simulate": cmd_simulate,
    "diagnose": cmd_diagnose,
    "sample": cmd_sample,
    "digit-check": cmd_digit_check,
}


def _int_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="unfair-dice", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text, *flags):
        sp = sub.add_parser(name, help=help_text)
        common = {
            "die": dict(help="side probabilities, e.g. 0.25,0.75 (parsed as exact decimals)"),
            "p0": dict(help="coin probability of a 0"),
            "b": dict(type=int, help="bits per sample"),
            "alpha": dict(type=float, help="significance level"),
            "n": dict(type=int, help="iterate rank or count"),
            "n-min": dict(type=int),
            "n-max": dict(type=int),
            "points": dict(type=int, help="grid or sample points"),
            "tol": dict(type=float),
            "depth": dict(type=int, help="digits per sample"),
            "trials": dict(type=int),
            "seed": dict(type=int),
            "min-n": dict(type=int, help="first sample count at which the test is applied"),
            "n-cap": dict(type=int, help="give up on a trial after this many samples"),
            "method": dict(choices=("naive", "grouped", "both")),
            "ranks": dict(type=_int_list, help="comma-separated ranks"),
            "workers": dict(type=int),
            "summary": dict(help="also write the JSON summary to this path"),
        }
        for flag in flags:
            sp.add_argument(f"--{flag}", **common[flag])
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--out", help="write output here instead of stdout")
        return sp

    add("cdf-table", "tabulate F on an equispaced grid", "die", "p0", "points", "tol")
    add("arclength", "arclength of the rank-n iterates", "die", "p0", "n-min", "n-max", "method")
    add("supnorm", "sup-norm distances from uniform", "die", "p0", "n")
    add("expected-samples", "analytic expected samples to fail the test", "p0", "b", "alpha")
    add("simulate", "stopping-time Monte Carlo", "p0", "b", "alpha", "trials", "seed", "min-n", "n-cap",
        "workers", "summary")
    add("diagnose", "density-ratio singularity diagnostic", "die", "p0", "ranks", "points", "seed")
    add("sample", "draw truncated samples", "die", "p0", "depth", "n", "seed")
    add("digit-check", "digit frequencies of one long roll sequence", "die", "p0", "n", "seed")
    return parser


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = RunConfig.from_args(ns)
        text = HANDLERS[cfg.command](cfg)
    except UnfairDiceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
