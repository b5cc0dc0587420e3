"""Seeded simulations that cross-check the analytic results.

All randomness comes from :mod:`unfair_dice.rng`. A b-bit sample ``i``
(0-based) of a stream consumes uniforms ``i*b+1 .. i*b+b``; bit ``k`` is 1
when its uniform is ``>= p0`` and the first bit is the most significant.
Trial ``t`` of an experiment uses the stream ``derive_seed(master_seed, t)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import rng
from .cdf_engine import cdf_at_rank, draw_digits, sample_many
from .chi2_analysis import Chi2Plan, chi2_statistic, expected_N
from .errors import AllTrialsCapped, ConfigError, FairCoin
from .prob_model import ProbabilityVector, fair_die

DEFAULT_N_CAP = 10**6
DEBUG_CHECK_EVERY = 2**10


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    stop_N: int
    final_statistic: float
    seed: int
    capped: bool = False


@dataclass(frozen=True)
class ExperimentSummary:
    trials: int
    completed: int
    capped: int
    mean_N: float
    var_N: float
    std_err: float
    analytic_EN: float | None
    ratio: float | None

    def as_dict(self) -> dict:
        return asdict(self)


def _bits_to_bins(uniforms: np.ndarray, p0: float, b: int) -> np.ndarray:
    bits = (uniforms >= p0).astype(np.int64).reshape(-1, b)
    weights = 1 << np.arange(b - 1, -1, -1, dtype=np.int64)
    return bits @ weights


def run_stopping_trial(
    p0: float,
    plan: Chi2Plan,
    seed: int,
    n_cap: int = DEFAULT_N_CAP,
    min_n: int = 1,
    trial_index: int = 0,
    debug: bool = False,
) -> TrialRecord:
    """Draw b-bit samples until the chi-squared statistic first reaches ``plan.crit``.

    The statistic is ``bins * S / N - N`` with ``S = sum O_j^2`` kept as an
    exact integer: a draw into bin ``j`` adds ``2*O_j + 1``. The threshold is
    checked after every draw once ``N >= min_n``. A trial still below the
    threshold at ``n_cap`` comes back with ``capped=True``.
    """
    if not 0.0 < p0 < 1.0:
        raise ConfigError("p0 must lie strictly between 0 and 1")
    if not 1 <= min_n <= n_cap:
        raise ConfigError(f"need 1 <= min_n <= n_cap, got min_n={min_n}, n_cap={n_cap}")
    b, k, crit = plan.b, plan.bins, plan.crit
    counts = [0] * k
    s = 0
    n = 0
    block = 4096
    while n < n_cap:
        take = min(block, n_cap - n)
        bins = _bits_to_bins(rng.uniform_block(seed, n * b, take * b), p0, b).tolist()
        for j in bins:
            s += 2 * counts[j] + 1
            counts[j] += 1
            n += 1
            if debug and n % DEBUG_CHECK_EVERY == 0:
                assert abs((k * s - n * n) / n - chi2_statistic(counts, n)) <= 1e-9
            if n >= min_n:
                stat = (k * s - n * n) / n
                if stat >= crit:
                    return TrialRecord(trial_index, n, stat, seed)
    return TrialRecord(trial_index, n, (k * s - n * n) / n, seed, capped=True)


def _run_chunk(args) -> list[TrialRecord]:
    p0, b, alpha, master_seed, indices, n_cap, min_n = args
    plan = Chi2Plan(b, alpha)
    return [
        run_stopping_trial(p0, plan, rng.derive_seed(master_seed, t), n_cap, min_n, trial_index=t)
        for t in indices
    ]


def run_stopping_trials(
    p0: float,
    plan: Chi2Plan,
    trials: int,
    master_seed: int,
    n_cap: int = DEFAULT_N_CAP,
    min_n: int = 1,
    workers: int = 1,
) -> list[TrialRecord]:
    """Independent trials in trial-index order, whatever the worker count."""
    if not 1 <= min_n <= n_cap:
        raise ConfigError(f"need 1 <= min_n <= n_cap, got min_n={min_n}, n_cap={n_cap}")
    indices = list(range(trials))
    if workers <= 1 or trials < 2:
        return _run_chunk((p0, plan.b, plan.alpha, master_seed, indices, n_cap, min_n))
    size = math.ceil(trials / (workers * 4))
    chunks = [indices[i : i + size] for i in range(0, trials, size)]
    jobs = [(p0, plan.b, plan.alpha, master_seed, c, n_cap, min_n) for c in chunks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_chunk, jobs))
    return [r for part in parts for r in part]


def _merge(a, b):
    # Chan et al. pairwise update of (count, mean, M2).
    na, ma, m2a = a
    nb, mb, m2b = b
    if na == 0:
        return b
    if nb == 0:
        return a
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, m2a + m2b + delta * delta * na * nb / n


def _tree_moments(values: list[float]):
    if not values:
        return 0, 0.0, 0.0
    nodes = [(1, float(v), 0.0) for v in values]
    while len(nodes) > 1:
        nxt = [_merge(nodes[i], nodes[i + 1]) for i in range(0, len(nodes) - 1, 2)]
        if len(nodes) % 2:
            nxt.append(nodes[-1])
        nodes = nxt
    return nodes[0]


def summarize(records: list[TrialRecord], plan: Chi2Plan, p0: float) -> ExperimentSummary:
    done = [r.stop_N for r in sorted(records, key=lambda r: r.trial_index) if not r.capped]
    if not done:
        raise AllTrialsCapped(f"all {len(records)} trials hit the sample cap")
    n, mean, m2 = _tree_moments(done)
    var = m2 / (n - 1) if n > 1 else 0.0
    try:
        analytic = expected_N(plan, p0)
    except FairCoin:
        analytic = None
    return ExperimentSummary(
        trials=len(records),
        completed=n,
        capped=len(records) - n,
        mean_N=mean,
        var_N=var,
        std_err=math.sqrt(var / n),
        analytic_EN=analytic,
        ratio=mean / analytic if analytic else None,
    )


def estimate_stopping_moments(
    p0: float,
    plan: Chi2Plan,
    trials: int,
    master_seed: int,
    n_cap: int = DEFAULT_N_CAP,
    min_n: int = 1,
    workers: int = 1,
) -> ExperimentSummary:
    if trials < 2:
        raise ConfigError("need at least 2 trials")
    records = run_stopping_trials(p0, plan, trials, master_seed, n_cap, min_n, workers)
    return summarize(records, plan, p0)


def fixed_n_statistics(p0: float, plan: Chi2Plan, N: int, trials: int, master_seed: int) -> np.ndarray:
    """Chi-squared statistic of ``trials`` independent N-sample histograms."""
    if N < 1 or trials < 1:
        raise ConfigError("N and trials must be positive")
    b, k = plan.b, plan.bins
    seeds = np.array([rng.derive_seed(master_seed, t) for t in range(trials)], dtype=np.uint64)
    out = np.empty(trials)
    chunk = max(1, 2_000_000 // (N * b))
    for start in range(0, trials, chunk):
        block = seeds[start : start + chunk]
        u = rng.uniform_matrix(block, N * b)
        bins = _bits_to_bins(u, p0, b).reshape(len(block), N)
        offsets = np.arange(len(block))[:, None] * k
        hist = np.bincount((bins + offsets).ravel(), minlength=len(block) * k).reshape(len(block), k)
        sq = (hist * hist).sum(axis=1)
        out[start : start + len(block)] = (k * sq - N * N) / N
    return out


def fixed_n_statistic_mean(p0: float, plan: Chi2Plan, N: int, trials: int, master_seed: int) -> tuple[float, float]:
    """Monte Carlo ``(mean, standard error)`` of the statistic at a fixed sample count."""
    if trials < 2:
        raise ConfigError("need at least 2 trials")
    stats = fixed_n_statistics(p0, plan, N, trials, master_seed)
    return float(stats.mean()), float(stats.std(ddof=1) / math.sqrt(trials))


@dataclass(frozen=True)
class DigitFrequency:
    digit: int
    count: int
    frequency: float
    p: float
    band: float
    passed: bool


def digit_frequency_check(die: ProbabilityVector, n_digits: int, seed: int) -> list[DigitFrequency]:
    """Frequencies of each face in one stream of ``n_digits`` rolls, with a 4-sigma band."""
    if n_digits < 1:
        raise ConfigError("n_digits must be positive")
    d = draw_digits(die, rng.uniform_block(seed, 0, n_digits))
    counts = np.bincount(d, minlength=die.q)
    out = []
    for j, (c, pj) in enumerate(zip(counts.tolist(), die.p)):
        freq = c / n_digits
        band = 4.0 * math.sqrt(pj * (1.0 - pj) / n_digits)
        out.append(DigitFrequency(j, c, freq, pj, band, abs(freq - pj) <= band))
    return out


def empirical_cdf_distance(die: ProbabilityVector, samples: int, depth: int, seed: int) -> float:
    """Kolmogorov-Smirnov distance between ``samples`` draws and the exact law they follow.

    A draw ``k / q**depth`` stands for X somewhere in ``[k, k+1] / q**depth``,
    so its law has CDF ``F((k+1) / q**depth)`` at the grid point ``k``. Comparing
    against that step function leaves no truncation bias; against F itself the
    distance differs by at most ``p_max**depth``.
    """
    if samples < 1:
        raise ConfigError("samples must be positive")
    ks = sample_many(die, depth, samples, seed)
    values, counts = np.unique(ks, return_counts=True)
    ecdf_hi = np.cumsum(counts) / samples
    ecdf_lo = ecdf_hi - counts / samples
    F_left = np.array([cdf_at_rank(die, int(k), depth) for k in values])
    F_right = np.array([cdf_at_rank(die, int(k) + 1, depth) for k in values])
    return float(max(np.max(np.abs(ecdf_hi - F_right)), np.max(np.abs(ecdf_lo - F_left))))


@dataclass(frozen=True)
class DensityRatioRow:
    rank: int
    median_uniform: float
    median_mu: float


def _ratio_products(die: ProbabilityVector, digit_rows: np.ndarray, ranks: list[int]) -> np.ndarray:
    # q**n * mu(I_n(x)) = prod_i q * p_{u_i}, in exact rationals.
    factors = [die.q * pj for pj in die.exact]
    out = np.empty((len(digit_rows), len(ranks)))
    for r, row in enumerate(digit_rows.tolist()):
        acc = Fraction(1)
        done = 0
        for c, n in enumerate(ranks):
            for u in row[done:n]:
                acc *= factors[u]
            done = n
            out[r, c] = float(acc)
    return out


def density_ratio_diagnostic(
    die: ProbabilityVector, ranks: list[int], points: int, seed: int
) -> list[DensityRatioRow]:
    """Median of ``q**n * mu(I_n(x))`` over x drawn uniformly and x drawn from the die law.

    ``I_n(x)`` is the rank-n base-q interval containing x. For an unfair die
    the uniform medians shrink with n and the die-law medians grow, which is
    what a vanishing derivative with concentrated mass looks like.
    """
    ranks = sorted(set(int(r) for r in ranks))
    if not ranks or ranks[0] < 1:
        raise ConfigError("ranks must be a nonempty list of positive integers")
    depth = ranks[-1]
    uniform_digits = draw_digits(fair_die(die.q), rng.uniform_block(seed, 0, points * depth)).reshape(points, depth)
    mu_seed = rng.derive_seed(seed, 1)
    mu_digits = draw_digits(die, rng.uniform_block(mu_seed, 0, points * depth)).reshape(points, depth)
    med_u = np.median(_ratio_products(die, uniform_digits, ranks), axis=0)
    med_mu = np.median(_ratio_products(die, mu_digits, ranks), axis=0)
    return [DensityRatioRow(n, float(a), float(b)) for n, a, b in zip(ranks, med_u, med_mu)]


__all__ = [
    "DensityRatioRow",
    "DigitFrequency",
    "ExperimentSummary",
    "TrialRecord",
    "density_ratio_diagnostic",
    "digit_frequency_check",
    "empirical_cdf_distance",
    "estimate_stopping_moments",
    "fixed_n_statistic_mean",
    "fixed_n_statistics",
    "run_stopping_trial",
    "run_stopping_trials",
    "summarize",
]
