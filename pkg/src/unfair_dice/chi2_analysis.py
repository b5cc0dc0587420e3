"""Chi-squared uniformity test against a biased b-bit generator.

A b-bit sample is built from b flips of a coin that lands 0 with probability
``p0``. The bins are the ``2**b`` bit patterns; under the null each has
expected count ``N / 2**b``. Degrees of freedom are fixed at ``2**b - 1``
(goodness of fit with fully specified expected frequencies).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ConfigError, CountMismatch, FairCoin, NonConvergence

MAX_BITS = 64
GAMMA_EPS = 1e-16
GAMMA_MAX_ITER = 10_000
QUANTILE_MAX_ITER = 200
QUANTILE_TOL = 1e-10


# regularized incomplete gamma ---------------------------------------------------------


def _gamma_series(a: float, x: float) -> float:
    # P(a, x) by its power series; converges fast for x < a + 1.
    term = total = 1.0 / a
    ap = a
    for _ in range(GAMMA_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * GAMMA_EPS:
            break
    else:
        raise NonConvergence(f"incomplete gamma series did not converge (a={a}, x={x})")
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cfrac(a: float, x: float) -> float:
    # Q(a, x) by Lentz's continued fraction; used for x >= a + 1.
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, GAMMA_MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < GAMMA_EPS:
            break
    else:
        raise NonConvergence(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gammainc_lower(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    if a <= 0:
        raise ValueError("shape must be positive")
    if x <= 0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_cfrac(a, x)


def gammainc_upper(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    if a <= 0:
        raise ValueError("shape must be positive")
    if x <= 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cfrac(a, x)


def chi2_sf(x: float, df: int) -> float:
    return gammainc_upper(df / 2.0, x / 2.0)


def chi2_cdf(x: float, df: int) -> float:
    return gammainc_lower(df / 2.0, x / 2.0)


def chi2_pdf(x: float, df: int) -> float:
    if x <= 0:
        return 0.0
    k = df / 2.0
    return math.exp((k - 1.0) * math.log(x) - x / 2.0 - k * math.log(2.0) - math.lgamma(k))


def chi2_critical(df: int, alpha: float) -> float:
    """Upper ``alpha`` point of the chi-squared law: ``Q(df/2, c/2) = alpha``.

    Brackets the root by doubling, then runs Newton steps that fall back to
    bisection whenever they leave the bracket.
    """
    if df < 1:
        raise ConfigError("degrees of freedom must be at least 1")
    if not 0.0 < alpha < 1.0:
        raise ConfigError("alpha must lie strictly between 0 and 1")
    lower_tail = alpha > 0.5
    target = 1.0 - alpha if lower_tail else alpha

    def excess(c):
        # Decreasing in c; the lower tail avoids cancellation when alpha is near 1.
        return target - chi2_cdf(c, df) if lower_tail else chi2_sf(c, df) - target

    lo, hi = 0.0, float(df)
    while excess(hi) > 0:
        lo, hi = hi, 2.0 * hi
    c = 0.5 * (lo + hi)
    for _ in range(QUANTILE_MAX_ITER):
        resid = excess(c)
        if abs(resid) <= QUANTILE_TOL * target or hi - lo <= 1e-15 * hi:
            return c
        if resid > 0:
            lo = c
        else:
            hi = c
        slope = chi2_pdf(c, df)
        step = c + resid / slope if slope > 0 else math.nan
        c = step if lo < step < hi else 0.5 * (lo + hi)
    raise NonConvergence(f"chi-squared quantile did not converge (df={df}, alpha={alpha})")


def wilson_hilferty_critical(df: int, alpha: float) -> float:
    """Wilson-Hilferty cube-root normal approximation to the same quantile."""
    from statistics import NormalDist

    z = NormalDist().inv_cdf(1.0 - alpha)
    h = 2.0 / (9.0 * df)
    return df * (1.0 - h + z * math.sqrt(h)) ** 3


@dataclass(frozen=True)
class Chi2Plan:
    b: int
    alpha: float
    df: int = field(init=False)
    crit: float = field(init=False)

    def __post_init__(self):
        if not 1 <= self.b <= MAX_BITS:
            raise ConfigError(f"bits per sample must be in 1..{MAX_BITS}")
        df = 2**self.b - 1
        object.__setattr__(self, "df", df)
        object.__setattr__(self, "crit", chi2_critical(df, self.alpha))

    @property
    def bins(self) -> int:
        return 2**self.b


@dataclass(frozen=True)
class BinPattern:
    """Bin ``index`` holds the b-bit pattern with that binary value."""

    index: int
    b: int

    @property
    def ones(self) -> int:
        return bin(self.index).count("1")

    def probability(self, p0: float, p1: float) -> float:
        return p1**self.ones * p0 ** (self.b - self.ones)


# statistic and moments ----------------------------------------------------------------


def chi2_statistic(histogram: Sequence[int], N: int) -> float:
    """``sum (O - E)^2 / E`` with ``E = N / bins``.

    Evaluated as ``(bins * sum O^2 - N^2) / N`` in exact integers, so a
    uniform histogram gives exactly 0.
    """
    counts = [int(c) for c in histogram]
    if N < 1 or sum(counts) != N:
        raise CountMismatch(f"histogram sums to {sum(counts)}, expected N={N}")
    k = len(counts)
    return (k * sum(c * c for c in counts) - N * N) / N


# Stirling numbers of the second kind S(m, j): E[H^m] = sum_j S(m, j) N^(j) s^j.
_STIRLING2 = {1: (1,), 2: (1, 1), 3: (1, 3, 1), 4: (1, 7, 6, 1)}


def _falling(N: float, j: int) -> float:
    out = 1.0
    for i in range(j):
        out *= N - i
    return out


def histogram_moment(order: int, N: int, pattern: BinPattern, p0: float, p1: float) -> float:
    """Raw moment ``E[H^order | N]`` of one bin count (orders 1 to 4)."""
    if order not in _STIRLING2:
        raise ConfigError("moment order must be 1, 2, 3 or 4")
    if abs(p0 + p1 - 1.0) > 1e-12:
        raise ConfigError("p0 + p1 must equal 1")
    s = pattern.probability(p0, p1)
    return math.fsum(c * _falling(N, j) * s**j for j, c in enumerate(_STIRLING2[order], start=1))


def bias_sums(b: int, p0: float) -> tuple[float, float]:
    """``(S2, S_half)``: ``sum_j C(b,j) (s_j - d)^2`` for ``d = 2**-b`` and ``d = 1/2``."""
    if not 1 <= b <= MAX_BITS:
        raise ConfigError(f"bits per sample must be in 1..{MAX_BITS}")
    p1 = 1.0 - p0
    probs = [(math.comb(b, j), p1**j * p0 ** (b - j)) for j in range(b + 1)]
    uniform = 2.0**-b
    s2 = math.fsum(c * (s - uniform) ** 2 for c, s in probs)
    s_half = math.fsum(c * (s - 0.5) ** 2 for c, s in probs)
    return s2, s_half


def expected_chi2_at_N(plan: Chi2Plan, p0: float, N: float) -> float:
    """``E[chi2 | N]``; affine in N with slope ``2**b * S2``."""
    if N <= 0:
        raise ConfigError("N must be positive")
    s2, s_half = bias_sums(plan.b, p0)
    k = plan.bins
    return math.fsum((k * N * s2, -k * s_half, k * k / 4.0))


def expected_N(plan: Chi2Plan, p0: float) -> float:
    """Sample count at which the expected statistic reaches the critical value.

    A real number, not rounded to a count.
    """
    if not 0.0 < p0 < 1.0:
        raise ConfigError("p0 must lie strictly between 0 and 1")
    s2, s_half = bias_sums(plan.b, p0)
    if s2 == 0.0:
        raise FairCoin("fair coin: E[N] undefined (infinite)")
    k = plan.bins
    return math.fsum((plan.crit, k * s_half, -k * k / 4.0)) / (k * s2)
