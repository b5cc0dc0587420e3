"""Evaluate the dice CDF, its piecewise-linear iterates, and draw samples.

The self-similar recursion

    F(x) = C(u) + p_u * F(q*x - u)   for x in [u/q, (u+1)/q]

(``C(u)`` the mass of sides below ``u``) is unrolled along the digits of x:

    F(x) = sum_i (p_{u_1} ... p_{u_{i-1}}) * C(u_i)

After ``i`` digits the unseen tail contributes ``prod * F(rest)`` with
``F(rest)`` in [0, 1], so the running product is a certified error bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from . import rng
from .errors import DepthExceeded, IndexOutOfRange
from .prob_model import BaseQPoint, CoinSchedule, ProbabilityVector, digit_stream, rank_digits

DEFAULT_TOL = 1e-12
DEFAULT_MAX_DEPTH = 4096

PointLike = Union[BaseQPoint, Fraction, float, int, str]


@dataclass(frozen=True)
class CdfValue:
    """``F(x)`` lies in ``[value, value + error_bound]``."""

    value: float
    error_bound: float
    digits_consumed: int

    def __float__(self):
        return self.value


def _point(x: PointLike) -> BaseQPoint:
    return BaseQPoint.of(x)


def eval_cdf(
    die: ProbabilityVector,
    x: PointLike,
    tol: float = DEFAULT_TOL,
    max_depth: int = DEFAULT_MAX_DEPTH,
    terminating: bool = True,
) -> CdfValue:
    """F(x) to within ``tol``; exact when x is a base-q rational.

    ``terminating=False`` walks the other expansion of a base-q rational
    (the one ending in ``q-1`` forever); by continuity it converges to the
    same value, only without early termination.
    """
    if tol <= 0 or max_depth < 1:
        raise ValueError("tol must be positive and max_depth at least 1")
    x = _point(x)
    if x.numerator == 0:
        return CdfValue(0.0, 0.0, 0)
    if x.numerator == x.denominator:
        return CdfValue(1.0, 0.0, 0)
    p, prefix = die.p, die.prefix
    value, prod = 0.0, 1.0
    depth = 0
    for u, rest in digit_stream(x, die.q, terminating):
        depth += 1
        value += prod * prefix[u]
        prod *= p[u]
        if rest == 0 or prod == 0.0:
            return CdfValue(value, 0.0, depth)
        if prod < tol:
            return CdfValue(value, prod, depth)
        if depth >= max_depth:
            partial = CdfValue(value, prod, depth)
            raise DepthExceeded(
                f"running product {prod:.3g} still >= tol {tol:.3g} after {depth} digits", partial
            )
    raise AssertionError("digit stream ended")  # pragma: no cover


def cdf_at_rank(die: ProbabilityVector, k: int, n: int) -> float:
    """F(k / q**n) exactly, via the integer digits of ``k``."""
    if k == die.q**n:
        return 1.0
    value, prod = 0.0, 1.0
    for u in rank_digits(k, n, die.q):
        value += prod * die.prefix[u]
        prod *= die.p[u]
    return value


def interval_probability(die: ProbabilityVector, k: int, n: int) -> float:
    """Mass of the rank-n interval ``[k/q**n, (k+1)/q**n]``: the product of its digit probabilities."""
    if n < 0:
        raise IndexOutOfRange("rank must be nonnegative")
    prod = 1.0
    for u in rank_digits(k, n, die.q):
        prod *= die.p[u]
    return prod


def interval_probabilities(die: ProbabilityVector, n: int) -> np.ndarray:
    """All ``q**n`` rank-n interval masses in lexicographic (left-to-right) order."""
    out = np.ones(1)
    p = np.asarray(die.p)
    for _ in range(n):
        out = np.multiply.outer(out, p).ravel()
    return out


def breakpoint_values(die: ProbabilityVector, n: int) -> np.ndarray:
    """F at ``k / q**n`` for ``k = 0..q**n`` by a prefix sum of interval masses."""
    masses = interval_probabilities(die, n)
    out = np.empty(len(masses) + 1)
    out[0] = 0.0
    np.cumsum(masses, out=out[1:])
    out[-1] = 1.0
    return out


def eval_iterate(die: ProbabilityVector, n: int, x: PointLike) -> float:
    """The n-th iterate ``f_n`` of the recursion started from the identity.

    Descends ``n`` digits exactly as :func:`eval_cdf` does, then applies the
    identity to the remaining fractional argument.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = _point(x)
    if x.numerator == x.denominator:
        return 1.0
    if n == 0:
        return float(x)
    value, prod = 0.0, 1.0
    rest = x.fraction
    for i, (u, rest) in enumerate(digit_stream(x, die.q)):
        value += prod * die.prefix[u]
        prod *= die.p[u]
        if i + 1 == n or rest == 0:
            break
    if rest == 0:
        return value
    return value + prod * float(rest)


def eval_cdf_noniid(
    schedule: CoinSchedule,
    x: PointLike,
    tol: float = DEFAULT_TOL,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> CdfValue:
    """CDF of ``sum x_i 2**-i`` when flip ``i`` is 0 with probability ``schedule.p0(i)``."""
    if tol <= 0 or max_depth < 1:
        raise ValueError("tol must be positive and max_depth at least 1")
    x = _point(x)
    if x.numerator == 0:
        return CdfValue(0.0, 0.0, 0)
    if x.numerator == x.denominator:
        return CdfValue(1.0, 0.0, 0)
    value, prod = 0.0, 1.0
    depth = 0
    for u, rest in digit_stream(x, 2):
        depth += 1
        p0 = schedule.p0(depth)
        if u:
            value += prod * p0
            prod *= 1.0 - p0
        else:
            prod *= p0
        if rest == 0:
            return CdfValue(value, 0.0, depth)
        if prod < tol:
            return CdfValue(value, prod, depth)
        if depth >= max_depth:
            raise DepthExceeded(
                f"running product {prod:.3g} still >= tol {tol:.3g} after {depth} digits",
                CdfValue(value, prod, depth),
            )
    raise AssertionError("digit stream ended")  # pragma: no cover


def draw_digits(die: ProbabilityVector, uniforms: np.ndarray) -> np.ndarray:
    """Map uniforms in [0, 1) to die faces by inverting the cumulative masses.

    Faces with zero mass have an empty preimage and are never drawn.
    """
    edges = np.asarray(die.prefix[1:-1])
    return np.searchsorted(edges, uniforms, side="right")


def sample_many(die: ProbabilityVector, depth: int, count: int, seed: int) -> np.ndarray:
    """Integer numerators ``k`` of ``count`` draws ``X = k / q**depth``.

    Sample ``i`` uses uniforms ``i*depth+1 .. (i+1)*depth`` of the seed's stream.
    Numerators are Python ints when ``q**depth`` overflows int64.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    u = rng.uniform_block(seed, 0, depth * count).reshape(count, depth)
    d = draw_digits(die, u)
    q = die.q
    if q**depth < 2**63:
        weights = q ** np.arange(depth - 1, -1, -1, dtype=np.int64)
        return d @ weights
    return np.array([sum(int(v) * q ** (depth - 1 - i) for i, v in enumerate(row)) for row in d], dtype=object)


def sample(die: ProbabilityVector, depth: int, rng_seed: int) -> BaseQPoint:
    """One draw of X truncated to ``depth`` digits, as an exact rational."""
    k = int(sample_many(die, depth, 1, rng_seed)[0])
    f = Fraction(k, die.q**depth)
    return BaseQPoint(f.numerator, f.denominator)
