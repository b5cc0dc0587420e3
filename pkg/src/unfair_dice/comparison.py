"""Distance of a dice CDF from the uniform one: sup-norms and arclength."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .cdf_engine import breakpoint_values, interval_probabilities
from .errors import EnumerationTooLarge
from .prob_model import ProbabilityVector

ENUM_CAP_ENV = "UNFAIR_DICE_ENUM_CAP"
SUPNORM_CAP = 2**24
NAIVE_CAP = 2**20
COMPOSITION_CAP = 10**7
EXACT_MULTINOMIAL_MAX_N = 300


def enumeration_cap(default: int) -> int:
    """``default``, unless overridden by the ``UNFAIR_DICE_ENUM_CAP`` environment variable."""
    env = os.environ.get(ENUM_CAP_ENV)
    return int(env) if env else default


def _check_cap(size: int, default_cap: int, cap: int | None, what: str):
    limit = enumeration_cap(default_cap) if cap is None else cap
    if size > limit:
        raise EnumerationTooLarge(f"{what} needs {size} terms, cap is {limit}")


def tree_sum(values) -> float:
    """Pairwise (binary-tree) sum in the given order; the tree shape depends only on the length."""
    a = np.asarray(values, dtype=np.float64)
    if a.size == 0:
        return 0.0
    while a.size > 1:
        if a.size % 2:
            a = np.append(a, 0.0)
        a = a[0::2] + a[1::2]
    return float(a[0])


def sorted_tree_sum(values) -> float:
    return tree_sum(np.sort(np.asarray(values, dtype=np.float64)))


# sup-norm comparisons ---------------------------------------------------------------


def supnorm_uniform_to_f1(die: ProbabilityVector) -> float:
    """``max |x - f_1(x)|``; attained at one of the rank-1 breakpoints ``j/q``."""
    q = die.q
    return float(max(abs(Fraction(j, q) - die.prefix_exact[j]) for j in range(1, q)))


def supnorm_bound(die: ProbabilityVector) -> float:
    """Contraction bound on ``max |x - F(x)|``. Can exceed the trivial bound 1."""
    return supnorm_uniform_to_f1(die) / (1.0 - die.p_max)


def supnorm_uniform_to_fn(
    die: ProbabilityVector, n: int, cap: int | None = None, method: str = "auto"
) -> float:
    """``max |x - f_n(x)|``, exact up to rounding: both sides are linear between rank-n breakpoints.

    ``method="sweep"`` enumerates all ``q**n`` breakpoints with one prefix sum.
    ``method="prune"`` runs a branch-and-bound descent that only refines
    intervals which could still hold the maximum. ``"auto"`` sweeps while
    ``q**n`` is within the cap and prunes beyond it.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    limit = enumeration_cap(SUPNORM_CAP) if cap is None else cap
    if die.is_fair:
        return 0.0  # F(x) = x, and pruning has nothing to prune against
    if method == "auto":
        method = "sweep" if die.q**n <= limit else "prune"
    if method == "sweep":
        _check_cap(die.q**n, SUPNORM_CAP, cap, f"sup-norm at rank {n}")
        values = breakpoint_values(die, n)
        grid = np.arange(len(values)) / float(die.q**n)
        return float(np.max(np.abs(grid - values)))
    if method == "prune":
        return _supnorm_prune(die, n, limit)
    raise ValueError(f"unknown sup-norm method {method!r}")


def _supnorm_prune(die: ProbabilityVector, n: int, limit: int) -> float:
    # Every left endpoint met on the way down is itself a rank-n breakpoint,
    # so the running maximum is a lower bound. Inside an interval of width w
    # and mass m starting at offset d = a - F(a), x - F(x) stays in
    # [d - m, d + w]; intervals whose bound cannot beat the maximum are dropped.
    q = die.q
    p = np.asarray(die.p)
    below = np.asarray(die.prefix[:-1])
    faces = np.arange(q)
    k = np.zeros(1, dtype=object if q**n >= 2**62 else np.int64)
    left, mass = np.zeros(1), np.ones(1)
    best = 0.0
    for m in range(1, n + 1):
        k = (k[:, None] * q + faces[None, :]).ravel()
        left = (left[:, None] + mass[:, None] * below[None, :]).ravel()
        mass = (mass[:, None] * p[None, :]).ravel()
        width = float(q) ** -m
        offset = (k * width).astype(np.float64) - left
        best = max(best, float(np.max(np.abs(offset))))
        if m == n:
            break
        live = np.maximum(np.abs(offset - mass), np.abs(offset + width)) > best
        k, left, mass = k[live], left[live], mass[live]
        if len(k) == 0:
            break
        if len(k) * q > limit:
            raise EnumerationTooLarge(f"sup-norm search frontier {len(k) * q} exceeds cap {limit}")
    return best


def iterate_residual(die: ProbabilityVector, n: int, cap: int | None = None) -> float:
    """``max |f_n - f_{n-1}|`` for ``n >= 1``.

    Both iterates are linear on rank-n intervals, so the maximum sits on a
    rank-n breakpoint ``(a*q + r) / q**n``. There ``f_n`` rises from the left
    end of its rank-(n-1) parent by the masses of the first ``r`` children,
    while ``f_{n-1}`` rises by ``r/q`` of the parent mass. Taking the
    difference inside each parent avoids cancellation against a global
    prefix sum.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    q = die.q
    _check_cap(q**n, SUPNORM_CAP, cap, f"residual at rank {n}")
    children = interval_probabilities(die, n).reshape(-1, q)
    parents = interval_probabilities(die, n - 1)
    rise_fine = np.cumsum(children, axis=1) - children
    rise_coarse = parents[:, None] * (np.arange(q) / q)[None, :]
    return float(np.max(np.abs(rise_fine - rise_coarse)))


# arclength --------------------------------------------------------------------------


@dataclass(frozen=True)
class ArclengthReport:
    n: int
    length: float
    method: str
    count: int  # segments (naive) or digit compositions (grouped)


def arclength_naive(die: ProbabilityVector, n: int, cap: int | None = None) -> ArclengthReport:
    """Length of the graph of ``f_n``: one segment per rank-n interval."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    q = die.q
    _check_cap(q**n, NAIVE_CAP, cap, f"naive arclength at rank {n}")
    masses = interval_probabilities(die, n)
    width = float(q) ** -n
    terms = np.hypot(width, masses)
    return ArclengthReport(n, sorted_tree_sum(terms), "naive", len(masses))


def compositions(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` nonnegative integers summing to ``n``."""
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, parts - 1):
            yield (first,) + rest


def multinomial(n: int, counts) -> int:
    out, left = 1, n
    for c in counts:
        out *= math.comb(left, c)
        left -= c
    return out


def _log_multinomial(n: int, counts) -> float:
    return math.lgamma(n + 1) - sum(math.lgamma(c + 1) for c in counts)


def arclength_grouped(die: ProbabilityVector, n: int, cap: int | None = None) -> ArclengthReport:
    """Arclength of ``f_n`` summed over digit multiplicities instead of digit strings.

    A segment's height depends only on how many times each face occurs in
    its digit string, so the ``q**n`` segments collapse into
    ``C(n+q-1, q-1)`` classes weighted by multinomial coefficients.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    q = die.q
    n_classes = math.comb(n + q - 1, q - 1)
    _check_cap(n_classes, COMPOSITION_CAP, cap, f"grouped arclength at rank {n}")
    p = die.p
    terms = []
    if n <= EXACT_MULTINOMIAL_MAX_N:
        width = float(q) ** -n
        for c in compositions(n, q):
            height = math.prod(pj**cj for pj, cj in zip(p, c))
            terms.append(float(multinomial(n, c)) * math.hypot(width, height))
    else:
        log_width = -n * math.log(q)
        logp = [math.log(pj) if pj > 0 else -math.inf for pj in p]
        for c in compositions(n, q):
            log_height = sum(cj * lp for cj, lp in zip(c, logp) if cj)
            log_seg = 0.5 * float(np.logaddexp(2 * log_width, 2 * log_height))
            terms.append(math.exp(_log_multinomial(n, c) + log_seg))
    return ArclengthReport(n, sorted_tree_sum(terms), "grouped", n_classes)


def arclength(die: ProbabilityVector, n: int, method: str = "grouped", cap: int | None = None) -> ArclengthReport:
    if method == "grouped":
        return arclength_grouped(die, n, cap)
    if method == "naive":
        return arclength_naive(die, n, cap)
    raise ValueError(f"unknown arclength method {method!r}")
