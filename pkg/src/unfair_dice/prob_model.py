"""Exact value types: dice, points of [0, 1], and base-q digit expansions.

Probabilities are held as exact :class:`fractions.Fraction` values; binary
floats convert exactly (every double is a dyadic rational) and decimal
strings parse exactly. Float views are derived once, at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence, Union

from .errors import (
    ConfigError,
    DegenerateDie,
    IndexOutOfRange,
    NegativeEntry,
    SumOutOfTolerance,
    TooFewSides,
)

SUM_TOLERANCE = Fraction(1, 10**9)
DEGENERATE_MARGIN = 1e-15

Number = Union[int, float, str, Fraction]


def to_fraction(value: Number) -> Fraction:
    """Exact rational for an int, float, Fraction or decimal string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(*value.as_integer_ratio())
    return Fraction(value)


@dataclass(frozen=True)
class ProbabilityVector:
    """Side probabilities of a q-sided die, renormalized to sum exactly to 1.

    ``exact`` holds the rational values; ``p`` and ``prefix`` are float views.
    ``prefix[u]`` is the cumulative mass of sides ``0..u-1`` so ``prefix[0] == 0``
    and ``prefix[q] == 1``.
    """

    exact: tuple[Fraction, ...]
    p: tuple[float, ...] = field(init=False, repr=False)
    prefix_exact: tuple[Fraction, ...] = field(init=False, repr=False)
    prefix: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self):
        acc = Fraction(0)
        prefix = [acc]
        for pj in self.exact:
            acc += pj
            prefix.append(acc)
        object.__setattr__(self, "p", tuple(float(x) for x in self.exact))
        object.__setattr__(self, "prefix_exact", tuple(prefix))
        object.__setattr__(self, "prefix", tuple(float(x) for x in prefix))

    @property
    def q(self) -> int:
        return len(self.exact)

    @property
    def p_max(self) -> float:
        return max(self.p)

    @property
    def is_fair(self) -> bool:
        return all(pj == Fraction(1, self.q) for pj in self.exact)

    def __len__(self):
        return self.q

    def __str__(self):
        return "[" + ",".join(repr(x) for x in self.p) + "]"


def make_prob_vector(p: Sequence[Number]) -> ProbabilityVector:
    """Validate and renormalize a list of side probabilities.

    Sums within 1e-9 of one are divided through exactly; anything further off
    is treated as a user error.
    """
    if len(p) < 2:
        raise TooFewSides(f"a die needs at least 2 sides, got {len(p)}")
    values = [to_fraction(x) for x in p]
    for j, v in enumerate(values):
        if v < 0:
            raise NegativeEntry(f"p[{j}] = {float(v)!r} is negative")
    total = sum(values, Fraction(0))
    if abs(total - 1) > SUM_TOLERANCE:
        raise SumOutOfTolerance(f"probabilities sum to {float(total)!r}, not 1")
    for j, v in enumerate(values):
        if float(v) >= 1.0 - DEGENERATE_MARGIN:
            raise DegenerateDie(f"side {j} has probability 1; the distribution is a point mass")
    if total != 1:
        values = [v / total for v in values]
    return ProbabilityVector(tuple(values))


def fair_die(q: int) -> ProbabilityVector:
    return make_prob_vector([Fraction(1, q)] * q)


def coin(p0: Number) -> ProbabilityVector:
    p0 = to_fraction(p0)
    return make_prob_vector([p0, 1 - p0])


def parse_die(text: str) -> ProbabilityVector:
    """Parse ``"0.25,0.75"`` style input; each entry is read as an exact decimal."""
    parts = [s for s in text.replace(" ", "").split(",") if s]
    return make_prob_vector(parts)


@dataclass(frozen=True)
class BaseQPoint:
    """An exact rational in [0, 1]."""

    numerator: int
    denominator: int = 1

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        if not 0 <= self.numerator <= self.denominator:
            raise ValueError(f"{self.numerator}/{self.denominator} is outside [0, 1]")

    @classmethod
    def of(cls, value: Union[Number, "BaseQPoint"]) -> "BaseQPoint":
        if isinstance(value, BaseQPoint):
            return value
        f = to_fraction(value)
        return cls(f.numerator, f.denominator)

    @classmethod
    def from_digits(cls, digits: Sequence[int], q: int) -> "BaseQPoint":
        k = 0
        for d in digits:
            k = k * q + d
        f = Fraction(k, q ** len(digits))
        return cls(f.numerator, f.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __float__(self):
        return self.numerator / self.denominator

    def terminates_in(self, q: int) -> bool:
        """True when the point has a finite base-q expansion."""
        d = Fraction(self.numerator, self.denominator).denominator
        for prime in _prime_factors(q):
            while d % prime == 0:
                d //= prime
        return d == 1


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def digit_stream(x: BaseQPoint, q: int, terminating: bool = True) -> Iterator[tuple[int, Fraction]]:
    """Yield ``(digit, remainder)`` pairs of the base-q expansion of ``x``.

    ``remainder`` is the exact tail ``q**i * x - (u_1 ... u_i)_q`` in [0, 1]
    after digit ``i``. With ``terminating=False`` a base-q rational yields its
    expansion ending in an infinite run of ``q-1`` digits instead. ``x == 1``
    only has the all-``(q-1)`` expansion. The stream is infinite.
    """
    if q < 2:
        raise ValueError("base must be at least 2")
    num, den = x.numerator, x.denominator
    if num == den:
        while True:
            yield q - 1, Fraction(1)
    if not terminating and num > 0 and x.terminates_in(q):
        # Shift into the form where each step keeps the remainder in (0, 1].
        while True:
            num *= q
            d = num // den
            num -= d * den
            if num == 0:
                d, num = d - 1, den
            yield d, Fraction(num, den)
    while True:
        num *= q
        d = num // den
        num -= d * den
        yield d, Fraction(num, den)


def digits(x: BaseQPoint, q: int, n: int, terminating: bool = True) -> list[int]:
    """First ``n`` base-q digits of ``x`` (exact integer long division)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = []
    if n == 0:
        return out
    for d, _ in digit_stream(x, q, terminating):
        out.append(d)
        if len(out) == n:
            break
    return out


def rank_digits(k: int, n: int, q: int) -> list[int]:
    """Digits ``u_1..u_n`` of the rank-n breakpoint ``k / q**n`` (most significant first)."""
    if not 0 <= k < q**n:
        raise IndexOutOfRange(f"k={k} is outside [0, {q}**{n})")
    out = [0] * n
    for i in range(n - 1, -1, -1):
        k, out[i] = divmod(k, q)
    return out


@dataclass(frozen=True)
class CoinSchedule:
    """Per-flip tails probabilities for independent, non-identical coins.

    Flip ``i`` (1-based) lands 0 with probability ``p0_seq[i-1]``; flips past the
    end of the list use ``tail_p0``.
    """

    p0_seq: tuple[float, ...]
    tail_p0: float = 0.5

    def __post_init__(self):
        seq = tuple(float(v) for v in self.p0_seq)
        object.__setattr__(self, "p0_seq", seq)
        object.__setattr__(self, "tail_p0", float(self.tail_p0))
        for v in seq + (self.tail_p0,):
            if not 0.0 < v < 1.0:
                raise ConfigError(f"schedule entry {v!r} is not strictly inside (0, 1)")

    def p0(self, i: int) -> float:
        """Tails probability of flip ``i`` (1-based)."""
        return self.p0_seq[i - 1] if i <= len(self.p0_seq) else self.tail_p0
