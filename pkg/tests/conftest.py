import itertools
import sys
from fractions import Fraction

import pytest

from unfair_dice import make_prob_vector


def brute_force_cdf(p, k, n):
    """F(k / q**n) by summing the mass of every rank-n digit string left of k."""
    q = len(p)
    total = Fraction(0)
    for idx, digits in enumerate(itertools.product(range(q), repeat=n)):
        if idx >= k:
            break
        mass = Fraction(1)
        for d in digits:
            mass *= p[d]
        total += mass
    return total


def recursive_cdf(p, x, depth):
    """Literal recursive descent through the self-similar recursion, exact rationals."""
    q = len(p)
    if x <= 0:
        return Fraction(0)
    if x >= 1:
        return Fraction(1)
    if depth == 0:
        raise RecursionError("point did not terminate")
    u = min(int(x * q), q - 1)
    return sum(p[:u], Fraction(0)) + p[u] * recursive_cdf(p, q * x - u, depth - 1)


@pytest.fixture
def cantor():
    return make_prob_vector(["0.5", "0", "0.5"])


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
