"""CDFs of infinitely rolled (possibly unfair) dice and their distance from uniform."""

from .cdf_engine import CdfValue, eval_cdf, eval_cdf_noniid, eval_iterate, interval_probability, sample
from .prob_model import BaseQPoint, CoinSchedule, ProbabilityVector, coin, digits, fair_die, make_prob_vector

__all__ = [
    "BaseQPoint",
    "CdfValue",
    "CoinSchedule",
    "ProbabilityVector",
    "coin",
    "digits",
    "eval_cdf",
    "eval_cdf_noniid",
    "eval_iterate",
    "fair_die",
    "interval_probability",
    "make_prob_vector",
    "sample",
]
