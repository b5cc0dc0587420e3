"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class UnfairDiceError(Exception):
    exit_code = 2


class ConfigError(UnfairDiceError, ValueError):
    exit_code = 2


class NegativeEntry(ConfigError):
    pass


class SumOutOfTolerance(ConfigError):
    pass


class DegenerateDie(ConfigError):
    pass


class TooFewSides(ConfigError):
    pass


class IndexOutOfRange(ConfigError):
    pass


class CountMismatch(ConfigError):
    pass


class EnumerationTooLarge(UnfairDiceError):
    exit_code = 3


class CapReached(UnfairDiceError):
    exit_code = 3


class AllTrialsCapped(UnfairDiceError):
    exit_code = 3


class MathPreconditionError(UnfairDiceError, ArithmeticError):
    exit_code = 4


class FairCoin(MathPreconditionError):
    pass


class NonConvergence(MathPreconditionError):
    pass


class DepthExceeded(MathPreconditionError):
    """Truncation bound still above tolerance at the depth cap.

    The partial result is attached as ``partial``; its ``error_bound`` is
    still a valid certificate, just a looser one than requested.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
