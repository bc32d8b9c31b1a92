"""Exception hierarchy. Every error is a ``ValueError`` so callers can catch broadly."""


class BilevelError(ValueError):
    """Base class for all validation and recovery errors raised by the package."""


class NotSorted(BilevelError):
    pass


class NegativeTransition(BilevelError):
    pass


class OddCount(BilevelError):
    pass


class LengthMismatch(BilevelError):
    pass


class OrderBroken(BilevelError):
    pass


class InvalidRange(BilevelError):
    pass


class NotCausal(BilevelError):
    pass


class NotPositive(BilevelError):
    pass


class BadSupport(BilevelError):
    pass


class OutOfRange(BilevelError):
    pass


class ReversedWindow(BilevelError):
    pass


class BadTimes(BilevelError):
    pass


class NegativeDelta(BilevelError):
    pass


class PeriodMismatch(BilevelError):
    pass


class NoSamples(BilevelError):
    pass


class DensityViolated(BilevelError):
    pass


class HypothesisViolated(BilevelError):
    pass


class TooFewRecovered(BilevelError):
    """Raised when a recovery returned fewer transitions than requested for scoring."""
