"""
Domain errors raised by the solvers, simulators and command surfaces.

Every error carries the process exit code the CLI uses for it: 1 for usage
and input problems, 2 for failed checks and gates.
"""


class TransportError(Exception):
    """Base class for all toolkit errors"""
    exit_code: int = 1


# Input validation
class DimensionMismatch(TransportError):
    pass


class NotSymmetric(TransportError):
    pass


class NotPositiveDefinite(TransportError):
    pass


class NotCommuting(TransportError):
    pass


class InvalidProblemConfig(TransportError):
    pass


# Solver preconditions
class NegativeRate(TransportError):
    pass


class NegativeDimension(TransportError):
    pass


class NonIntegerDimension(TransportError):
    pass


class NegativePower(TransportError):
    pass


class RequiresAtLeastTwoComponents(TransportError):
    pass


class BracketDoesNotStraddle(TransportError):
    pass


# Sweeps
class InvalidRange(TransportError):
    pass


class SchemeRequiresL2(TransportError):
    pass


# Gates
class TooFewSamples(TransportError):
    exit_code = 2


class MonotonicityViolation(TransportError):
    exit_code = 2


class CheckFailed(TransportError):
    exit_code = 2
