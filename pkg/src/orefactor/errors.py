"""Exception types raised by the toolkit.

Every computational failure is an ``OrefactorError`` subclass whose class name
is what the command line prints on stderr.
"""


class OrefactorError(Exception):
    """Base class for all computational errors."""


class ZeroInverse(OrefactorError, ZeroDivisionError):
    pass


class NonCoprimeModuli(OrefactorError):
    pass


class NoReconstruction(OrefactorError):
    pass


class RecurrenceSingularIndex(OrefactorError):
    pass


class ContextMismatch(OrefactorError):
    pass


class DivisionDegenerate(OrefactorError):
    pass


class IrregularPoint(OrefactorError):
    pass


class BadReductionAtP(OrefactorError):
    pass


class ZeroScale(OrefactorError):
    pass


class InsufficientSeries(OrefactorError):
    pass


class NoSolutionAtBounds(OrefactorError):
    pass


class DegenerateSamples(OrefactorError):
    pass


class InconsistentSamples(OrefactorError):
    pass


class NonIntegerResult(OrefactorError):
    pass


class NotAnExponent(OrefactorError):
    pass


class NonIntegerExponent(OrefactorError):
    pass


class SweepBudgetExceeded(OrefactorError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NoSolutionAtDegree(OrefactorError):
    pass


class ShapeMismatch(OrefactorError):
    pass


class HoldoutMismatch(OrefactorError):
    pass


class ConstraintViolation(OrefactorError):
    pass
