"""Exception hierarchy shared by every module of the package."""


class InclusionError(Exception):
    """Base class for all package errors."""


class InvalidSign(InclusionError, ValueError):
    pass


class AdmissibilityViolation(InclusionError, ValueError):
    pass


class NotPositiveDefinite(InclusionError, ValueError):
    pass


class OutOfRange(InclusionError, IndexError):
    pass


class DimensionMismatch(InclusionError, ValueError):
    pass


class ConvergenceFailure(InclusionError, RuntimeError):
    pass


class UndeclaredAsymptotics(InclusionError, ValueError):
    pass


class InconsistentDeclaration(InclusionError, ValueError):
    pass


class HypothesisNotSatisfied(InclusionError, ValueError):
    pass


class NonpositivePotential(InclusionError, ValueError):
    pass


class InternalConsistencyError(InclusionError, AssertionError):
    pass


class DidNotConverge(InclusionError, RuntimeError):
    """Descent hit its iteration cap; ``best`` holds the last certified point."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class PathCollapse(InclusionError, RuntimeError):
    pass


class TooLarge(InclusionError, ValueError):
    pass


class ParseError(InclusionError, ValueError):
    """A scenario file that cannot be read or does not have the expected structure."""


class ValidationError(InclusionError, ValueError):
    """A well-formed scenario whose contents violate a constructor precondition."""
