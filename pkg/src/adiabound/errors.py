"""Exception hierarchy shared by every module."""


class AdiaboundError(Exception):
    """Base class for all package errors."""


class DimensionError(AdiaboundError, ValueError):
    pass


class ValidationError(AdiaboundError, ValueError):
    """Input failed a structural check (Hermiticity, idempotence, ranges)."""


class RankError(AdiaboundError, ValueError):
    pass


class DegenerateSpectrumError(AdiaboundError, ValueError):
    pass


class GapClosureError(AdiaboundError, ValueError):
    """The tracked band touched the rest of the spectrum.

    ``s`` holds the first offending schedule parameter when known.
    """

    def __init__(self, message, s=None):
        super().__init__(message)
        self.s = s


class InapplicableBoundError(AdiaboundError, ValueError):
    """A perturbation lemma's hypothesis fails (nonpositive denominator)."""


class EnvironmentTooHotError(InapplicableBoundError):
    pass


class EvaluationError(AdiaboundError, ArithmeticError):
    """An evaluator returned non-finite values."""


class WindowError(AdiaboundError, ValueError):
    """Sampling window or resolution too coarse for a reliable supremum."""


class StepCriterionError(AdiaboundError, ValueError):
    pass


class IntegrationError(AdiaboundError, RuntimeError):
    """Adaptive integration gave up; ``diagnostics`` describes where."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
