"""aperiodic-spectra errors."""
from typing import ClassVar


class AperiodicSpectraError(Exception):
    """Base aperiodic-spectra error."""

    exit_code: ClassVar[int] = 1


class ConfigError(AperiodicSpectraError):
    """Error when an experiment configuration is invalid."""

    exit_code: ClassVar[int] = 2


class PreconditionError(ConfigError, ValueError):
    """Error when an operation is called outside its domain."""


class GenerationError(AperiodicSpectraError):
    """Error when an orbit or its coefficients cannot be generated."""

    exit_code: ClassVar[int] = 3


class NonExtendableSeed(GenerationError):
    """Error when a substitution seed pair cannot be grown into a point."""


class BudgetExceeded(GenerationError):
    """Error when an iteration or sample budget is exhausted."""


class UnknownWord(GenerationError, KeyError):
    """Error when a sampling table has no value for an orbit factor."""

    def __str__(self) -> str:
        """Render without the quoting KeyError adds."""
        return str(self.args[0]) if self.args else ""


class CoverageError(GenerationError, IndexError):
    """Error when a coefficient window does not cover the requested sites."""


class DomainError(AperiodicSpectraError):
    """Error when a numerical question has no answer at the given energy."""

    exit_code: ClassVar[int] = 4


class InSpectrum(DomainError):
    """Error when an energy lies on the estimated spectrum."""


class SingularSystem(DomainError):
    """Error when a resolvent system has a vanishing pivot."""


class OverflowGuard(DomainError):
    """Error when a generalized eigenfunction grows past double range."""
