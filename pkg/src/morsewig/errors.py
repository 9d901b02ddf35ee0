"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`MorsewigError`,
so callers (and the CLI) can map failures to exit codes without string matching.
"""


class MorsewigError(Exception):
    """Base class for all package errors."""


class DomainError(MorsewigError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class AccuracyError(MorsewigError, ArithmeticError):
    """A numerical procedure did not reach its requested accuracy.

    ``estimate`` carries the best value obtained before giving up, and
    ``where`` optionally locates the failure (for example a grid point).
    """

    def __init__(self, message, estimate=None, where=None):
        super().__init__(message)
        self.estimate = estimate
        self.where = where


class ConsistencyError(AccuracyError):
    """An internal cross-check failed (for example a non-negligible imaginary residual)."""


class CoverageError(MorsewigError):
    """A phase-space grid does not contain the support of the state."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where
