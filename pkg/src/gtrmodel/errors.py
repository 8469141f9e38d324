"""Exception hierarchy.

Every error carries the process exit code the command-line front end uses
when the error escapes a command.
"""


class GTRError(Exception):
    """Base class for all errors raised by the package."""

    exit_code = 1


class ParameterDomainError(GTRError, ValueError):
    """A value lies outside the domain an operation accepts."""

    exit_code = 2


class NormalizationError(ParameterDomainError):
    """A probability table does not sum to one within tolerance."""


class InfeasibleError(GTRError, ValueError):
    """A parameter choice or ratio set cannot be realized by the model."""

    exit_code = 3

    def __init__(self, message, constraints=()):
        super().__init__(message)
        self.constraints = tuple(constraints)


class NoEmbeddingError(InfeasibleError):
    """The three cosines do not close a spherical triangle."""


class DegenerateDataError(GTRError, ValueError):
    """Data (or a truncation) leaves a zero denominator."""

    exit_code = 4


class ImpossibleOutcomeError(GTRError, ValueError):
    """A forced outcome has probability zero."""

    exit_code = 5
