"""Exception hierarchy with stable error codes.

Every failure the library can raise carries a short machine-readable
``code`` and an ``exit_code`` that the command line maps onto process
exit status: input problems exit 1, numerical failures exit 2.
"""

from __future__ import annotations


class FusedistError(Exception):
    """Base class for all errors raised by this package."""

    code: str = "error"
    exit_code: int = 1


class InvalidInputError(FusedistError):
    """Malformed or out-of-contract caller input."""

    code = "invalid-input"
    exit_code = 1


class ParseError(InvalidInputError):
    """A file could not be decoded; the message names the location."""

    code = "parse-error"


class UndefinedCorrelationError(InvalidInputError):
    """Correlation requested for a constant or too-short sequence."""

    code = "undefined-correlation"


class NumericalError(FusedistError):
    """A computation produced non-finite or meaningless numbers."""

    code = "numerical-failure"
    exit_code = 2


class SolverFailureError(NumericalError):
    """An iterative or LP solver did not reach a usable solution."""

    code = "solver-failure"

    def __init__(self, message: str, iterations: int | None = None):
        super().__init__(message)
        self.iterations = iterations


class ProtocolError(NumericalError):
    """An evaluation protocol hit an undefined ratio or denominator."""

    code = "protocol-error"
