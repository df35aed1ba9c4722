"""Exception hierarchy shared by the library, the CLI and the API."""
from typing import Optional


class MfhdError(Exception):
    """Base class for all errors raised by mfhd."""
    exit_code = 1


class InputError(MfhdError, ValueError):
    """Bad user-supplied data or arguments."""
    exit_code = 2


class CsvParseError(InputError):
    """Malformed CSV file."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonNumericCellError(InputError):
    """A predictor or response cell that does not parse as a finite number."""

    def __init__(self, line: int, column: str, value: str):
        self.line = line
        self.column = column
        self.value = value
        super().__init__(f"line {line}: column '{column}' has non-numeric value {value!r}")


class DegenerateBasisError(InputError):
    """The response has too few distinct values for the requested basis size."""


class DomainError(MfhdError, ValueError):
    """An argument outside the mathematical domain of an operation."""
    exit_code = 2


class PowerUndefinedError(DomainError):
    """Power requested against an empty active set."""


class DegenerateTestError(MfhdError, ArithmeticError):
    """The covariance of the score vector cannot be inverted reliably."""
    exit_code = 3
