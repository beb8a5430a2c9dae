"""
Exception hierarchy for qpma.

Every error raised on purpose by the library carries the process exit code the
CLI reports for it.
"""


class QPMAError(Exception):
    """Base class for all qpma errors."""

    exit_code: int = 1


class ConfigError(QPMAError, ValueError):
    """Invalid command-line usage or configuration value."""

    exit_code = 1


class DataError(QPMAError, ValueError):
    """Input data cannot be used as given."""

    exit_code = 2


class NumericalError(QPMAError, ArithmeticError):
    """A numerical routine could not produce a usable result."""

    exit_code = 3


class CollinearDesignError(NumericalError):
    """Design matrix is numerically rank deficient."""
