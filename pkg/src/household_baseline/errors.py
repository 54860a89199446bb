"""
Exception hierarchy for the household baseline pipeline.

Every error carries the process exit code the CLI reports for it, so the
command layer only needs a single ``except BaselineError`` clause.
"""

from typing import Optional


class BaselineError(Exception):
    """Root of all pipeline errors."""

    exit_code = 1


# =============================================================================
# Input errors (exit 2)
# =============================================================================

class InputError(BaselineError, ValueError):
    """Bad input: malformed files, invalid arguments, broken invariants."""

    exit_code = 2


class ParseError(InputError):
    """
    A row of an input file could not be parsed.

    Args:
        message: Human readable description
        line: 1-based line number in the file (header is line 1)
        field: Name of the offending field (e.g. 'timestamp')
        path: File the row came from, if known
    """

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        field: Optional[str] = None,
        path: Optional[str] = None,
    ):
        self.line = line
        self.field = field
        self.path = path
        location = ""
        if path:
            location += f"{path}:"
        if line is not None:
            location += f"line {line}:"
        if field:
            location += f" field '{field}':"
        super().__init__(f"{location} {message}".strip())


class SchemaError(InputError):
    """A document has the wrong shape (missing keys, wrong lengths)."""


class ValidationError(InputError):
    """A value is well-formed but violates a domain rule."""


class ConfigurationError(InputError):
    """Invalid configuration: unknown time zone, bad mode name, bad threshold."""


class PreconditionError(InputError):
    """An operation was called with inputs that break its precondition."""


# =============================================================================
# Data sufficiency errors (exit 3)
# =============================================================================

class InsufficientDataError(BaselineError):
    """Not enough observed data to carry out the computation."""

    exit_code = 3


class DegenerateDistributionError(InsufficientDataError):
    """Observed data exists but cannot be normalised (e.g. all zeros)."""


class InvalidFactorError(BaselineError, ValueError):
    """An adjustment factor cannot be used to fill months."""

    exit_code = 3


# =============================================================================
# Savings adjustment errors (exit 4)
# =============================================================================

class AdjustmentUndefinedError(BaselineError):
    """The temperature adjustment ratio is undefined for the given data."""

    exit_code = 4
