"""
Custom exceptions for the ceprecode package.

This module defines specific exception classes for the different kinds of
failure that can occur while building geometry, evaluating objectives,
running solvers and driving experiments.
"""

from typing import Optional, Sequence


class CEPrecodeError(Exception):
    """Base exception class for ceprecode errors."""

    def __init__(self, message: str, error_code: Optional[str] = None):
        """
        Initialize the exception.

        Args:
            message: Human-readable error message
            error_code: Optional error code for programmatic handling
        """
        super().__init__(message)
        self.message = message
        self.error_code = error_code


class InvalidDimensionError(CEPrecodeError):
    """Exception raised when array shapes or sizes are inconsistent."""

    def __init__(self, message: str, expected=None, actual=None):
        """
        Initialize invalid dimension error.

        Args:
            message: Description of the mismatch
            expected: Expected shape or size (if applicable)
            actual: Shape or size that was received (if applicable)
        """
        super().__init__(message, "INVALID_DIMENSION")
        self.expected = expected
        self.actual = actual


class InvalidArgumentError(CEPrecodeError):
    """Exception raised for out-of-range or unknown argument values."""

    def __init__(self, argument: str, message: str):
        """
        Initialize invalid argument error.

        Args:
            argument: Name of the offending argument
            message: Specific validation error message
        """
        super().__init__(message, "INVALID_ARGUMENT")
        self.argument = argument


class DegenerateRetractionError(CEPrecodeError):
    """Exception raised when a retraction step produces a zero column or entry."""

    def __init__(self, message: str, index: Optional[int] = None):
        """
        Initialize degenerate retraction error.

        Args:
            message: Description of the degenerate step
            index: Column (or entry) index that vanished
        """
        super().__init__(message, "DEGENERATE_RETRACTION")
        self.index = index


class LineSearchError(CEPrecodeError):
    """Exception raised when backtracking finds no acceptable step."""

    def __init__(self, message: str, backtracks: int = 0):
        """
        Initialize line search error.

        Args:
            message: Description of the failure
            backtracks: Number of contractions tried
        """
        super().__init__(message, "LINE_SEARCH_FAILURE")
        self.backtracks = backtracks


class ConfigParseError(CEPrecodeError):
    """Exception raised for malformed or inconsistent experiment configuration."""

    def __init__(self, message: str, line_number: Optional[int] = None, key: Optional[str] = None):
        """
        Initialize config parse error.

        Args:
            message: Description of the problem
            line_number: 1-based line of the configuration text (if applicable)
            key: Configuration key involved (if applicable)
        """
        location = []
        if line_number is not None:
            location.append(f"line {line_number}")
        if key is not None:
            location.append(f"key '{key}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}", "CONFIG_PARSE_ERROR")
        self.line_number = line_number
        self.key = key


class SchemaError(CEPrecodeError):
    """Exception raised when a results CSV does not have the expected columns."""

    def __init__(self, message: str, expected: Sequence[str] = (), found: Sequence[str] = ()):
        """
        Initialize schema error.

        Args:
            message: Description of the problem
            expected: Column names that were expected
            found: Column names that were found
        """
        detail = f" (expected: {', '.join(expected)}; found: {', '.join(found) or 'none'})"
        super().__init__(message + detail, "SCHEMA_ERROR")
        self.expected = list(expected)
        self.found = list(found)


class ExperimentIOError(CEPrecodeError):
    """Exception raised when results or manifests cannot be read or written."""

    def __init__(self, message: str, path: Optional[str] = None):
        """
        Initialize experiment I/O error.

        Args:
            message: I/O error description
            path: File or directory involved (if applicable)
        """
        super().__init__(message, "IO_ERROR")
        self.path = path


class NumericalError(CEPrecodeError):
    """Exception raised for non-finite values or other numerical breakdowns."""

    def __init__(self, message: str, context: Optional[str] = None):
        """
        Initialize numerical error.

        Args:
            message: Description of the failure
            context: Computation in which it occurred
        """
        super().__init__(message, "NUMERICAL_FAILURE")
        self.context = context
