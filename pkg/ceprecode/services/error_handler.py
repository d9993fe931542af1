"""
Error handling service for the ceprecode command line.

Maps exceptions to exit codes and user-facing messages, logs them at a level
chosen by error type and keeps a history of handled errors.
"""

import logging
import traceback
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional

from .. import config
from ..exceptions import (
    CEPrecodeError,
    ConfigParseError,
    DegenerateRetractionError,
    ExperimentIOError,
    InvalidArgumentError,
    InvalidDimensionError,
    LineSearchError,
    NumericalError,
    SchemaError,
)


class ErrorHandler:
    """
    Centralized error handling: logging, user messages and exit codes.
    """

    def __init__(self, report_callback: Optional[Callable[[str], None]] = None):
        """
        Args:
            report_callback: Called with the user message of every handled error
        """
        self.report_callback = report_callback
        self.logger = logging.getLogger(__name__)
        self.error_history: List[Dict[str, Any]] = []

    def handle_error(self, error: Exception, context: Optional[str] = None) -> Dict[str, Any]:
        """
        Handle an error with logging and user notification.

        Args:
            error: The exception that occurred
            context: Where the error occurred

        Returns:
            Dict[str, Any]: Error information dictionary
        """
        error_info = {
            'timestamp': datetime.now(),
            'error_type': type(error).__name__,
            'error_code': getattr(error, 'error_code', None),
            'message': str(error),
            'context': context,
            'traceback': traceback.format_exc(),
            'user_message': self.get_user_message(error),
            'exit_code': self.exit_code_for(error),
        }

        self._log_error(error_info)
        self.error_history.append(error_info)

        if self.report_callback:
            self.report_callback(error_info['user_message'])

        return error_info

    def _log_error(self, error_info: Dict[str, Any]) -> None:
        log_message = f"{error_info['error_type']} in {error_info['context'] or 'unknown context'}: {error_info['message']}"

        if error_info['error_type'] in ('LineSearchError', 'DegenerateRetractionError'):
            self.logger.warning(log_message)
        else:
            self.logger.error(log_message)

        self.logger.debug(error_info['traceback'])

    @staticmethod
    def exit_code_for(error: Exception) -> int:
        """
        Exit code of the command line for an error.

        Configuration and argument problems give 1, file problems 2 and
        numerical failures (including unexpected exceptions) 3.
        """
        if isinstance(error, (ConfigParseError, InvalidArgumentError, InvalidDimensionError)):
            return config.EXIT_CONFIG_ERROR
        if isinstance(error, (ExperimentIOError, SchemaError, OSError)):
            return config.EXIT_IO_ERROR
        return config.EXIT_NUMERICAL_ERROR

    @staticmethod
    def get_user_message(error: Exception) -> str:
        """
        Convert an exception into a one-line message for the terminal.

        Args:
            error: The exception that occurred

        Returns:
            str: User-friendly error message
        """
        if isinstance(error, ConfigParseError):
            return f"Configuration error: {error.message}"
        if isinstance(error, (InvalidArgumentError, InvalidDimensionError)):
            return f"Invalid input: {error.message}"
        if isinstance(error, SchemaError):
            return f"Results file error: {error.message}"
        if isinstance(error, ExperimentIOError):
            location = f" ({error.path})" if error.path else ""
            return f"File error{location}: {error.message}"
        if isinstance(error, OSError):
            return f"File error: {error}"
        if isinstance(error, (LineSearchError, DegenerateRetractionError, NumericalError)):
            return f"Numerical failure: {error.message}"
        if isinstance(error, CEPrecodeError):
            return f"Error: {error.message}"
        return f"Unexpected error: {error}"

    def get_error_history(self) -> List[Dict[str, Any]]:
        return self.error_history.copy()

    def clear_error_history(self) -> None:
        self.error_history.clear()
