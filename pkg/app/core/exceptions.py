"""Custom exceptions for toolkit operations.

Each exception carries the process exit code the command-line front end
returns for it: 2 for configuration and contract errors, 3 for data and
parse errors, 4 for numeric errors.
"""

from typing import Any, Dict, Optional

EXIT_OK = 0
EXIT_CONTRACT = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


class ToolkitError(Exception):
    """Base exception for toolkit errors."""

    exit_code: int = EXIT_CONTRACT

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        """
        Initialize toolkit error.

        Args:
            message: Error message
            details: Additional error details
        """
        super().__init__(message)
        self.details = details or {}


class ConfigurationError(ToolkitError):
    """Raised when a run configuration is invalid."""

    exit_code = EXIT_CONTRACT


class ContractError(ToolkitError, ValueError):
    """Raised when an operation's preconditions are violated."""

    exit_code = EXIT_CONTRACT


class DomainError(ContractError):
    """Raised when a cosine operation receives a zero-norm vector."""

    pass


class DataError(ToolkitError):
    """Raised when input data is unusable."""

    exit_code = EXIT_DATA


class ParseError(DataError):
    """Raised when an input file violates its format."""

    def __init__(self, message: str, line_number: Optional[int] = None, source: str = ""):
        """
        Initialize parse error.

        Args:
            message: Error message (line number is appended when given)
            line_number: 1-based line number of the offending line
            source: Name of the input being parsed
        """
        if line_number is not None:
            message = f"{message} at line {line_number}"
        if source:
            message = f"{source}: {message}"
        super().__init__(message, {"line_number": line_number, "source": source})
        self.line_number = line_number
        self.source = source


class LexiconConflictError(DataError):
    """Raised when a lexicon lists one word with both polarities."""

    def __init__(self, message: str, word: str):
        """
        Initialize lexicon conflict error.

        Args:
            message: Error message
            word: Conflicting word
        """
        super().__init__(message, {"word": word})
        self.word = word


class EmptyTrainingSetError(DataError):
    """Raised when no dictionary entry survives vocabulary resolution."""

    def __init__(self, skipped: int):
        """
        Initialize empty training set error.

        Args:
            skipped: Number of dictionary entries dropped as out-of-vocabulary
        """
        super().__init__(
            f"empty training set ({skipped} entries skipped as out-of-vocabulary)",
            {"skipped": skipped},
        )
        self.skipped = skipped


class RunDirectoryExistsError(DataError):
    """Raised when a run would overwrite an existing run directory."""

    pass


class NumericError(ToolkitError):
    """Raised when arithmetic produces non-finite values."""

    exit_code = EXIT_NUMERIC
