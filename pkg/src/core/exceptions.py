"""
Custom exception classes.

This module defines a hierarchy of custom exceptions that map to process exit
codes and provide consistent error documents across the CLI.

Exception hierarchy:
    AppException (base, exit 1)
    ├── ValidationError (exit 3)
    │   ├── InvalidInputError
    │   ├── InvalidLanguageError
    │   └── ConfigurationError
    ├── AutomatonError (exit 3)
    ├── InfeasibleSampleError (exit 7)
    ├── ResourceError
    │   ├── NotFoundError (exit 4)
    │   └── FileFormatError (exit 5)
    ├── TrainingDivergedError (exit 6)
    └── NotConvergedError (exit 8)
"""

from typing import Any

EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INVALID_INPUT = 3
EXIT_NOT_FOUND = 4
EXIT_BAD_FILE = 5
EXIT_DIVERGED = 6
EXIT_INFEASIBLE = 7
EXIT_NOT_CONVERGED = 8


class AppException(Exception):
    """
    Base exception class for all toolkit exceptions.

    All custom exceptions should inherit from this class to ensure
    consistent error handling and reporting.

    Attributes:
        exit_code: Process exit status for the error
        error_code: Machine-readable error code
        message: Human-readable error message
        details: Optional additional error details
    """

    def __init__(
        self,
        message: str,
        exit_code: int = EXIT_FAILURE,
        error_code: str = "INTERNAL_ERROR",
        details: dict[str, Any] | None = None,
    ) -> None:
        """
        Initialize toolkit exception.

        Args:
            message: Human-readable error message
            exit_code: Process exit status (default: 1)
            error_code: Machine-readable error code
            details: Optional dictionary with additional error details
        """
        super().__init__(message)
        self.message = message
        self.exit_code = exit_code
        self.error_code = error_code
        self.details = details or {}


# =============================================================================
# Validation Errors
# =============================================================================


class ValidationError(AppException):
    """Base class for validation errors."""

    def __init__(
        self,
        message: str = "Validation failed",
        error_code: str = "VALIDATION_ERROR",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(
            message=message,
            exit_code=EXIT_INVALID_INPUT,
            error_code=error_code,
            details=details,
        )


class InvalidInputError(ValidationError):
    """Raised for tokens outside an alphabet, alphabet mismatches and bad arguments."""

    def __init__(
        self,
        message: str = "Invalid input",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(
            message=message,
            error_code="INVALID_INPUT",
            details=details,
        )


class InvalidLanguageError(ValidationError):
    """Raised when a language id is outside the Tomita range 1-7."""

    def __init__(
        self,
        language: object,
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(
            message=f"Unknown language id {language!r}; expected an integer in 1..7",
            error_code="INVALID_LANGUAGE",
            details=details,
        )


class ConfigurationError(ValidationError):
    """Raised when an experiment configuration cannot be resolved."""

    def __init__(
        self,
        message: str = "Invalid configuration",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(
            message=message,
            error_code="INVALID_CONFIGURATION",
            details=details,
        )


# =============================================================================
# Automaton Errors
# =============================================================================


class AutomatonError(AppException):
    """Raised for malformed automata and illegal structural operations."""

    def __init__(
        self,
        message: str = "Malformed automaton",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(
            message=message,
            exit_code=EXIT_INVALID_INPUT,
            error_code="MALFORMED_AUTOMATON",
            details=details,
        )


class InfeasibleSampleError(AppException):
    """Raised when a language has no string of the requested length."""

    def __init__(
        self,
        language: object,
        length: int,
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(
            message=f"Language {language} contains no string of length {length}",
            exit_code=EXIT_INFEASIBLE,
            error_code="INFEASIBLE_SAMPLE",
            details={"language": language, "length": length, **(details or {})},
        )


# =============================================================================
# Resource Errors
# =============================================================================


class ResourceError(AppException):
    """Base class for file-backed resource errors."""

    def __init__(
        self,
        message: str,
        exit_code: int,
        error_code: str,
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(
            message=message,
            exit_code=exit_code,
            error_code=error_code,
            details=details,
        )


class NotFoundError(ResourceError):
    """Raised when a checkpoint, automaton or dataset file is missing."""

    def __init__(
        self,
        resource: str = "Resource",
        message: str | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        if message is None:
            message = f"{resource} not found"
        super().__init__(
            message=message,
            exit_code=EXIT_NOT_FOUND,
            error_code="NOT_FOUND",
            details=details,
        )


class FileFormatError(ResourceError):
    """Raised when a text document has a bad header, version or record."""

    def __init__(
        self,
        message: str = "Unreadable file",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(
            message=message,
            exit_code=EXIT_BAD_FILE,
            error_code="BAD_FILE_FORMAT",
            details=details,
        )


# =============================================================================
# Training Errors
# =============================================================================


class TrainingDivergedError(AppException):
    """Raised when the loss or a gradient becomes non-finite."""

    def __init__(
        self,
        message: str = "Training diverged",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(
            message=message,
            exit_code=EXIT_DIVERGED,
            error_code="TRAINING_DIVERGED",
            details=details,
        )


class NotConvergedError(AppException):
    """Raised when a recognizer misses 100% dev accuracy and convergence is required."""

    def __init__(
        self,
        language: int,
        seed: int,
        dev_accuracy: float,
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(
            message=(
                f"Recognizer for language {language} (seed {seed}) reached only "
                f"{dev_accuracy:.4%} dev accuracy"
            ),
            exit_code=EXIT_NOT_CONVERGED,
            error_code="NOT_CONVERGED",
            details={
                "language": language,
                "seed": seed,
                "dev_accuracy": dev_accuracy,
                **(details or {}),
            },
        )
