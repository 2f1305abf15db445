"""
Exception handlers for the CLI.

This module provides:
- Toolkit exception handler (AppException)
- General unhandled exception handler (Exception)

Both write a JSON error document to stderr and return the exit status.
"""

import json
import logging
import sys
from typing import TextIO

from core.config import settings
from core.context import get_run_id
from core.exceptions import EXIT_FAILURE, AppException

logger = logging.getLogger(__name__)


def app_exception_handler(exc: AppException, stream: TextIO | None = None) -> int:
    """
    Handle toolkit exceptions.

    Returns:
        The exception's exit code
    """
    logger.warning(f"Toolkit exception: {exc.error_code} - {exc.message}")

    _write_error(
        stream,
        {
            "error": {
                "code": exc.error_code,
                "message": exc.message,
                "details": exc.details,
            },
            "meta": {"run_id": get_run_id()},
        },
    )
    return exc.exit_code


def general_exception_handler(exc: Exception, stream: TextIO | None = None) -> int:
    """
    Handle unexpected exceptions.

    Logs the full traceback and reports a generic message unless debug is on.
    """
    logger.error(f"Unexpected error: {exc}", exc_info=True)

    _write_error(
        stream,
        {
            "error": {
                "code": "INTERNAL_ERROR",
                "message": (
                    "An unexpected error occurred. Re-run with STATEMERGE_DEBUG=1 "
                    "for details."
                    if not settings.debug
                    else str(exc)
                ),
                "details": {},
            },
            "meta": {"run_id": get_run_id()},
        },
    )
    return EXIT_FAILURE


def _write_error(stream: TextIO | None, document: dict) -> None:
    out = stream or sys.stderr
    out.write(json.dumps(document, default=str) + "\n")
    out.flush()
