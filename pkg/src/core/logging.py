"""
Logging configuration module.

This module provides structured logging configuration with support for:
- Console logging (default)
- File logging with rotation
- JSON logging (for collecting experiment logs)
- Separate error log file
- Run id tagging of every record
"""

import logging
import logging.config
import sys
from pathlib import Path
from typing import Any

from core.config import settings
from core.context import get_run_id


def setup_logging(level: str | None = None) -> None:
    """
    Configure toolkit logging based on settings.

    Call this function once at CLI startup, before any logging occurs.

    Args:
        level: Optional level overriding ``settings.log_level``
    """
    if settings.log_file_enabled:
        log_dir = Path(settings.log_file_path).parent
        log_dir.mkdir(parents=True, exist_ok=True)

    logging.config.dictConfig(get_logging_config(level))

    logger = logging.getLogger(__name__)
    logger.debug(
        f"Logging configured: level={level or settings.log_level}, "
        f"format={settings.log_format}, "
        f"file_enabled={settings.log_file_enabled}"
    )


def get_logging_config(level: str | None = None) -> dict[str, Any]:
    """
    Get logging configuration dictionary.

    Args:
        level: Optional level overriding ``settings.log_level``

    Returns:
        Dictionary compatible with logging.config.dictConfig()
    """
    log_level = level or settings.log_level
    formatter = "json" if settings.log_format == "json" else "detailed"

    config: dict[str, Any] = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "detailed": {
                "format": (
                    "%(asctime)s - %(name)s - %(levelname)s - "
                    "[%(run_id)s] - %(message)s"
                ),
                "datefmt": "%Y-%m-%d %H:%M:%S",
            },
            "json": {
                "()": "pythonjsonlogger.json.JsonFormatter",
                "format": (
                    "%(asctime)s %(name)s %(levelname)s %(run_id)s "
                    "%(funcName)s %(message)s"
                ),
            },
        },
        "filters": {
            "run_id": {
                "()": RunIdFilter,
            },
        },
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "level": log_level,
                "formatter": formatter,
                "stream": sys.stderr,
                "filters": ["run_id"],
            },
        },
        "root": {
            "level": log_level,
            "handlers": ["console"],
        },
    }

    if settings.log_file_enabled:
        config["handlers"]["file"] = {
            "class": "logging.handlers.RotatingFileHandler",
            "level": log_level,
            "formatter": formatter,
            "filename": settings.log_file_path,
            "maxBytes": settings.log_file_max_bytes,
            "backupCount": settings.log_file_backup_count,
            "encoding": "utf-8",
            "filters": ["run_id"],
        }
        config["handlers"]["error_file"] = {
            "class": "logging.handlers.RotatingFileHandler",
            "level": "ERROR",
            "formatter": formatter,
            "filename": str(Path(settings.log_file_path).parent / "error.log"),
            "maxBytes": settings.log_file_max_bytes,
            "backupCount": settings.log_file_backup_count,
            "encoding": "utf-8",
            "filters": ["run_id"],
        }
        config["root"]["handlers"].extend(["file", "error_file"])

    return config


class RunIdFilter(logging.Filter):
    """
    Logging filter adding ``run_id`` to log records.

    The run id is bound per experiment job by core.context.run_context.
    """

    def filter(self, record: logging.LogRecord) -> bool:
        """
        Add run_id to the log record.

        Args:
            record: Log record to filter

        Returns:
            True (always allow the log record)
        """
        if not hasattr(record, "run_id"):
            record.run_id = get_run_id()
        return True
