"""
statemerge command-line entry point.

This module sets up:
- The argument parser and its subcommands
- Logging
- Exception handling and exit codes

Usage:
    python src/main.py train --language 2 --seed 0 --profile desk
    python src/main.py extract --language 2 --seed 0 --kappa 0.01
    python src/main.py table2 --threads 4
"""

import argparse
import logging
import sys

from cli.commands import baseline, evaluate, export_dot, extract, sweep, table2, train
from core.exceptions import EXIT_USAGE, AppException
from core.handlers import app_exception_handler, general_exception_handler
from core.logging import setup_logging

logger = logging.getLogger(__name__)

COMMANDS = (train, extract, baseline, evaluate, sweep, table2, export_dot)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statemerge",
        description="Train recurrent recognizers on Tomita languages and extract automata from them.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    """
    Parse ``argv`` and run the selected command.

    Returns:
        Process exit status (0 on success, 2 on usage errors, the error's
        exit code for toolkit exceptions)
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    setup_logging(getattr(args, "log_level", None))
    try:
        return args.handler(args)
    except AppException as exc:
        return app_exception_handler(exc)
    except KeyboardInterrupt:
        logger.warning("Interrupted")
        return 130
    except Exception as exc:
        return general_exception_handler(exc)


if __name__ == "__main__":
    sys.exit(main())
