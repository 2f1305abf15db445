"""
CLI subcommands.

Every module exposes ``register(subparsers)``, which adds its parser and binds
``run(args) -> int`` as the handler.
"""

from . import baseline, evaluate, export_dot, extract, sweep, table2, train

__all__ = [
    "baseline",
    "evaluate",
    "export_dot",
    "extract",
    "sweep",
    "table2",
    "train",
]
