"""
train: fit recognizers and store per-epoch checkpoints and metrics.
"""

import argparse
import json
import logging

from ..dependencies import (
    add_common_arguments,
    get_experiment_service,
    resolve_config,
    write_resolved_config,
)

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("train", help="Train recognizers (one per language and seed)")
    add_common_arguments(parser)
    parser.add_argument("--epochs", type=int, help="Override the number of epochs")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    """
    Train every requested (language, seed) recognizer from scratch.

    Prints one JSON line per run with the selected epoch and its dev accuracy.
    """
    config = resolve_config(args, training={"epochs": args.epochs})
    service = get_experiment_service(args, config)
    write_resolved_config(config, service.checkpoints.root)
    results = service.train_all(config.languages, config.seeds)
    for result in results:
        best = result.best.metadata
        print(
            json.dumps(
                {
                    "language": best.language,
                    "seed": best.seed,
                    "best_epoch": result.best_epoch,
                    "dev_accuracy": best.dev_accuracy,
                    "dev_string_accuracy": best.dev_string_accuracy,
                    "converged": result.converged,
                }
            )
        )
    return 0
