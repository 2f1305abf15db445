"""
eval: held-out accuracy of a recognizer, and of a stored DFA against it.
"""

import argparse
import logging
from pathlib import Path

from core.exceptions import InvalidInputError
from models import Dfa
from repositories import AutomatonRepository
from repositories.base import write_text_atomic
from ..dependencies import (
    add_common_arguments,
    get_experiment_service,
    resolve_config,
    write_resolved_config,
)

logger = logging.getLogger(__name__)

OUTPUT_DIR = "eval"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("eval", help="Evaluate a recognizer and optionally a DFA")
    add_common_arguments(parser)
    parser.add_argument("--epoch", type=int, help="Checkpoint epoch (default: best epoch)")
    parser.add_argument("--dfa", type=Path, help="DFA file to score against the recognizer")
    parser.set_defaults(handler=run)


def load_dfa(path: Path) -> Dfa:
    """
    Read a stored DFA.

    Raises:
        NotFoundError: If the file does not exist
        InvalidInputError: If the file holds a nondeterministic automaton
    """
    machine = AutomatonRepository(path.parent).load_path(path)
    if not isinstance(machine, Dfa):
        raise InvalidInputError(f"{path} holds an NFA; determinize it first", details={"path": str(path)})
    return machine


def run(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    service = get_experiment_service(args, config)
    directory = service.root / OUTPUT_DIR
    write_resolved_config(config, directory)
    dfa = load_dfa(args.dfa) if args.dfa else None
    for language in config.languages:
        for seed in config.seeds:
            summary = service.evaluate(language, seed, args.epoch, dfa)
            document = summary.model_dump_json()
            write_text_atomic(
                directory / f"tomita{language}_seed{seed}_epoch{summary.epoch:03d}.json",
                document + "\n",
            )
            print(document)
    return 0
