"""
export-dot: Graphviz rendering of a stored automaton or a reference DFA.
"""

import argparse
import logging
from pathlib import Path

from core.exceptions import InvalidInputError
from repositories import AutomatonRepository, to_dot
from repositories.base import write_text_atomic
from services.language_service import gold_dfa
from ..dependencies import add_common_arguments, resolve_config, write_resolved_config

logger = logging.getLogger(__name__)

DOT_DIR = "dot"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "export-dot",
        help="Render an automaton as Graphviz DOT",
        description="Render --dfa FILE, or the reference DFA of a single --language.",
    )
    parser.add_argument("--dfa", type=Path, help="Automaton file (.dfa or .nfa)")
    parser.add_argument(
        "--output", type=Path, help="Destination file (default: <out>/dot/<name>.dot with --out, else stdout)"
    )
    add_common_arguments(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    if bool(args.dfa) == bool(args.language):
        raise InvalidInputError("export-dot needs exactly one of --dfa or --language")
    config = resolve_config(args)
    if args.dfa:
        machine = AutomatonRepository(args.dfa.parent).load_path(args.dfa)
        title = args.dfa.stem
    else:
        if len(args.language) != 1:
            raise InvalidInputError("export-dot renders one language at a time")
        language = args.language[0]
        machine = gold_dfa(language)
        title = f"tomita{language}"
    text = to_dot(machine, title)

    destination = args.output
    if destination is None and args.out:
        destination = Path(config.output_dir) / DOT_DIR / f"{title}.dot"
    if destination is None:
        print(text, end="")
        return 0
    write_text_atomic(destination, text)
    write_resolved_config(config, destination.parent)
    logger.info(f"DOT written to {destination}")
    return 0
