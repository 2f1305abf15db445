"""
table2: state merging against k-means on every language and seed.
"""

import argparse

from ..dependencies import (
    add_common_arguments,
    get_experiment_service,
    resolve_config,
    write_resolved_config,
)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("table2", help="Compare both extraction methods on all languages")
    add_common_arguments(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    """Writes table2/results.csv and table2/summary.csv; prints the summary rows."""
    config = resolve_config(args)
    service = get_experiment_service(args, config)
    write_resolved_config(config, service.root / "table2")
    _, summary = service.reproduce_table2()
    for row in summary:
        print(row.model_dump_json())
    return 0
