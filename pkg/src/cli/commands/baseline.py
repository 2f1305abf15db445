"""
baseline: k-means extraction from trained recognizers.
"""

import argparse

from schemas import ExtractionMethod
from ..dependencies import (
    add_common_arguments,
    add_extraction_arguments,
    get_experiment_service,
    resolve_config,
    write_resolved_config,
)
from .extract import OUTPUT_DIR, run_jobs


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("baseline", help="Extract DFAs by clustering hidden states")
    add_common_arguments(parser)
    add_extraction_arguments(parser)
    parser.add_argument("--k", type=int, help="Number of clusters")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    config = resolve_config(
        args,
        extraction={"data_count": args.data, "string_length": args.length, "epoch": args.epoch},
        baseline={"k": args.k},
    )
    service = get_experiment_service(args, config)
    write_resolved_config(config, service.root / OUTPUT_DIR)
    return run_jobs(service, config, ExtractionMethod.KMEANS)
