"""
extract: state merging extraction from trained recognizers.
"""

import argparse
import logging

from schemas import ExtractionMethod
from services import ExtractionJob
from ..dependencies import (
    add_common_arguments,
    add_extraction_arguments,
    get_experiment_service,
    kappa_value,
    resolve_config,
    write_resolved_config,
)

logger = logging.getLogger(__name__)

OUTPUT_DIR = "extract"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("extract", help="Extract DFAs by state merging")
    add_common_arguments(parser)
    add_extraction_arguments(parser)
    parser.add_argument("--kappa", type=kappa_value, help="Similarity tolerance in (0, 1) or 'auto'")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    """
    Extract one DFA per (language, seed).

    Writes merged.nfa, final.dfa and their DOT renderings per job, appends the
    rows to extract/results.csv and prints them as JSON lines.
    """
    config = resolve_config(
        args,
        extraction={
            "data_count": args.data,
            "string_length": args.length,
            "kappa": args.kappa,
            "epoch": args.epoch,
        },
    )
    service = get_experiment_service(args, config)
    write_resolved_config(config, service.root / OUTPUT_DIR)
    return run_jobs(service, config, ExtractionMethod.STATE_MERGING)


def run_jobs(service, config, method: ExtractionMethod) -> int:
    extraction = config.extraction
    jobs = [
        ExtractionJob(
            language=language,
            seed=seed,
            method=method,
            data_count=extraction.data_count,
            string_length=extraction.string_length,
            kappa=extraction.kappa if method is ExtractionMethod.STATE_MERGING else None,
            epoch=extraction.epoch,
            artifacts=f"{OUTPUT_DIR}/tomita{language}/seed{seed}/{method.value}",
        )
        for language in config.languages
        for seed in config.seeds
    ]
    for row in service.run_jobs(jobs, f"{OUTPUT_DIR}/results.csv"):
        print(row.model_dump_json())
    return 0
