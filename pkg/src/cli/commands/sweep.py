"""
sweep: the data size, kappa, epoch and prefix tree experiments.
"""

import argparse
import logging

from schemas import SweepKind
from ..dependencies import (
    add_common_arguments,
    get_experiment_service,
    resolve_config,
    write_resolved_config,
)

logger = logging.getLogger(__name__)

# sweep -> (service method, output directory)
SWEEPS: dict[SweepKind, tuple[str, str]] = {
    SweepKind.DATA: ("sweep_data_size", "sweep_data"),
    SweepKind.KAPPA: ("sweep_kappa", "sweep_kappa"),
    SweepKind.EPOCHS: ("sweep_epochs", "sweep_epochs"),
    SweepKind.SANITY: ("sweep_sanity", "sweep_sanity"),
}


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("sweep", help="Run one of the parameter sweeps")
    parser.add_argument(
        "name",
        type=SweepKind,
        choices=list(SweepKind),
        metavar="{" + ",".join(kind.value for kind in SweepKind) + "}",
        help="Which sweep to run",
    )
    add_common_arguments(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    service = get_experiment_service(args, config)
    kind = SweepKind(args.name)
    method, directory = SWEEPS[kind]
    write_resolved_config(config, service.root / directory)
    first, second = getattr(service, method)()
    # the epoch sweep returns two result tables; the others return results and a summary
    rows = first + second if kind is SweepKind.EPOCHS else second
    for row in rows:
        print(row.model_dump_json())
    logger.info(f"Sweep {kind.value} finished; tables under {service.root / directory}")
    return 0
