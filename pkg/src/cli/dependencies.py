"""
Shared CLI plumbing.

This module provides:
- Common flags (--language, --seed, --config, --out, --threads, --profile, --log-level)
- Experiment configuration resolution (defaults < config file < flags)
- Service construction and resolved-config files
"""

import argparse
import json
import logging
from pathlib import Path
from typing import Any

from pydantic import ValidationError as PydanticValidationError

from core.config import settings
from core.exceptions import ConfigurationError, NotFoundError
from repositories.base import write_text_atomic
from schemas import ExperimentConfig, TrainingConfig, TrainingProfile
from services import ExperimentService

logger = logging.getLogger(__name__)

RESOLVED_CONFIG_FILE = "resolved_config.json"


# ============================================================================
# Flag types
# ============================================================================


def int_list(value: str) -> list[int]:
    """Parse ``1,2,3`` (or ``all`` for languages) into integers."""
    if value.strip().lower() == "all":
        return [1, 2, 3, 4, 5, 6, 7]
    try:
        return [int(part) for part in value.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}") from exc


def kappa_value(value: str) -> float | str:
    """A float tolerance or ``auto``."""
    if value.strip().lower() == "auto":
        return "auto"
    try:
        return float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"kappa must be a number or 'auto', got {value!r}") from exc


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    """Flags every subcommand accepts."""
    parser.add_argument("--language", type=int_list, help="Tomita language ids, e.g. 2 or 1,3,5 or all")
    parser.add_argument(
        "--seed", type=int_list, help="Seeds, e.g. 0 or 0,1,2 (env STATEMERGE_SEED)"
    )
    parser.add_argument("--config", type=Path, help="Experiment configuration JSON file")
    parser.add_argument("--out", type=Path, help="Run directory (default from config or STATEMERGE_OUTPUT_DIR)")
    parser.add_argument(
        "--threads", type=int, default=settings.threads, help="Parallel jobs (env STATEMERGE_THREADS)"
    )
    parser.add_argument(
        "--profile", choices=[p.value for p in TrainingProfile], help="Training preset (paper or desk)"
    )
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Override STATEMERGE_LOG_LEVEL",
    )


def add_extraction_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", type=int, help="Number of extraction strings")
    parser.add_argument("--length", type=int, help="Length of extraction strings")
    parser.add_argument("--epoch", type=int, help="Checkpoint epoch (default: best epoch)")


# ============================================================================
# Configuration
# ============================================================================


def load_config_file(path: Path) -> dict[str, Any]:
    """
    Read a JSON configuration file.

    Raises:
        NotFoundError: If the file does not exist
        ConfigurationError: If it is not a JSON object
    """
    if not path.is_file():
        raise NotFoundError("config", message=f"Configuration file {path} not found")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: the configuration must be a JSON object")
    return data


def resolve_config(args: argparse.Namespace, **overrides: Any) -> ExperimentConfig:
    """
    Build the experiment configuration of a command.

    Precedence: defaults, then the ``--config`` file, then flags. Section
    overrides are passed as ``section={field: value}``; None values are ignored.

    Raises:
        ConfigurationError: If the merged configuration does not validate
    """
    data: dict[str, Any] = load_config_file(args.config) if args.config else {}
    if args.profile or "training" not in data:
        # an explicit --profile replaces the training section of the file
        data["training"] = TrainingConfig.for_profile(args.profile or settings.profile).model_dump()
    if args.language:
        data["languages"] = args.language
    if args.seed:
        data["seeds"] = args.seed
    elif "seeds" not in data and "seed" in settings.model_fields_set:
        data["seeds"] = [settings.seed]
    if args.out:
        data["output_dir"] = str(args.out)
    elif "output_dir" not in data:
        data["output_dir"] = settings.output_dir
    for section, values in overrides.items():
        updates = {key: value for key, value in values.items() if value is not None}
        if updates:
            data[section] = {**data.get(section, {}), **updates}
    data.get("extraction", {}).pop("similarity_threshold", None)

    try:
        return ExperimentConfig.model_validate(data)
    except PydanticValidationError as exc:
        raise ConfigurationError(
            "Invalid experiment configuration",
            details={"errors": exc.errors(include_url=False, include_context=False)},
        ) from exc


def write_resolved_config(config: ExperimentConfig, directory: Path | str) -> Path:
    """Store the configuration a command ran with next to its outputs."""
    path = Path(directory) / RESOLVED_CONFIG_FILE
    write_text_atomic(path, config.model_dump_json(indent=2) + "\n")
    logger.debug(f"Resolved configuration written to {path}")
    return path


def get_experiment_service(args: argparse.Namespace, config: ExperimentConfig) -> ExperimentService:
    return ExperimentService(config, config.output_dir, threads=args.threads)
