"""
Pydantic schemas for configuration and result records.

This package provides all Pydantic models used for:
- Experiment configuration (loading, validation, resolved-config files)
- Result, summary and training metric records
- Checkpoint metadata
"""

from .enums import ExtractionMethod, SweepKind, TrainingProfile
from .experiment import (
    DEFAULT_KAPPA,
    BaselineConfig,
    ExperimentConfig,
    ExtractionConfig,
    LanguageId,
    OptimizerConfig,
    SweepConfig,
    TrainingConfig,
)
from .results import (
    METRIC_COLUMNS,
    RESULT_COLUMNS,
    CheckpointMetadata,
    EpochMetrics,
    EvaluationSummary,
    ResultRow,
    SummaryRow,
)

__all__ = [
    # Enums
    "ExtractionMethod",
    "SweepKind",
    "TrainingProfile",
    # Experiment configuration
    "DEFAULT_KAPPA",
    "BaselineConfig",
    "ExperimentConfig",
    "ExtractionConfig",
    "LanguageId",
    "OptimizerConfig",
    "SweepConfig",
    "TrainingConfig",
    # Records
    "METRIC_COLUMNS",
    "RESULT_COLUMNS",
    "CheckpointMetadata",
    "EpochMetrics",
    "EvaluationSummary",
    "ResultRow",
    "SummaryRow",
]
