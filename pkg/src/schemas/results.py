"""
Result and record schemas.

This module provides:
- ResultRow: one extraction outcome (one line of a results table)
- SummaryRow: mean/std/median/quartiles over seeds
- EpochMetrics: one line of a training metrics table
- CheckpointMetadata: metadata block of a checkpoint file
- EvaluationSummary: output of the eval command
"""

from pydantic import BaseModel, ConfigDict, Field

from .enums import ExtractionMethod

RESULT_COLUMNS: tuple[str, ...] = (
    "language",
    "method",
    "seed",
    "epoch",
    "data_count",
    "kappa",
    "accuracy_rnn",
    "accuracy_gold",
    "accuracy_trie",
    "prefix_fidelity",
    "train_fidelity",
    "trie_size",
    "merged_size",
    "minimized_size",
    "equivalent_to_gold",
    "wall_time",
)

METRIC_COLUMNS: tuple[str, ...] = (
    "epoch",
    "train_loss",
    "dev_accuracy",
    "dev_string_accuracy",
    "param_norm",
)


class ResultRow(BaseModel):
    """
    Outcome of one extraction job.

    Attributes:
        language: Tomita language
        method: state_merging or kmeans
        seed: Seed of the recognizer and extraction data
        epoch: Checkpoint epoch the features came from
        data_count: Number of strings used for extraction
        kappa: Similarity tolerance (None for kmeans)
        accuracy_rnn: Full-string agreement with the recognizer (fidelity)
        accuracy_gold: Full-string agreement with the gold language
        accuracy_trie: Held-out agreement of the unmerged prefix tree with the recognizer
        prefix_fidelity: Per-prefix agreement with the recognizer
        train_fidelity: Per-prefix agreement on the extraction strings (None for kmeans)
        trie_size: Prefix tree states (None for kmeans)
        merged_size: States after merging (clusters kept for kmeans)
        minimized_size: States of the minimized DFA
        equivalent_to_gold: Whether the minimized DFA recognizes the gold language
        wall_time: Seconds spent in extraction and evaluation
    """

    model_config = ConfigDict(frozen=True)

    language: int = Field(ge=1, le=7)
    method: ExtractionMethod
    seed: int = Field(ge=0)
    epoch: int = Field(ge=0)
    data_count: int = Field(ge=1)
    kappa: float | None = None
    accuracy_rnn: float = Field(ge=0.0, le=1.0)
    accuracy_gold: float = Field(ge=0.0, le=1.0)
    accuracy_trie: float | None = Field(default=None, ge=0.0, le=1.0)
    prefix_fidelity: float = Field(ge=0.0, le=1.0)
    train_fidelity: float | None = Field(default=None, ge=0.0, le=1.0)
    trie_size: int | None = Field(default=None, ge=1)
    merged_size: int = Field(ge=1)
    minimized_size: int = Field(ge=1)
    equivalent_to_gold: bool
    wall_time: float = Field(ge=0.0)


class SummaryRow(BaseModel):
    """
    Statistics of one (language, method, epoch, data count) group over seeds,
    split by kappa for the kappa sweep.

    Standard deviations are population deviations (ddof=0).
    """

    model_config = ConfigDict(frozen=True)

    language: int
    method: ExtractionMethod
    epoch: int | None = None
    data_count: int
    kappa: float | None = None
    runs: int
    accuracy_mean: float
    accuracy_std: float
    accuracy_median: float
    accuracy_q25: float
    accuracy_q75: float
    merged_size_median: float
    minimized_size_median: float
    minimized_size_min: int
    gold_size: int
    equivalent_runs: int
    trie_accuracy_mean: float | None = None
    trie_accuracy_std: float | None = None


class EpochMetrics(BaseModel):
    """Per-epoch training measurements."""

    model_config = ConfigDict(frozen=True)

    epoch: int = Field(ge=0)
    train_loss: float
    dev_accuracy: float = Field(ge=0.0, le=1.0)
    dev_string_accuracy: float = Field(ge=0.0, le=1.0)
    param_norm: float = Field(ge=0.0)


class CheckpointMetadata(BaseModel):
    """Metadata stored with every checkpoint."""

    model_config = ConfigDict(frozen=True)

    language: int = Field(ge=1, le=7)
    epoch: int = Field(ge=0)
    seed: int = Field(ge=0)
    dev_accuracy: float = Field(ge=0.0, le=1.0)
    dev_string_accuracy: float = Field(default=0.0, ge=0.0, le=1.0)
    train_loss: float = Field(default=0.0)
    param_norm: float = Field(ge=0.0)


class EvaluationSummary(BaseModel):
    """Held-out evaluation of a checkpoint and, optionally, of a DFA against it."""

    model_config = ConfigDict(frozen=True)

    language: int = Field(ge=1, le=7)
    seed: int = Field(ge=0)
    epoch: int = Field(ge=0)
    count: int = Field(ge=1)
    rnn_prefix_accuracy: float = Field(ge=0.0, le=1.0)
    rnn_string_accuracy: float = Field(ge=0.0, le=1.0)
    dfa_accuracy_rnn: float | None = Field(default=None, ge=0.0, le=1.0)
    dfa_accuracy_gold: float | None = Field(default=None, ge=0.0, le=1.0)
    dfa_prefix_fidelity: float | None = Field(default=None, ge=0.0, le=1.0)
    dfa_size: int | None = None
    equivalent_to_gold: bool | None = None
