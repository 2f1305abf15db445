"""
Experiment configuration schemas.

This module provides:
- Optimizer, training, extraction, baseline and sweep configuration
- ExperimentConfig, the complete and serializable description of a run

A run is reproducible from its resolved configuration file alone; every
command writes ``resolved_config.json`` next to its outputs.
"""

from typing import Annotated, Literal

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    computed_field,
    field_validator,
    model_validator,
)

from .enums import TrainingProfile

LanguageId = Annotated[int, Field(ge=1, le=7, description="Tomita language 1-7")]

DEFAULT_KAPPA = 0.01


class OptimizerConfig(BaseModel):
    """
    AdamW hyperparameters (the usual library defaults).

    Attributes:
        lr: Learning rate
        beta1: First moment decay
        beta2: Second moment decay
        eps: Denominator stabilizer
        weight_decay: Decoupled weight decay coefficient
    """

    model_config = ConfigDict(frozen=True)

    lr: float = Field(default=1e-3, gt=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    eps: float = Field(default=1e-8, gt=0)
    weight_decay: float = Field(default=1e-2, ge=0)


class TrainingConfig(BaseModel):
    """
    Recognizer training protocol.

    Half of the training strings are uniform over Σ^n, the other half are
    uniform over the members of the language of length n.
    """

    model_config = ConfigDict(frozen=True)

    train_count: int = Field(default=20_000, ge=2)
    train_length: int = Field(default=50, ge=1)
    dev_count: int = Field(default=1_000, ge=1)
    dev_length: int = Field(default=100, ge=1)
    epochs: int = Field(default=10, ge=1)
    batch_size: int = Field(default=64, ge=1)
    embed_dim: int = Field(default=10, ge=1)
    hidden_dim: int = Field(default=100, ge=1)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    require_convergence: bool = Field(
        default=True,
        description="Fail the run when the best dev accuracy is below 100%",
    )

    @classmethod
    def for_profile(cls, profile: TrainingProfile | str) -> "TrainingConfig":
        """
        Build the preset for a training profile.

        Args:
            profile: ``paper`` or ``desk``

        Returns:
            TrainingConfig for that profile
        """
        if TrainingProfile(profile) is TrainingProfile.PAPER:
            return cls(
                train_count=100_000,
                train_length=100,
                dev_count=1_000,
                dev_length=200,
                epochs=22,
            )
        return cls()


class ExtractionConfig(BaseModel):
    """
    State merging extraction and evaluation parameters.

    ``kappa`` is the similarity tolerance: two states may merge when their
    cosine similarity exceeds ``1 - kappa``. ``"auto"`` derives it from the
    measured saturation of the recognizer.
    """

    model_config = ConfigDict(frozen=True)

    kappa: float | Literal["auto"] = Field(default=DEFAULT_KAPPA)
    data_count: int = Field(default=300, ge=1)
    string_length: int = Field(default=10, ge=0)
    eval_count: int = Field(default=1_000, ge=1)
    eval_max_len: int = Field(default=50, ge=0)
    epoch: int | None = Field(
        default=None, description="Checkpoint epoch; None selects the best epoch"
    )

    @field_validator("kappa")
    @classmethod
    def validate_kappa(cls, value: float | str) -> float | str:
        """Kappa must lie strictly between 0 and 1."""
        if isinstance(value, str):
            return value
        if not 0.0 < value < 1.0:
            raise ValueError("kappa must satisfy 0 < kappa < 1")
        return value

    @computed_field  # type: ignore[prop-decorator]
    @property
    def similarity_threshold(self) -> float | None:
        """Cosine similarity that a pair must exceed to merge."""
        if isinstance(self.kappa, str):
            return None
        return 1.0 - self.kappa


class BaselineConfig(BaseModel):
    """k-means baseline parameters."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(default=20, ge=1)
    max_iter: int = Field(default=100, ge=1)


class SweepConfig(BaseModel):
    """
    Parameter grids for the sweeps.

    The epoch sweep reads the similarity threshold 0.99 of the implicit
    merging plots as ``epoch_kappa = 0.01``.
    """

    model_config = ConfigDict(frozen=True)

    data_grid: list[int] = Field(
        default=[5, 10, 25, 50, 75, 100, 135, 200, 300, 500]
    )
    data_length: int = Field(default=15, ge=0)
    data_seeds: int = Field(default=5, ge=1)
    kappa_language: LanguageId = Field(default=2)
    kappa_grid: list[float] = Field(default=[0.5, 0.4, 0.01])
    epoch_kappa: float = Field(default=DEFAULT_KAPPA, gt=0, lt=1)
    epoch_data_count: int = Field(default=300, ge=1)
    epoch_data_grid: list[int] = Field(default=[5, 10, 25, 50, 100, 200, 300])
    early_epoch: int = Field(default=2, ge=0)
    late_epoch: int = Field(default=20, ge=0)
    epoch_seeds: int = Field(default=3, ge=1)
    sanity_languages: list[LanguageId] = Field(default=[2, 5])
    sanity_grid: list[int] = Field(default=[1, 2, 5, 10, 15, 20, 25, 30, 40, 50])
    sanity_seeds: int = Field(default=3, ge=1)

    @field_validator("kappa_grid")
    @classmethod
    def validate_kappa_grid(cls, value: list[float]) -> list[float]:
        """Every grid value must be a valid kappa."""
        if any(not 0.0 < kappa < 1.0 for kappa in value):
            raise ValueError("kappa grid values must satisfy 0 < kappa < 1")
        return value

    @field_validator("data_grid", "epoch_data_grid", "sanity_grid")
    @classmethod
    def validate_count_grid(cls, value: list[int]) -> list[int]:
        """Data counts must be positive and listed in increasing order."""
        if any(count < 1 for count in value) or value != sorted(value):
            raise ValueError("data grids must hold positive, increasing counts")
        return value


class ExperimentConfig(BaseModel):
    """
    Complete experiment description.

    Attributes:
        languages: Tomita languages to process
        seeds: Seeds; each seed drives training data, init and extraction data
        training: Recognizer training protocol
        extraction: State merging parameters
        baseline: k-means parameters
        sweep: Sweep grids
        output_dir: Root directory of every artifact
        train_if_missing: Train recognizers whose checkpoints are absent
    """

    model_config = ConfigDict(frozen=True)

    languages: list[LanguageId] = Field(default=[1, 2, 3, 4, 5, 6, 7], min_length=1)
    seeds: list[int] = Field(default=[0, 1, 2, 3, 4], min_length=1)
    training: TrainingConfig = Field(default_factory=TrainingConfig)
    extraction: ExtractionConfig = Field(default_factory=ExtractionConfig)
    baseline: BaselineConfig = Field(default_factory=BaselineConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    output_dir: str = Field(default="runs")
    train_if_missing: bool = Field(default=True)

    @field_validator("seeds")
    @classmethod
    def validate_seeds(cls, value: list[int]) -> list[int]:
        """Seeds are non-negative and distinct."""
        if any(seed < 0 for seed in value):
            raise ValueError("seeds must be non-negative")
        if len(set(value)) != len(value):
            raise ValueError("seeds must be distinct")
        return value

    @model_validator(mode="after")
    def validate_languages_unique(self) -> "ExperimentConfig":
        """Languages are listed at most once."""
        if len(set(self.languages)) != len(self.languages):
            raise ValueError("languages must be distinct")
        return self
