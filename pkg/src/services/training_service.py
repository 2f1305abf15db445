"""
Recognizer training.

This module provides RnnTrainer, which runs minibatch AdamW training with
full backpropagation through time, evaluates on a dev set after every epoch,
saves one checkpoint per epoch and selects the best epoch.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from core.exceptions import InvalidInputError, TrainingDivergedError
from models import AdamState, Checkpoint, LabeledSample, RnnModel
from repositories import CheckpointRepository, ResultsRepository
from schemas import CheckpointMetadata, EpochMetrics, TrainingConfig
from .evaluation_service import EVAL_BATCH, rnn_accuracy
from .rnn_service import adamw_step, batch_loss, loss_and_gradients

logger = logging.getLogger(__name__)

METRICS_FILE = "metrics.csv"


@dataclass(frozen=True)
class TrainingResult:
    """
    Outcome of a training run.

    Attributes:
        checkpoints: One checkpoint per epoch, epoch 0 being the initialization
        metrics: Per-epoch measurements, aligned with ``checkpoints``
        best_epoch: Highest epoch reaching the maximal dev accuracy
    """

    checkpoints: list[Checkpoint]
    metrics: list[EpochMetrics]
    best_epoch: int

    @property
    def best(self) -> Checkpoint:
        return self.checkpoints[self.best_epoch]

    @property
    def converged(self) -> bool:
        """Whether the best checkpoint labels every dev prefix correctly."""
        return self.best.metadata.dev_accuracy == 1.0


def select_best_epoch(metrics: list[EpochMetrics]) -> int:
    """Highest epoch among those with maximal per-prefix dev accuracy."""
    if not metrics:
        raise InvalidInputError("No epochs to select from")
    top = max(m.dev_accuracy for m in metrics)
    return max(m.epoch for m in metrics if m.dev_accuracy == top)


class RnnTrainer:
    """
    Minibatch trainer for RnnModel.

    Training is deterministic given the generator: batches are drawn from a
    fresh permutation every epoch. Checkpoints and the metrics table are
    written as soon as an epoch finishes when repositories are supplied.
    """

    def __init__(
        self,
        config: TrainingConfig,
        checkpoints: CheckpointRepository | None = None,
        tables: ResultsRepository | None = None,
    ):
        """
        Initialize the trainer.

        Args:
            config: Training protocol (epochs, batch size, optimizer)
            checkpoints: Where per-epoch checkpoints go (optional)
            tables: Where the metrics table goes (optional)
        """
        self.config = config
        self.checkpoints = checkpoints
        self.tables = tables

    def train(
        self,
        model: RnnModel,
        train_set: list[LabeledSample],
        dev_set: list[LabeledSample],
        rng: np.random.Generator,
        language: int,
        seed: int,
        epochs: int | None = None,
    ) -> TrainingResult:
        """
        Train ``model`` and checkpoint every epoch.

        Args:
            model: Initialized recognizer
            train_set: Labeled training strings
            dev_set: Labeled development strings
            rng: Generator for batch order
            language: Language id recorded in checkpoint metadata
            seed: Seed recorded in checkpoint metadata
            epochs: Override for ``config.epochs``

        Returns:
            TrainingResult

        Raises:
            InvalidInputError: If a set is empty
            TrainingDivergedError: On a non-finite loss or gradient
        """
        if not train_set or not dev_set:
            raise InvalidInputError(
                "Training needs non-empty train and dev sets",
                details={"train": len(train_set), "dev": len(dev_set)},
            )
        epochs = self.config.epochs if epochs is None else epochs
        batch_size = self.config.batch_size
        n_batches = math.ceil(len(train_set) / batch_size)
        logger.info(
            f"Training tomita{language} seed {seed}: {len(train_set)} strings, "
            f"{epochs} epochs, {n_batches} batches per epoch"
        )

        state = AdamState.zeros(model.parameters())
        initial_loss = self._mean_loss(model, train_set)
        checkpoints = [self._checkpoint(model, dev_set, language, seed, 0, initial_loss)]
        for epoch in range(1, epochs + 1):
            order = rng.permutation(len(train_set))
            losses = []
            for index in range(n_batches):
                chunk = [train_set[i] for i in order[index * batch_size : (index + 1) * batch_size]]
                model, state, loss = self._step(model, state, chunk, epoch, index)
                losses.append(loss)
            checkpoints.append(
                self._checkpoint(model, dev_set, language, seed, epoch, float(np.mean(losses)))
            )

        metrics = [self._metrics(ckpt.metadata) for ckpt in checkpoints]
        best_epoch = select_best_epoch(metrics)
        result = TrainingResult(checkpoints=checkpoints, metrics=metrics, best_epoch=best_epoch)
        if self.checkpoints is not None:
            self.checkpoints.save_best(result.best.metadata)
        logger.info(
            f"Best epoch for tomita{language} seed {seed}: {best_epoch} "
            f"(dev accuracy {result.best.metadata.dev_accuracy:.4f})"
        )
        return result

    def _step(
        self,
        model: RnnModel,
        state: AdamState,
        chunk: list[LabeledSample],
        epoch: int,
        index: int,
    ) -> tuple[RnnModel, AdamState, float]:
        loss, grads = loss_and_gradients(model, [s.x for s in chunk], [s.y for s in chunk])
        where = {"epoch": epoch, "batch": index}
        if not math.isfinite(loss):
            raise TrainingDivergedError(
                f"Non-finite loss at epoch {epoch}, batch {index}", details=where
            )
        try:
            params, state = adamw_step(model.parameters(), grads, state, self.config.optimizer)
        except TrainingDivergedError as exc:
            raise TrainingDivergedError(
                f"{exc.message} at epoch {epoch}, batch {index}",
                details={**exc.details, **where},
            ) from exc
        return model.with_parameters(params), state, loss

    def _mean_loss(self, model: RnnModel, samples: list[LabeledSample]) -> float:
        losses, sizes = [], []
        for start in range(0, len(samples), EVAL_BATCH):
            chunk = samples[start : start + EVAL_BATCH]
            losses.append(batch_loss(model, [s.x for s in chunk], [s.y for s in chunk]))
            sizes.append(len(chunk))
        return float(np.average(losses, weights=sizes))

    def _checkpoint(
        self,
        model: RnnModel,
        dev_set: list[LabeledSample],
        language: int,
        seed: int,
        epoch: int,
        train_loss: float,
    ) -> Checkpoint:
        dev_accuracy, dev_string_accuracy = rnn_accuracy(model, dev_set)
        checkpoint = Checkpoint(
            model=model,
            metadata=CheckpointMetadata(
                language=language,
                epoch=epoch,
                seed=seed,
                dev_accuracy=dev_accuracy,
                dev_string_accuracy=dev_string_accuracy,
                train_loss=train_loss,
                param_norm=model.parameter_norm(),
            ),
        )
        logger.info(
            f"Epoch {epoch}: loss {train_loss:.5f}, dev accuracy {dev_accuracy:.4f} "
            f"(strings {dev_string_accuracy:.4f}), parameter norm "
            f"{checkpoint.metadata.param_norm:.2f}"
        )
        if self.checkpoints is not None:
            self.checkpoints.save_checkpoint(checkpoint)
        if self.tables is not None:
            self.tables.append_metrics(
                f"{CheckpointRepository.run_dir(language, seed)}/{METRICS_FILE}",
                [self._metrics(checkpoint.metadata)],
            )
        return checkpoint

    @staticmethod
    def _metrics(meta: CheckpointMetadata) -> EpochMetrics:
        return EpochMetrics(
            epoch=meta.epoch,
            train_loss=meta.train_loss,
            dev_accuracy=meta.dev_accuracy,
            dev_string_accuracy=meta.dev_string_accuracy,
            param_norm=meta.param_norm,
        )
