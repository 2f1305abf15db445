"""
Unit tests for recognizer training.

Tests cover:
- Checkpoint and metric bookkeeping per epoch
- Best-epoch selection
- Loss reduction on a memorization task
- Determinism and persisted artifacts
"""

import numpy as np
import pytest

from core.exceptions import InvalidInputError
from repositories import CheckpointRepository, ResultsRepository
from schemas import EpochMetrics, OptimizerConfig, TrainingConfig
from services.language_service import labels_for
from services.rnn_service import init_model
from services.training_service import RnnTrainer, select_best_epoch

TRAIN_WORDS = ["", "ab", "abab", "a", "ba", "abb", "aab", "ababab"]
DEV_WORDS = ["abababab", "abba", "b", "aa"]


def config(epochs: int = 3, batch_size: int = 64, lr: float = 1e-2) -> TrainingConfig:
    return TrainingConfig(
        epochs=epochs,
        batch_size=batch_size,
        embed_dim=3,
        hidden_dim=8,
        optimizer=OptimizerConfig(lr=lr),
    )


def train(trainer: RnnTrainer, seed: int = 0, **kwargs):
    model = init_model(3, 8, np.random.default_rng(seed))
    return trainer.train(
        model,
        labels_for(2, TRAIN_WORDS),
        labels_for(2, DEV_WORDS),
        np.random.default_rng(seed + 1),
        language=2,
        seed=seed,
        **kwargs,
    )


def metrics(accuracies: list[float]) -> list[EpochMetrics]:
    return [
        EpochMetrics(
            epoch=epoch,
            train_loss=1.0,
            dev_accuracy=accuracy,
            dev_string_accuracy=accuracy,
            param_norm=1.0,
        )
        for epoch, accuracy in enumerate(accuracies)
    ]


class TestSelectBestEpoch:
    """Tests for select_best_epoch."""

    def test_highest_accuracy_wins(self) -> None:
        assert select_best_epoch(metrics([0.5, 0.9, 0.7])) == 1

    def test_ties_go_to_the_latest_epoch(self) -> None:
        assert select_best_epoch(metrics([0.5, 1.0, 0.7, 1.0, 0.2])) == 3

    def test_initialization_can_win(self) -> None:
        assert select_best_epoch(metrics([0.8, 0.1])) == 0

    def test_empty_raises(self) -> None:
        with pytest.raises(InvalidInputError):
            select_best_epoch([])


class TestRnnTrainer:
    """Tests for RnnTrainer.train."""

    def test_one_checkpoint_per_epoch_plus_initialization(self) -> None:
        result = train(RnnTrainer(config(epochs=3)))
        assert [c.epoch for c in result.checkpoints] == [0, 1, 2, 3]
        assert [m.epoch for m in result.metrics] == [0, 1, 2, 3]
        assert result.best.epoch == result.best_epoch

    def test_epoch_zero_is_the_initial_model(self) -> None:
        result = train(RnnTrainer(config(epochs=1)))
        initial = init_model(3, 8, np.random.default_rng(0))
        for name, values in initial.parameters().items():
            assert np.array_equal(result.checkpoints[0].model.parameters()[name], values)

    def test_full_batch_first_epoch_loss_is_initial_loss(self) -> None:
        """With one batch per epoch the first step's loss is computed on the initial model."""
        result = train(RnnTrainer(config(epochs=1, batch_size=len(TRAIN_WORDS))))
        assert result.metrics[1].train_loss == pytest.approx(result.metrics[0].train_loss, rel=1e-9)

    def test_memorization_reduces_loss(self) -> None:
        result = train(RnnTrainer(config(epochs=40, batch_size=len(TRAIN_WORDS))))
        assert result.metrics[-1].train_loss < result.metrics[0].train_loss

    def test_parameters_change_every_epoch(self) -> None:
        result = train(RnnTrainer(config(epochs=2)))
        first, second = (c.model.parameters()["recurrent_weight"] for c in result.checkpoints[:2])
        assert not np.array_equal(first, second)

    def test_best_epoch_follows_selection_rule(self) -> None:
        result = train(RnnTrainer(config(epochs=4)))
        assert result.best_epoch == select_best_epoch(result.metrics)
        assert result.converged == (result.best.metadata.dev_accuracy == 1.0)

    def test_epochs_override(self) -> None:
        result = train(RnnTrainer(config(epochs=5)), epochs=1)
        assert len(result.checkpoints) == 2

    def test_deterministic(self) -> None:
        a = train(RnnTrainer(config(epochs=2, batch_size=3)))
        b = train(RnnTrainer(config(epochs=2, batch_size=3)))
        for name, values in a.best.model.parameters().items():
            assert np.array_equal(b.best.model.parameters()[name], values)
        assert a.metrics == b.metrics

    def test_metadata(self) -> None:
        result = train(RnnTrainer(config(epochs=1)), seed=4)
        meta = result.checkpoints[1].metadata
        assert (meta.language, meta.seed, meta.epoch) == (2, 4, 1)
        assert meta.param_norm == pytest.approx(result.checkpoints[1].model.parameter_norm())

    @pytest.mark.parametrize("train_words, dev_words", [([], DEV_WORDS), (TRAIN_WORDS, [])])
    def test_empty_sets_raise(self, train_words: list[str], dev_words: list[str]) -> None:
        with pytest.raises(InvalidInputError):
            RnnTrainer(config()).train(
                init_model(3, 8, np.random.default_rng(0)),
                labels_for(2, train_words),
                labels_for(2, dev_words),
                np.random.default_rng(1),
                language=2,
                seed=0,
            )


class TestTrainerArtifacts:
    """Tests for checkpoints and metrics written during training."""

    def test_files_written(self, tmp_path) -> None:
        checkpoints = CheckpointRepository(tmp_path)
        tables = ResultsRepository(tmp_path)
        result = train(RnnTrainer(config(epochs=2), checkpoints, tables))

        assert checkpoints.epochs(2, 0) == [0, 1, 2]
        assert checkpoints.best_epoch(2, 0) == result.best_epoch
        rows = tables.read_metrics("tomita2/seed0/metrics.csv")
        assert [row.epoch for row in rows] == [0, 1, 2]
        assert rows == result.metrics

    def test_saved_checkpoint_reloads_bitwise(self, tmp_path) -> None:
        checkpoints = CheckpointRepository(tmp_path)
        result = train(RnnTrainer(config(epochs=1), checkpoints))
        loaded = checkpoints.load_checkpoint(2, 0, 1)
        assert loaded.metadata == result.checkpoints[1].metadata
        for name, values in result.checkpoints[1].model.parameters().items():
            assert np.array_equal(loaded.model.parameters()[name], values)
