"""
Integration tests for the experiment harness.

These tests train tiny recognizers into a temporary run directory and run
the extraction jobs, sweeps and summaries end to end.

Tests cover:
- Training, datasets and checkpoints on disk
- Extraction jobs for both methods, artifacts and result tables
- Determinism across reruns and thread counts
- Nested extraction strings and summaries
- Configuration errors
"""

import pytest

from core.exceptions import ConfigurationError, NotFoundError
from schemas import ExperimentConfig, ExtractionMethod, ResultRow
from services import ExperimentService
from services.experiment_service import ExtractionJob, Stream, rng_for, summarize
from services.extraction_service import extract
from services.language_service import gold_dfa


def job(method: ExtractionMethod, **kwargs) -> ExtractionJob:
    fields = {"language": 1, "seed": 0, "method": method, "data_count": 10, "string_length": 4}
    return ExtractionJob(**{**fields, **kwargs})


def without_time(rows: list[ResultRow]) -> list[dict]:
    return [row.model_dump(exclude={"wall_time"}) for row in rows]


class TestTraining:
    """Tests for recognizer training through the harness."""

    def test_train_writes_run(self, tiny_config: ExperimentConfig) -> None:
        service = ExperimentService(tiny_config)
        result = service.train(1, 0)

        assert len(result.checkpoints) == 3
        assert service.checkpoints.epochs(1, 0) == [0, 1, 2]
        assert service.checkpoints.best_epoch(1, 0) == result.best_epoch
        train = service.datasets.load("tomita1/seed0/train")
        dev = service.datasets.load("tomita1/seed0/dev")
        assert (len(train), len(dev)) == (40, 20)
        assert all(len(word) == 6 for word in train.words)

    def test_retraining_is_deterministic(self, tiny_config: ExperimentConfig) -> None:
        service = ExperimentService(tiny_config)
        first = service.train(1, 0)
        second = service.train(1, 0)
        assert first.metrics == second.metrics
        rows = service.tables.read_metrics("checkpoints/tomita1/seed0/metrics.csv")
        assert len(rows) == 3

    def test_ensure_model_reuses_checkpoints(self, tiny_config: ExperimentConfig) -> None:
        service = ExperimentService(tiny_config)
        trained = service.ensure_model(1, 0)
        again = ExperimentService(tiny_config).ensure_model(1, 0)
        assert again.metadata == trained.metadata

    def test_ensure_model_specific_epoch(self, tiny_config: ExperimentConfig) -> None:
        assert ExperimentService(tiny_config).ensure_model(1, 0, epoch=0).epoch == 0

    def test_missing_model_without_training(self, tiny_config: ExperimentConfig) -> None:
        config = tiny_config.model_copy(update={"train_if_missing": False})
        with pytest.raises(NotFoundError):
            ExperimentService(config).ensure_model(1, 0)


class TestExtractionJobs:
    """Tests for run_extraction and run_jobs."""

    def test_state_merging_row_records_training_fidelity(self, tiny_config: ExperimentConfig) -> None:
        service = ExperimentService(tiny_config)
        row = service.run_extraction(job(ExtractionMethod.STATE_MERGING))
        model = service.ensure_model(1, 0, row.epoch).model
        strings = service.extraction_strings(1, 0, 10, 4)
        assert row.train_fidelity == extract(model, strings, row.kappa).train_fidelity

    def test_both_methods(self, tiny_config: ExperimentConfig) -> None:
        service = ExperimentService(tiny_config)
        rows = service.run_jobs(
            [
                job(ExtractionMethod.STATE_MERGING, artifacts="extract/merging"),
                job(ExtractionMethod.KMEANS, artifacts="extract/kmeans"),
            ],
            "extract/results.csv",
        )
        merging, kmeans = rows
        assert merging.method is ExtractionMethod.STATE_MERGING
        assert merging.kappa == 0.01
        assert merging.trie_size >= merging.merged_size >= 1
        assert merging.accuracy_trie is not None
        assert 0.0 <= merging.train_fidelity <= 1.0
        assert kmeans.kappa is None
        assert kmeans.trie_size is None
        assert kmeans.train_fidelity is None
        assert kmeans.accuracy_trie is None
        assert kmeans.merged_size <= 5
        for row in rows:
            assert row.epoch == service.checkpoints.best_epoch(1, 0)
            assert row.minimized_size <= row.merged_size

        assert service.tables.read_results("extract/results.csv") == rows
        automata = service.automata.root
        assert (automata / "extract/merging/final.dfa").is_file()
        assert (automata / "extract/merging/merged.nfa").is_file()
        assert (automata / "extract/merging/final.dot").is_file()
        assert (automata / "extract/kmeans/final.dfa").is_file()
        assert not (automata / "extract/kmeans/merged.nfa").exists()

    def test_saved_automaton_matches_row(self, tiny_config: ExperimentConfig) -> None:
        service = ExperimentService(tiny_config)
        row = service.run_extraction(job(ExtractionMethod.STATE_MERGING, artifacts="one"))
        final = service.automata.load("one/final.dfa")
        assert final.size == row.minimized_size

    def test_rerun_is_deterministic(self, tiny_config: ExperimentConfig) -> None:
        service = ExperimentService(tiny_config)
        jobs = [job(ExtractionMethod.STATE_MERGING), job(ExtractionMethod.KMEANS)]
        first = service.run_jobs(jobs, "a.csv")
        second = service.run_jobs(jobs, "b.csv")
        assert without_time(first) == without_time(second)

    def test_threads_do_not_change_results(self, tiny_config: ExperimentConfig, tmp_path) -> None:
        config = tiny_config.model_copy(update={"seeds": [0, 1]})
        jobs = [
            job(method, seed=seed, data_count=count)
            for method in ExtractionMethod
            for seed in (0, 1)
            for count in (2, 10)
        ]
        serial = ExperimentService(config, tmp_path / "serial").run_jobs(jobs, "results.csv")
        parallel = ExperimentService(config, tmp_path / "parallel", threads=4).run_jobs(jobs, "results.csv")
        assert without_time(serial) == without_time(parallel)

    def test_explicit_kappa_overrides_config(self, tiny_config: ExperimentConfig) -> None:
        row = ExperimentService(tiny_config).run_extraction(job(ExtractionMethod.STATE_MERGING, kappa=0.5))
        assert row.kappa == 0.5

    def test_evaluate(self, tiny_config: ExperimentConfig) -> None:
        service = ExperimentService(tiny_config)
        plain = service.evaluate(1, 0)
        assert plain.count == 20
        assert plain.dfa_size is None
        with_dfa = service.evaluate(1, 0, epoch=1, dfa=gold_dfa(1))
        assert with_dfa.epoch == 1
        assert with_dfa.dfa_accuracy_gold == 1.0
        assert with_dfa.equivalent_to_gold is True


class TestExtractionStrings:
    """Tests for the per-job string pools."""

    def test_smaller_counts_are_prefixes(self, tiny_config: ExperimentConfig) -> None:
        service = ExperimentService(tiny_config)
        large = service.extraction_strings(2, 0, 8, 6, pool=8)
        small = service.extraction_strings(2, 0, 3, 6, pool=8)
        assert small == large[:3]
        assert all(len(word) == 6 for word in large)

    def test_streams_are_independent(self) -> None:
        draws = {stream: rng_for(0, 2, stream).integers(1 << 30) for stream in Stream}
        assert len(set(draws.values())) == len(Stream)
        assert rng_for(0, 2, Stream.KMEANS, 5).integers(1 << 30) == rng_for(0, 2, Stream.KMEANS, 5).integers(1 << 30)


class TestSummaries:
    """Tests for summarize."""

    @staticmethod
    def row(seed: int, accuracy: float, size: int, epoch: int = 3) -> ResultRow:
        return ResultRow(
            language=2,
            method=ExtractionMethod.STATE_MERGING,
            seed=seed,
            epoch=epoch,
            data_count=10,
            kappa=0.01,
            accuracy_rnn=accuracy,
            accuracy_gold=accuracy,
            accuracy_trie=0.5,
            prefix_fidelity=accuracy,
            trie_size=20,
            merged_size=size + 1,
            minimized_size=size,
            equivalent_to_gold=size == 2,
            wall_time=0.1,
        )

    def test_statistics(self) -> None:
        rows = [self.row(0, 1.0, 2), self.row(1, 0.5, 3), self.row(2, 0.75, 2), self.row(3, 0.25, 4)]
        (summary,) = summarize(rows)
        assert summary.runs == 4
        assert summary.accuracy_mean == pytest.approx(0.625)
        assert summary.accuracy_std == pytest.approx(0.2795084971874737)
        assert summary.accuracy_median == pytest.approx(0.625)
        assert summary.accuracy_q25 == pytest.approx(0.4375)
        assert summary.accuracy_q75 == pytest.approx(0.8125)
        assert summary.minimized_size_median == 2.5
        assert summary.minimized_size_min == 2
        assert summary.gold_size == 2
        assert summary.equivalent_runs == 2
        assert summary.trie_accuracy_mean == 0.5

    def test_grouping_by_epoch(self) -> None:
        rows = [self.row(0, 1.0, 2, epoch=1), self.row(0, 0.5, 3, epoch=2)]
        assert [s.epoch for s in summarize(rows)] == [1, 2]
        (merged,) = summarize(rows, by_epoch=False)
        assert merged.epoch is None
        assert merged.runs == 2
        assert merged.kappa is None

    def test_grouping_by_kappa(self) -> None:
        rows = [self.row(0, 1.0, 2), self.row(1, 0.5, 3).model_copy(update={"kappa": 0.5})]
        assert len(summarize(rows)) == 1
        assert [s.kappa for s in summarize(rows, by_kappa=True)] == [0.01, 0.5]


class TestExperiments:
    """Tests for the table reproduction and the sweeps."""

    def test_reproduce_table2(self, tiny_config: ExperimentConfig) -> None:
        service = ExperimentService(tiny_config)
        rows, summary = service.reproduce_table2()
        assert [r.method for r in rows] == [ExtractionMethod.STATE_MERGING, ExtractionMethod.KMEANS]
        assert {s.method for s in summary} == set(ExtractionMethod)
        assert service.tables.read_results("table2/results.csv") == rows
        summary_lines = (service.tables.root / "table2/summary.csv").read_text(encoding="utf-8").splitlines()
        assert len(summary_lines) == len(summary) + 1
        assert (service.automata.root / "table2/tomita1/seed0/kmeans/final.dfa").is_file()

    def test_rerun_replaces_table(self, tiny_config: ExperimentConfig) -> None:
        service = ExperimentService(tiny_config)
        service.reproduce_table2()
        service.reproduce_table2()
        assert len(service.tables.read_results("table2/results.csv")) == 2

    def test_sweep_data_size(self, tiny_config: ExperimentConfig) -> None:
        rows, summary = ExperimentService(tiny_config).sweep_data_size()
        assert [r.data_count for r in rows] == [2, 4]
        assert [s.data_count for s in summary] == [2, 4]
        assert rows[0].trie_size <= rows[1].trie_size

    def test_sweep_kappa(self, tiny_config: ExperimentConfig) -> None:
        service = ExperimentService(tiny_config)
        rows, summary = service.sweep_kappa()
        assert [r.kappa for r in rows] == [0.5, 0.01]
        assert sorted(s.kappa for s in summary) == [0.01, 0.5]
        assert (service.automata.root / "sweep_kappa/tomita1/seed0/kappa0.5/merged.dot").is_file()

    def test_sweep_epochs(self, tiny_config: ExperimentConfig) -> None:
        service = ExperimentService(tiny_config)
        sizes, curves = service.sweep_epochs()
        assert [r.epoch for r in sizes] == [0, 1, 2]
        assert [(r.epoch, r.data_count) for r in curves] == [(1, 2), (1, 4), (2, 2), (2, 4)]
        assert service.tables.path_for("sweep_epochs/sizes_summary.csv").is_file()

    def test_sweep_epochs_needs_late_epoch(self, tiny_config: ExperimentConfig) -> None:
        training = tiny_config.training.model_copy(update={"epochs": 1})
        config = tiny_config.model_copy(update={"training": training})
        with pytest.raises(ConfigurationError):
            ExperimentService(config).sweep_epochs()

    def test_sweep_sanity(self, tiny_config: ExperimentConfig) -> None:
        rows, summary = ExperimentService(tiny_config).sweep_sanity()
        assert all(r.accuracy_trie is not None for r in rows)
        assert all(s.trie_accuracy_mean is not None for s in summary)
