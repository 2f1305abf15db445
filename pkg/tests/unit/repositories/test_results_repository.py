"""
Unit tests for ResultsRepository.

Tests:
- Result and metric tables round trip; summary tables are replaced
- Header written once; appends from several threads
- Missing and foreign tables
"""

import csv
from concurrent.futures import ThreadPoolExecutor

import pytest

from core.exceptions import FileFormatError, NotFoundError
from repositories import ResultsRepository
from schemas import EpochMetrics, ExtractionMethod, ResultRow, SummaryRow


def result_row(seed: int = 0, method: ExtractionMethod = ExtractionMethod.STATE_MERGING) -> ResultRow:
    merging = method is ExtractionMethod.STATE_MERGING
    return ResultRow(
        language=3,
        method=method,
        seed=seed,
        epoch=5,
        data_count=300,
        kappa=0.01 if merging else None,
        accuracy_rnn=0.987,
        accuracy_gold=1 / 3,
        accuracy_trie=None,
        prefix_fidelity=0.1 + 0.2,
        train_fidelity=1.0 if merging else None,
        trie_size=1200 if merging else None,
        merged_size=9,
        minimized_size=5,
        equivalent_to_gold=seed % 2 == 0,
        wall_time=1.25,
    )


class TestResultsTables:
    """Tests for CSV tables."""

    def test_results_round_trip(self, tmp_path) -> None:
        repo = ResultsRepository(tmp_path)
        rows = [result_row(0), result_row(1, ExtractionMethod.KMEANS)]
        repo.append_results("extract/results.csv", rows)
        assert repo.read_results("extract/results.csv") == rows

    def test_header_written_once(self, tmp_path) -> None:
        repo = ResultsRepository(tmp_path)
        repo.append_results("results.csv", [result_row(0)])
        repo.append_results("results.csv", [result_row(1)])
        lines = (tmp_path / "results.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("language,method,seed,epoch")
        assert len(lines) == 3
        assert sum(line.startswith("language,") for line in lines) == 1

    def test_booleans_and_missing_values(self, tmp_path) -> None:
        repo = ResultsRepository(tmp_path)
        repo.append_results("results.csv", [result_row(1, ExtractionMethod.KMEANS)])
        line = (tmp_path / "results.csv").read_text(encoding="utf-8").splitlines()[1]
        assert ",kmeans," in line
        assert ",false," in line
        assert ",," in line

    def test_kmeans_rows_leave_tree_columns_empty(self, tmp_path) -> None:
        repo = ResultsRepository(tmp_path)
        repo.append_results("results.csv", [result_row(0), result_row(1, ExtractionMethod.KMEANS)])
        with (tmp_path / "results.csv").open(newline="", encoding="utf-8") as handle:
            merging, kmeans = csv.DictReader(handle)
        assert (merging["train_fidelity"], merging["trie_size"]) == ("1.0", "1200")
        assert (kmeans["train_fidelity"], kmeans["trie_size"], kmeans["kappa"]) == ("", "", "")

    def test_parallel_appends(self, tmp_path) -> None:
        repo = ResultsRepository(tmp_path)
        with ThreadPoolExecutor(max_workers=8) as pool:
            list(pool.map(lambda seed: repo.append_results("results.csv", [result_row(seed)]), range(40)))
        rows = repo.read_results("results.csv")
        assert sorted(row.seed for row in rows) == list(range(40))

    def test_metrics_round_trip(self, tmp_path) -> None:
        repo = ResultsRepository(tmp_path)
        rows = [
            EpochMetrics(epoch=e, train_loss=1 / (e + 1), dev_accuracy=0.5, dev_string_accuracy=0.25, param_norm=3.0)
            for e in range(3)
        ]
        repo.append_metrics("metrics.csv", rows)
        assert repo.read_metrics("metrics.csv") == rows

    def test_summary_is_replaced(self, tmp_path) -> None:
        repo = ResultsRepository(tmp_path)
        row = SummaryRow(
            language=2,
            method=ExtractionMethod.STATE_MERGING,
            data_count=10,
            runs=5,
            accuracy_mean=0.9,
            accuracy_std=0.1,
            accuracy_median=0.95,
            accuracy_q25=0.85,
            accuracy_q75=1.0,
            merged_size_median=3.0,
            minimized_size_median=2.0,
            minimized_size_min=2,
            gold_size=2,
            equivalent_runs=4,
        )
        repo.write_summary("summary.csv", [row, row])
        repo.write_summary("summary.csv", [row])
        with (tmp_path / "summary.csv").open(newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            records = list(reader)
        assert reader.fieldnames == list(SummaryRow.model_fields)
        assert len(records) == 1
        assert (records[0]["language"], records[0]["method"], records[0]["epoch"]) == ("2", "state_merging", "")

    def test_missing_table(self, tmp_path) -> None:
        with pytest.raises(NotFoundError):
            ResultsRepository(tmp_path).read_results("absent.csv")

    def test_foreign_header(self, tmp_path) -> None:
        repo = ResultsRepository(tmp_path)
        repo.append_metrics("table.csv", [])
        with pytest.raises(FileFormatError):
            repo.read_results("table.csv")
