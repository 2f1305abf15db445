"""
Results repository: comma-separated results and metrics tables.

Appends are serialized with a lock per file so that parallel jobs can share a
table. The header is written when a table is created.
"""

import csv
import logging
import threading
from collections.abc import Iterable
from pathlib import Path
from typing import TypeVar

from pydantic import BaseModel

from core.exceptions import FileFormatError, NotFoundError
from schemas import METRIC_COLUMNS, RESULT_COLUMNS, EpochMetrics, ResultRow, SummaryRow

logger = logging.getLogger(__name__)

RecordType = TypeVar("RecordType", bound=BaseModel)

SUMMARY_COLUMNS: tuple[str, ...] = tuple(SummaryRow.model_fields)

_locks: dict[Path, threading.Lock] = {}
_locks_guard = threading.Lock()


def _lock_for(path: Path) -> threading.Lock:
    with _locks_guard:
        return _locks.setdefault(path.resolve(), threading.Lock())


def _cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(getattr(value, "value", value))


class ResultsRepository:
    """
    CSV tables under a root directory.

    Usage:
        repo = ResultsRepository(run_dir)
        repo.append_results("results.csv", [row])
        rows = repo.read_results("results.csv")
    """

    def __init__(self, root: Path | str):
        self.root = Path(root)

    def path_for(self, name: str) -> Path:
        return self.root / name

    def _append(
        self, name: str, columns: tuple[str, ...], records: Iterable[BaseModel]
    ) -> Path:
        path = self.path_for(name)
        rows = [record.model_dump() for record in records]
        with _lock_for(path):
            path.parent.mkdir(parents=True, exist_ok=True)
            fresh = not path.exists() or path.stat().st_size == 0
            with path.open("a", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                if fresh:
                    writer.writerow(columns)
                for row in rows:
                    writer.writerow([_cell(row[column]) for column in columns])
        return path

    def _read(
        self, name: str, columns: tuple[str, ...], model: type[RecordType]
    ) -> list[RecordType]:
        path = self.path_for(name)
        if not path.is_file():
            raise NotFoundError("table", message=f"Table {path} not found")
        with path.open(newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            if tuple(reader.fieldnames or ()) != columns:
                raise FileFormatError(
                    f"{path}: unexpected header {reader.fieldnames}",
                    details={"expected": list(columns)},
                )
            return [
                model.model_validate({key: (value if value != "" else None) for key, value in row.items()})
                for row in reader
            ]

    # ------------------------------------------------------------------------
    # Tables
    # ------------------------------------------------------------------------

    def append_results(self, name: str, rows: Iterable[ResultRow]) -> Path:
        return self._append(name, RESULT_COLUMNS, rows)

    def read_results(self, name: str) -> list[ResultRow]:
        return self._read(name, RESULT_COLUMNS, ResultRow)

    def append_metrics(self, name: str, rows: Iterable[EpochMetrics]) -> Path:
        return self._append(name, METRIC_COLUMNS, rows)

    def read_metrics(self, name: str) -> list[EpochMetrics]:
        return self._read(name, METRIC_COLUMNS, EpochMetrics)

    def write_summary(self, name: str, rows: Iterable[SummaryRow]) -> Path:
        """Replace a summary table."""
        path = self.path_for(name)
        path.unlink(missing_ok=True)
        return self._append(name, SUMMARY_COLUMNS, rows)
