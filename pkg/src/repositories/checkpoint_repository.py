"""
Checkpoint repository.

Checkpoints are text documents stored as
``tomita<L>/seed<S>/epoch<EEE>.ckpt`` under the repository root::

    # statemerge-checkpoint v1
    meta.language: 2
    meta.epoch: 3
    ...
    alphabet: a b
    matrix embedding 3 10
    <row of repr() floats>
    ...

Floats are written with ``repr`` so parameters round-trip bit for bit.
"""

import logging
import re
from pathlib import Path

import numpy as np

from core.exceptions import FileFormatError, NotFoundError
from models import PARAMETER_NAMES, Checkpoint, RnnModel
from schemas import CheckpointMetadata
from .base import BaseRepository, split_field, write_text_atomic

logger = logging.getLogger(__name__)

_VECTORS = frozenset({"head_bias"})
_EPOCH_FILE = re.compile(r"^epoch(\d+)\.ckpt$")
BEST_FILE = "best_checkpoint.json"


class CheckpointRepository(BaseRepository[Checkpoint]):
    """Per-epoch recognizer checkpoints, grouped by language and seed."""

    kind = "checkpoint"
    suffix = ".ckpt"

    @staticmethod
    def run_dir(language: int, seed: int) -> str:
        return f"tomita{language}/seed{seed}"

    def name_for(self, language: int, seed: int, epoch: int) -> str:
        return f"{self.run_dir(language, seed)}/epoch{epoch:03d}"

    # ------------------------------------------------------------------------
    # Format
    # ------------------------------------------------------------------------

    def serialize(self, document: Checkpoint) -> list[str]:
        lines = [
            f"meta.{key}: {value!r}"
            for key, value in document.metadata.model_dump().items()
        ]
        lines.append(f"alphabet: {' '.join(document.model.alphabet)}")
        for name, values in document.model.parameters().items():
            matrix = np.atleast_2d(values)
            rows, cols = matrix.shape
            lines.append(f"matrix {name} {rows} {cols}")
            lines.extend(" ".join(repr(float(x)) for x in row) for row in matrix)
        return lines

    def parse(self, kind: str, lines: list[str], source: str) -> Checkpoint:
        meta: dict[str, str] = {}
        index = 0
        while index < len(lines) and lines[index].startswith("meta."):
            key, _, value = lines[index][len("meta."):].partition(":")
            meta[key.strip()] = value.strip()
            index += 1
        if index >= len(lines):
            raise FileFormatError(f"{source}: missing alphabet line", details={"source": source})
        alphabet = tuple(split_field(lines[index], "alphabet", source).split())
        index += 1

        params: dict[str, np.ndarray] = {}
        while index < len(lines):
            if not lines[index].strip():
                index += 1
                continue
            head = lines[index].split()
            if len(head) != 4 or head[0] != "matrix":
                raise FileFormatError(
                    f"{source}: expected matrix header, found {lines[index]!r}",
                    details={"source": source},
                )
            name, rows, cols = head[1], int(head[2]), int(head[3])
            block = lines[index + 1 : index + 1 + rows]
            if len(block) != rows:
                raise FileFormatError(
                    f"{source}: matrix {name} is truncated", details={"source": source}
                )
            matrix = np.array([[float(x) for x in row.split()] for row in block])
            if matrix.shape != (rows, cols):
                raise FileFormatError(
                    f"{source}: matrix {name} does not have shape {rows}x{cols}",
                    details={"source": source},
                )
            params[name] = matrix.reshape(-1) if name in _VECTORS else matrix
            index += 1 + rows

        missing = [name for name in PARAMETER_NAMES if name not in params]
        if missing:
            raise FileFormatError(
                f"{source}: missing parameters {missing}", details={"source": source}
            )
        metadata = CheckpointMetadata.model_validate(
            {key: _literal(value) for key, value in meta.items()}
        )
        model = RnnModel(alphabet=alphabet, **{name: params[name] for name in PARAMETER_NAMES})
        return Checkpoint(model=model, metadata=metadata)

    # ------------------------------------------------------------------------
    # Lookup
    # ------------------------------------------------------------------------

    def save_checkpoint(self, checkpoint: Checkpoint) -> Path:
        meta = checkpoint.metadata
        return self.save(checkpoint, self.name_for(meta.language, meta.seed, meta.epoch))

    def load_checkpoint(self, language: int, seed: int, epoch: int) -> Checkpoint:
        """
        Load one checkpoint.

        Raises:
            NotFoundError: If that epoch was never saved
        """
        return self.load(self.name_for(language, seed, epoch))

    def epochs(self, language: int, seed: int) -> list[int]:
        """Saved epochs of a run, ascending."""
        directory = self.root / self.run_dir(language, seed)
        if not directory.is_dir():
            return []
        found = (_EPOCH_FILE.match(path.name) for path in directory.iterdir())
        return sorted(int(match.group(1)) for match in found if match)

    def save_best(self, metadata: CheckpointMetadata) -> Path:
        path = self.root / self.run_dir(metadata.language, metadata.seed) / BEST_FILE
        write_text_atomic(path, metadata.model_dump_json(indent=2) + "\n")
        return path

    def best_epoch(self, language: int, seed: int) -> int:
        """
        Epoch selected after training (highest epoch with maximal dev accuracy).

        Raises:
            NotFoundError: If the run has no best-checkpoint record
        """
        path = self.root / self.run_dir(language, seed) / BEST_FILE
        if not path.is_file():
            raise NotFoundError(
                "checkpoint",
                message=f"No trained recognizer for language {language}, seed {seed}",
                details={"path": str(path)},
            )
        return CheckpointMetadata.model_validate_json(path.read_text(encoding="utf-8")).epoch


def _literal(value: str) -> str | float | int:
    """Undo ``repr`` on a metadata value (ints, floats and quoted strings)."""
    if value.startswith(("'", '"')):
        return value[1:-1]
    try:
        return int(value)
    except ValueError:
        return float(value)
