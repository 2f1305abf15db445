"""
Dataset repository.

Datasets are tab-separated documents::

    # statemerge-dataset v1
    # language: 2
    # seed: 0
    # length: 10
    # count: 300
    abab<TAB>10101
    -<TAB>1

``-`` stands for the empty string and labels are one 0/1 digit per prefix.
"""

import logging

from core.exceptions import FileFormatError
from models import Dataset, LabeledSample
from .base import BaseRepository, split_field

logger = logging.getLogger(__name__)

EMPTY_WORD = "-"


class DatasetRepository(BaseRepository[Dataset]):
    """Training, extraction and evaluation string sets."""

    kind = "dataset"
    suffix = ".tsv"

    def serialize(self, document: Dataset) -> list[str]:
        lines = [
            f"# language: {document.language}",
            f"# seed: {document.seed}",
            f"# length: {document.length}",
            f"# count: {len(document)}",
        ]
        lines.extend(
            f"{sample.x or EMPTY_WORD}\t{''.join('1' if y else '0' for y in sample.y)}"
            for sample in document.samples
        )
        return lines

    def parse(self, kind: str, lines: list[str], source: str) -> Dataset:
        if len(lines) < 4:
            raise FileFormatError(f"{source}: dataset header is truncated", details={"source": source})
        language = int(split_field(lines[0].lstrip("# "), "language", source))
        seed = int(split_field(lines[1].lstrip("# "), "seed", source))
        length = split_field(lines[2].lstrip("# "), "length", source)
        count = int(split_field(lines[3].lstrip("# "), "count", source))

        samples = []
        for line in lines[4:]:
            if not line.strip():
                continue
            word, sep, bits = line.partition("\t")
            if not sep or set(bits) - {"0", "1"}:
                raise FileFormatError(
                    f"{source}: malformed record {line!r}", details={"source": source}
                )
            word = "" if word == EMPTY_WORD else word
            if len(bits) != len(word) + 1:
                raise FileFormatError(
                    f"{source}: record {line!r} needs {len(word) + 1} labels",
                    details={"source": source},
                )
            samples.append(LabeledSample(x=word, y=tuple(bit == "1" for bit in bits)))
        if len(samples) != count:
            raise FileFormatError(
                f"{source}: header announces {count} records, found {len(samples)}",
                details={"source": source},
            )
        return Dataset(language=language, seed=seed, length=length, samples=tuple(samples))
