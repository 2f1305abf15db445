"""
Base repository for versioned text documents.

This module provides a generic file-backed repository. Every document kind
starts with a one-line header ``# statemerge-<kind> v<version>`` followed by a
kind-specific body. Subclasses only implement ``serialize`` and ``parse``.

Type Parameters:
    DocumentType: The value type stored by the repository (Dfa, Checkpoint, ...)
"""

import logging
import os
import tempfile
from abc import ABC, abstractmethod
from pathlib import Path
from typing import ClassVar, Generic, TypeVar

from core.exceptions import FileFormatError, NotFoundError

logger = logging.getLogger(__name__)

DocumentType = TypeVar("DocumentType")

HEADER_PREFIX = "# statemerge-"


def format_header(kind: str, version: int) -> str:
    return f"{HEADER_PREFIX}{kind} v{version}"


class BaseRepository(Generic[DocumentType], ABC):
    """
    Generic repository storing one document per file under a root directory.

    Writes are atomic (temporary file + rename), so concurrent readers never
    observe a half-written document.

    Usage:
        class DatasetRepository(BaseRepository[Dataset]):
            kind = "dataset"
            suffix = ".tsv"

            def serialize(self, document: Dataset) -> list[str]: ...
            def parse(self, kind: str, lines: list[str], source: str) -> Dataset: ...
    """

    kind: ClassVar[str]
    suffix: ClassVar[str]
    version: ClassVar[int] = 1

    def __init__(self, root: Path | str):
        """
        Initialize repository.

        Args:
            root: Directory documents are stored under
        """
        self.root = Path(root)

    # ========================================================================
    # FORMAT HOOKS
    # ========================================================================

    def header_for(self, document: DocumentType) -> str:
        """Header line written before ``document``."""
        return format_header(self.kind, self.version)

    def parse_header(self, line: str, source: str) -> str:
        """
        Validate a header line and return the document kind it announces.

        Raises:
            FileFormatError: If the header names another kind or version
        """
        expected = format_header(self.kind, self.version)
        if line.strip() != expected:
            raise FileFormatError(
                f"{source}: expected header {expected!r}, found {line.strip()!r}",
                details={"source": source},
            )
        return self.kind

    @abstractmethod
    def serialize(self, document: DocumentType) -> list[str]:
        """Body lines of ``document`` (without the header)."""

    @abstractmethod
    def parse(self, kind: str, lines: list[str], source: str) -> DocumentType:
        """Rebuild a document from its body lines."""

    # ========================================================================
    # TEXT
    # ========================================================================

    def dumps(self, document: DocumentType) -> str:
        return "\n".join([self.header_for(document), *self.serialize(document)]) + "\n"

    def loads(self, text: str, source: str = "<string>") -> DocumentType:
        """
        Parse a complete document.

        Raises:
            FileFormatError: On an empty document, a bad header or a bad body
        """
        lines = text.splitlines()
        if not lines:
            raise FileFormatError(f"{source}: empty document", details={"source": source})
        kind = self.parse_header(lines[0], source)
        try:
            return self.parse(kind, lines[1:], source)
        except FileFormatError:
            raise
        except (ValueError, KeyError, IndexError) as exc:
            raise FileFormatError(
                f"{source}: {exc}", details={"source": source}
            ) from exc

    # ========================================================================
    # FILES
    # ========================================================================

    def path_for(self, name: str) -> Path:
        """Location of the document called ``name`` (suffix added if missing)."""
        path = self.root / name
        return path if path.suffix == self.suffix else path.with_name(path.name + self.suffix)

    def exists(self, name: str) -> bool:
        return self.path_for(name).is_file()

    def save(self, document: DocumentType, name: str) -> Path:
        """
        Write ``document`` atomically.

        Returns:
            The path written
        """
        path = self.path_for(name)
        write_text_atomic(path, self.dumps(document))
        logger.debug(f"Saved {self.kind} document to {path}")
        return path

    def load(self, name: str) -> DocumentType:
        """
        Read the document called ``name``.

        Raises:
            NotFoundError: If the file does not exist
            FileFormatError: If it cannot be parsed
        """
        return self.load_path(self.path_for(name))

    def load_path(self, path: Path | str) -> DocumentType:
        path = Path(path)
        if not path.is_file():
            raise NotFoundError(
                self.kind, message=f"{self.kind} file {path} not found",
                details={"path": str(path)},
            )
        return self.loads(path.read_text(encoding="utf-8"), source=str(path))


def write_text_atomic(path: Path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def split_field(line: str, key: str, source: str) -> str:
    """
    Value of a ``key: value`` line.

    Raises:
        FileFormatError: If the line holds another key
    """
    name, sep, value = line.partition(":")
    if not sep or name.strip() != key:
        raise FileFormatError(
            f"{source}: expected '{key}:' line, found {line!r}",
            details={"source": source},
        )
    return value.strip()
