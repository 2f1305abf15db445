"""
File-backed repositories for the statemerge toolkit.

This module exports all repository classes for reading and writing run
artifacts: automata, checkpoints, datasets and CSV tables.
"""

from .automaton_repository import AutomatonRepository, to_dot
from .base import BaseRepository
from .checkpoint_repository import CheckpointRepository
from .dataset_repository import DatasetRepository
from .results_repository import ResultsRepository

__all__ = [
    "AutomatonRepository",
    "BaseRepository",
    "CheckpointRepository",
    "DatasetRepository",
    "ResultsRepository",
    "to_dot",
]
