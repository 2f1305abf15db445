"""
Service layer.

This package provides the automata algorithms, the Tomita languages, the
recognizer and its training, the two extraction methods, evaluation and the
experiment harness. Submodules are imported directly by callers; only the
harness entry points are re-exported here.
"""

from .experiment_service import ExtractionJob, ExperimentService, summarize
from .training_service import RnnTrainer, TrainingResult

__all__ = [
    "ExtractionJob",
    "ExperimentService",
    "RnnTrainer",
    "TrainingResult",
    "summarize",
]
