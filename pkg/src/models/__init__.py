"""
Domain value types.

This package provides the automata, prefix tree, recognizer and sample types
shared by the services and repositories.
"""

from .automaton import DEAD, Dfa, Nfa, RunTrace, StateId, Token
from .prefix_tree import PrefixTree
from .rnn import (
    BOS,
    PARAMETER_NAMES,
    AdamState,
    BatchForward,
    Checkpoint,
    ForwardResult,
    Recognizer,
    RnnModel,
    accept_probability,
)
from .sample import Dataset, LabeledSample

__all__ = [
    # Automata
    "DEAD",
    "Dfa",
    "Nfa",
    "RunTrace",
    "StateId",
    "Token",
    "PrefixTree",
    # Recognizer
    "BOS",
    "PARAMETER_NAMES",
    "AdamState",
    "BatchForward",
    "Checkpoint",
    "ForwardResult",
    "Recognizer",
    "RnnModel",
    "accept_probability",
    # Data
    "Dataset",
    "LabeledSample",
]
