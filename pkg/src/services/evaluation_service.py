"""
Agreement metrics between automata, recognizers and gold labels.

This module provides:
- fidelity: full-string agreement of a DFA with a recognizer, plus gold
  accuracy and per-prefix agreement
- rnn_accuracy: per-prefix and per-string accuracy of a recognizer
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from core.exceptions import InvalidInputError
from models import Dfa, LabeledSample, Recognizer, RnnModel
from .automata_service import prefix_decisions
from .rnn_service import decisions

logger = logging.getLogger(__name__)

EVAL_BATCH = 256


@dataclass(frozen=True)
class FidelityReport:
    """
    Agreement of an extracted DFA on an evaluation set.

    Attributes:
        accuracy_rnn: Fraction of strings where the DFA verdict equals the recognizer's
        accuracy_gold: Fraction of strings where the DFA verdict equals the stored label
        prefix_fidelity: Fraction of all prefixes where both agree
        count: Number of evaluation strings
    """

    accuracy_rnn: float
    accuracy_gold: float
    prefix_fidelity: float
    count: int


def _require(samples: Sequence[LabeledSample]) -> None:
    if not samples:
        raise InvalidInputError("Evaluation needs at least one string")


def _check_alphabets(dfa: Dfa, model: Recognizer) -> None:
    if set(dfa.alphabet) != set(model.alphabet):
        raise InvalidInputError(
            "Automaton and recognizer use different alphabets",
            details={"automaton": list(dfa.alphabet), "recognizer": list(model.alphabet)},
        )


def fidelity(dfa: Dfa, model: Recognizer, samples: Sequence[LabeledSample]) -> FidelityReport:
    """
    Compare a DFA with a recognizer on held-out strings.

    Args:
        dfa: Extracted automaton
        model: Recognizer it was extracted from
        samples: Evaluation strings with gold labels

    Returns:
        FidelityReport

    Raises:
        InvalidInputError: On an empty set or mismatched alphabets
    """
    _require(samples)
    _check_alphabets(dfa, model)
    string_rnn = string_gold = prefix_hits = prefix_total = 0
    for sample in samples:
        ours = prefix_decisions(dfa, sample.x)
        theirs = decisions(model, sample.x)
        string_rnn += ours[-1] == theirs[-1]
        string_gold += ours[-1] == sample.label
        prefix_hits += sum(a == b for a, b in zip(ours, theirs, strict=True))
        prefix_total += len(ours)
    return FidelityReport(
        accuracy_rnn=string_rnn / len(samples),
        accuracy_gold=string_gold / len(samples),
        prefix_fidelity=prefix_hits / prefix_total,
        count=len(samples),
    )


def rnn_accuracy(
    model: RnnModel, samples: Sequence[LabeledSample], batch_size: int = EVAL_BATCH
) -> tuple[float, float]:
    """
    Accuracy of a recognizer against stored labels.

    Returns:
        (per-prefix accuracy over all prefixes, per-string accuracy of the
        full-string decision)
    """
    _require(samples)
    prefix_hits = prefix_total = string_hits = 0
    for start in range(0, len(samples), batch_size):
        chunk = samples[start : start + batch_size]
        batch = model.forward_batch([s.x for s in chunk])
        predicted = batch.yhat > 0.5
        for row, sample in enumerate(chunk):
            steps = len(sample.y)
            hits = predicted[row, :steps] == np.asarray(sample.y)
            prefix_hits += int(hits.sum())
            prefix_total += steps
            string_hits += bool(hits[-1])
    return prefix_hits / prefix_total, string_hits / len(samples)
