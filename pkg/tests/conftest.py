"""
Pytest configuration and fixtures for statemerge tests.

This module provides:
- The --run-slow option (end-to-end training runs are skipped by default)
- Reference automata (the two-state (ab)* machine used throughout the docs)
- Random automaton factories for brute-force checks
- Stand-in recognizers with known hidden states
- A tiny experiment configuration for harness and CLI tests
"""

import json
import zlib
from pathlib import Path

import numpy as np
import pytest

from models import Dfa, ForwardResult, Nfa
from schemas import ExperimentConfig
from services.automata_service import run
from services.language_service import gold_dfa


# ============================================================================
# Pytest Configuration
# ============================================================================
def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="Run tests that train recognizers end to end",
    )


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# ============================================================================
# Automata
# ============================================================================
@pytest.fixture
def ab_star_dfa() -> Dfa:
    """Two-state DFA for (ab)*: q0 -a-> q1 -b-> q0, q0 accepting, b from q0 undefined."""
    return Dfa(
        alphabet=("a", "b"),
        states=frozenset({0, 1}),
        initial=0,
        transitions={(0, "a"): 1, (1, "b"): 0},
        accepting=frozenset({0}),
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def random_dfa():
    """Factory for random partial DFAs over {a, b}."""

    def make(rng: np.random.Generator, size: int, density: float = 0.8) -> Dfa:
        transitions = {
            (q, token): int(rng.integers(size))
            for q in range(size)
            for token in ("a", "b")
            if rng.random() < density
        }
        return Dfa(
            alphabet=("a", "b"),
            states=frozenset(range(size)),
            initial=0,
            transitions=transitions,
            accepting=frozenset(q for q in range(size) if rng.random() < 0.4),
        )

    return make


@pytest.fixture
def random_nfa():
    """Factory for random NFAs over {a, b} with up to two successors per pair."""

    def make(rng: np.random.Generator, size: int) -> Nfa:
        transitions = {}
        for q in range(size):
            for token in ("a", "b"):
                fanout = int(rng.integers(3))
                if fanout:
                    transitions[(q, token)] = frozenset(
                        int(dst) for dst in rng.choice(size, size=fanout)
                    )
        return Nfa(
            alphabet=("a", "b"),
            states=frozenset(range(size)),
            initial=0,
            transitions=transitions,
            accepting=frozenset(q for q in range(size) if rng.random() < 0.4),
        )

    return make


# ============================================================================
# Recognizers
# ============================================================================
class GoldStateRecognizer:
    """
    Recognizer whose hidden state is the one-hot code of the gold DFA state.

    The last coordinate stands for the undefined state. ``offset`` is added to
    every coordinate: 0 gives orthogonal states, -0.5 gives fully saturated
    ±0.5 vectors and positive offsets pull all states towards each other.
    """

    def __init__(self, dfa: Dfa, offset: float = 0.0):
        self.dfa = dfa
        self.alphabet = dfa.alphabet
        self.offset = offset
        self._index = {q: i for i, q in enumerate(sorted(dfa.states))}
        self.hidden_dim = len(self._index) + 1

    def feature(self, state: int | None) -> np.ndarray:
        row = np.full(self.hidden_dim, self.offset)
        row[-1 if state is None else self._index[state]] += 1.0
        return row

    def forward(self, word: str) -> ForwardResult:
        states = run(self.dfa, word).states
        return ForwardResult(
            hidden=np.stack([self.feature(q) for q in states]),
            yhat=np.array([0.9 if self.dfa.is_accepting(q) else 0.1 for q in states]),
        )


class RandomFeatureRecognizer:
    """Gold decisions with a pseudo-random hidden vector per prefix (stable across calls)."""

    def __init__(self, dfa: Dfa, hidden_dim: int = 16, salt: int = 0):
        self.dfa = dfa
        self.alphabet = dfa.alphabet
        self.hidden_dim = hidden_dim
        self.salt = salt

    def forward(self, word: str) -> ForwardResult:
        hidden = np.stack(
            [
                np.random.default_rng([self.salt, zlib.crc32(word[:i].encode())]).normal(
                    size=self.hidden_dim
                )
                for i in range(len(word) + 1)
            ]
        )
        yhat = np.array([0.9 if p else 0.1 for p in _prefix_labels(self.dfa, word)])
        return ForwardResult(hidden=hidden, yhat=yhat)


def _prefix_labels(dfa: Dfa, word: str) -> list[bool]:
    return [dfa.is_accepting(q) for q in run(dfa, word).states]


@pytest.fixture
def gold_recognizer():
    """Factory: GoldStateRecognizer for a language id or a DFA."""

    def make(language: int | Dfa, offset: float = 0.0) -> GoldStateRecognizer:
        dfa = language if isinstance(language, Dfa) else gold_dfa(language)
        return GoldStateRecognizer(dfa, offset)

    return make


@pytest.fixture
def random_recognizer():
    """Factory: RandomFeatureRecognizer for a language id."""

    def make(language: int, hidden_dim: int = 16, salt: int = 0) -> RandomFeatureRecognizer:
        return RandomFeatureRecognizer(gold_dfa(language), hidden_dim, salt)

    return make


# ============================================================================
# Experiment configuration
# ============================================================================
TINY_CONFIG = {
    "languages": [1],
    "seeds": [0],
    "training": {
        "train_count": 40,
        "train_length": 6,
        "dev_count": 20,
        "dev_length": 8,
        "epochs": 2,
        "batch_size": 8,
        "embed_dim": 3,
        "hidden_dim": 8,
        "require_convergence": False,
    },
    "extraction": {
        "data_count": 10,
        "string_length": 4,
        "eval_count": 20,
        "eval_max_len": 8,
    },
    "baseline": {"k": 5},
    "sweep": {
        "data_grid": [2, 4],
        "data_length": 4,
        "data_seeds": 1,
        "kappa_grid": [0.5, 0.01],
        "kappa_language": 1,
        "epoch_data_count": 4,
        "epoch_data_grid": [2, 4],
        "early_epoch": 1,
        "late_epoch": 2,
        "epoch_seeds": 1,
        "sanity_languages": [1],
        "sanity_grid": [2, 4],
        "sanity_seeds": 1,
    },
}


@pytest.fixture
def tiny_config(tmp_path: Path) -> ExperimentConfig:
    """Small enough to train in well under a second per recognizer."""
    return ExperimentConfig.model_validate({**TINY_CONFIG, "output_dir": str(tmp_path / "run")})


@pytest.fixture
def tiny_config_file(tmp_path: Path) -> Path:
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(TINY_CONFIG), encoding="utf-8")
    return path
