"""
Tomita languages: gold automata, membership and samplers.

This module provides:
- gold_dfa / membership for the seven Tomita languages over {a, b}
- PositiveSampler: uniform sampling of members of a fixed length
- sample_balanced: training data (half uniform strings, half members)
- sample_eval_set: held-out strings of uniformly random length

Gold machines are minimal and follow the partial convention (the dead state is
never listed). Samplers take a caller-owned numpy Generator and are
deterministic given its state.
"""

import logging
import threading
from functools import lru_cache

import numpy as np

from core.exceptions import InfeasibleSampleError, InvalidLanguageError
from models import Dfa, LabeledSample
from .automata_service import check_word, prefix_decisions, run

logger = logging.getLogger(__name__)

ALPHABET: tuple[str, ...] = ("a", "b")
LANGUAGES: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7)

DESCRIPTIONS: dict[int, str] = {
    1: "a*",
    2: "(ab)*",
    3: "an odd number of a's is never followed by an odd number of b's",
    4: "no trigram aaa",
    5: "even number of a's and even number of b's",
    6: "#a(w) = #b(w) mod 3",
    7: "b*a*b*a*",
}

# (accepting states, transitions as "src token dst") per language; state 0 is initial.
_GOLD_TABLES: dict[int, tuple[set[int], list[str]]] = {
    1: ({0}, ["0 a 0"]),
    2: ({0}, ["0 a 1", "1 b 0"]),
    # 0: no pending run, 1: odd a-run, 2: odd b-run after odd a-run, 3: even b-run after odd a-run
    3: (
        {0, 1, 3},
        ["0 a 1", "0 b 0", "1 a 0", "1 b 2", "2 b 3", "3 a 1", "3 b 2"],
    ),
    # trailing run of a's of length 0, 1, 2
    4: ({0, 1, 2}, ["0 a 1", "0 b 0", "1 a 2", "1 b 0", "2 b 0"]),
    # parity of (#a, #b): 0=(e,e) 1=(o,e) 2=(e,o) 3=(o,o)
    5: (
        {0},
        ["0 a 1", "0 b 2", "1 a 0", "1 b 3", "2 a 3", "2 b 0", "3 a 2", "3 b 1"],
    ),
    # (#a - #b) mod 3
    6: ({0}, ["0 a 1", "0 b 2", "1 a 2", "1 b 0", "2 a 0", "2 b 1"]),
    # phases b*, a*, b*, a*
    7: (
        {0, 1, 2, 3},
        ["0 b 0", "0 a 1", "1 a 1", "1 b 2", "2 b 2", "2 a 3", "3 a 3"],
    ),
}


def validate_language(language: int) -> int:
    """
    Check a Tomita language id.

    Raises:
        InvalidLanguageError: If ``language`` is not an integer in 1..7
    """
    if isinstance(language, bool) or not isinstance(language, int | np.integer):
        raise InvalidLanguageError(language)
    if int(language) not in LANGUAGES:
        raise InvalidLanguageError(language)
    return int(language)


@lru_cache(maxsize=None)
def _gold(language: int) -> Dfa:
    accepting, rows = _GOLD_TABLES[language]
    transitions = {}
    states = {0}
    for row in rows:
        src, token, dst = row.split()
        transitions[(int(src), token)] = int(dst)
        states.update((int(src), int(dst)))
    return Dfa(
        alphabet=ALPHABET,
        states=frozenset(states),
        initial=0,
        transitions=transitions,
        accepting=frozenset(accepting),
    )


def gold_dfa(language: int) -> Dfa:
    """
    Hand-specified minimal DFA of a Tomita language.

    Sizes for languages 1..7 are (1, 2, 4, 3, 4, 3, 4).

    Raises:
        InvalidLanguageError: For ids outside 1..7
    """
    return _gold(validate_language(language))


def membership(language: int, word: str) -> bool:
    """Whether ``word`` belongs to the Tomita language."""
    return run(gold_dfa(language), word).accepted


def label(language: int, word: str) -> LabeledSample:
    """Attach per-prefix membership labels to ``word``."""
    return LabeledSample(x=word, y=prefix_decisions(gold_dfa(language), word))


# ============================================================================
# Sampling
# ============================================================================


def _randbelow(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in [0, bound) for arbitrarily large Python ints."""
    bits = bound.bit_length()
    nbytes = (bits + 7) // 8
    while True:
        value = int.from_bytes(rng.bytes(nbytes), "big") >> (nbytes * 8 - bits)
        if value < bound:
            return value


def sample_uniform_string(
    length: int, rng: np.random.Generator, alphabet: tuple[str, ...] = ALPHABET
) -> str:
    """Uniform string over ``alphabet`` of exactly ``length`` tokens."""
    if length == 0:
        return ""
    return "".join(alphabet[i] for i in rng.integers(len(alphabet), size=length))


class PositiveSampler:
    """
    Uniform sampler over the strings of a fixed length accepted by a DFA.

    Uses backward path counts: ``counts[r][q]`` is the number of strings of
    length r that lead from q to acceptance. A walk then picks each token with
    probability proportional to the count of its successor, which makes every
    accepted string of length n equally likely.
    """

    def __init__(self, dfa: Dfa):
        """
        Initialize the sampler.

        Args:
            dfa: Automaton whose language is sampled
        """
        self.dfa = dfa
        self._lock = threading.Lock()
        self._counts: list[dict[int, int]] = [
            {q: int(q in dfa.accepting) for q in dfa.states}
        ]

    def completion_counts(self, remaining: int) -> dict[int, int]:
        """Accepted completions of length ``remaining`` from every state."""
        with self._lock:
            while len(self._counts) <= remaining:
                previous = self._counts[-1]
                self._counts.append(
                    {
                        q: sum(
                            previous[nxt]
                            for token in self.dfa.alphabet
                            if (nxt := self.dfa.successor(q, token)) is not None
                        )
                        for q in self.dfa.states
                    }
                )
            return self._counts[remaining]

    def count(self, length: int) -> int:
        """Number of accepted strings of exactly ``length`` tokens."""
        return self.completion_counts(length)[self.dfa.initial]

    def is_feasible(self, length: int) -> bool:
        return self.count(length) > 0

    def sample(self, length: int, rng: np.random.Generator) -> str:
        """
        Draw one accepted string of ``length`` tokens uniformly.

        Raises:
            InfeasibleSampleError: If no accepted string has that length
        """
        if not self.is_feasible(length):
            raise InfeasibleSampleError("dfa", length)
        state = self.dfa.initial
        tokens: list[str] = []
        for remaining in range(length, 0, -1):
            tail = self.completion_counts(remaining - 1)
            options = [
                (token, nxt, tail[nxt])
                for token in self.dfa.alphabet
                if (nxt := self.dfa.successor(state, token)) is not None
                and tail[nxt] > 0
            ]
            pick = _randbelow(rng, sum(weight for _, _, weight in options))
            for token, nxt, weight in options:
                if pick < weight:
                    tokens.append(token)
                    state = nxt
                    break
                pick -= weight
        return "".join(tokens)


@lru_cache(maxsize=None)
def positive_sampler(language: int) -> PositiveSampler:
    return PositiveSampler(gold_dfa(language))


def sample_uniform_positive(
    language: int, length: int, rng: np.random.Generator
) -> str:
    """
    Member of the language of exactly ``length`` tokens, uniformly at random.

    Raises:
        InfeasibleSampleError: If the language has no string of that length
    """
    sampler = positive_sampler(validate_language(language))
    if not sampler.is_feasible(length):
        raise InfeasibleSampleError(language, length)
    return sampler.sample(length, rng)


def sample_balanced(
    language: int, length: int, count: int, rng: np.random.Generator
) -> list[LabeledSample]:
    """
    Training data: ⌈count/2⌉ uniform strings, then ⌊count/2⌋ members.

    When the language has no member of ``length`` the second half falls back
    to uniform strings and a warning is logged, so counts and lengths are
    always as requested.
    """
    language = validate_language(language)
    sampler = positive_sampler(language)
    n_uniform = (count + 1) // 2
    n_positive = count // 2

    words = [sample_uniform_string(length, rng) for _ in range(n_uniform)]
    if n_positive and not sampler.is_feasible(length):
        logger.warning(
            f"Tomita {language} has no string of length {length}; "
            f"drawing {n_positive} uniform strings instead of members"
        )
        words.extend(sample_uniform_string(length, rng) for _ in range(n_positive))
    else:
        words.extend(sampler.sample(length, rng) for _ in range(n_positive))
    return [label(language, word) for word in words]


def sample_eval_set(
    language: int, count: int, max_len: int, rng: np.random.Generator
) -> list[LabeledSample]:
    """
    Held-out strings with lengths uniform in 0..max_len.

    For each string a fair coin decides between a member of the drawn length
    (when one exists) and a uniform string.
    """
    language = validate_language(language)
    sampler = positive_sampler(language)
    samples = []
    for _ in range(count):
        length = int(rng.integers(max_len + 1))
        wants_member = bool(rng.integers(2))
        if wants_member and sampler.is_feasible(length):
            word = sampler.sample(length, rng)
        else:
            word = sample_uniform_string(length, rng)
        samples.append(label(language, word))
    return samples


def labels_for(language: int, words: list[str]) -> list[LabeledSample]:
    """Label arbitrary strings with the gold language."""
    for word in words:
        check_word(ALPHABET, word)
    return [label(language, word) for word in words]
