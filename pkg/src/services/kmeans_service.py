"""
k-means extraction baseline.

Hidden states of the extraction strings are clustered with Lloyd's algorithm;
clusters become DFA states, acceptance is a majority vote of the recognizer
decisions inside a cluster, and each transition is the most frequent successor
cluster.
"""

import logging
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from core.exceptions import InvalidInputError
from models import Dfa, Recognizer, StateId, Token
from .automata_service import check_word, minimize, reachable_states, restrict
from .rnn_service import threshold

logger = logging.getLogger(__name__)

DEFAULT_K = 20
DEFAULT_MAX_ITER = 100


@dataclass(frozen=True, eq=False)
class KMeansResult:
    """
    Lloyd clustering outcome.

    Attributes:
        assignments: Cluster id of every point
        centroids: One row per cluster
        distortions: Sum of squared distances after every assignment step
        iterations: Assignment steps performed
    """

    assignments: np.ndarray
    centroids: np.ndarray
    distortions: list[float]
    iterations: int

    @property
    def k(self) -> int:
        return len(self.centroids)


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def kmeans(
    points: np.ndarray,
    k: int,
    rng: np.random.Generator,
    max_iter: int = DEFAULT_MAX_ITER,
) -> KMeansResult:
    """
    Cluster ``points`` with Lloyd's algorithm.

    Centroids start at ``k`` distinct points drawn without replacement. When
    there are fewer distinct points than ``k``, every distinct point gets a
    cluster. Iteration stops when an assignment repeats or after ``max_iter``
    assignment steps. An emptied cluster is moved onto the point farthest from
    its centroid.

    Raises:
        InvalidInputError: If k < 1 or there are fewer points than k
    """
    points = np.asarray(points, dtype=np.float64)
    if k < 1 or len(points) < k:
        raise InvalidInputError(
            "kmeans needs k >= 1 and at least k points",
            details={"k": k, "points": len(points)},
        )
    distinct = np.unique(points, axis=0)
    if len(distinct) < k:
        logger.info(f"Only {len(distinct)} distinct points; using that many clusters instead of {k}")
        k = len(distinct)
    centroids = distinct[rng.choice(len(distinct), size=k, replace=False)].copy()

    previous: np.ndarray | None = None
    distortions: list[float] = []
    iterations = 0
    for iterations in range(1, max_iter + 1):
        distances = _squared_distances(points, centroids)
        assignments = distances.argmin(axis=1)
        nearest = distances[np.arange(len(points)), assignments]
        distortions.append(float(nearest.sum()))
        if previous is not None and np.array_equal(assignments, previous):
            break
        previous = assignments

        for cluster in range(k):
            members = points[assignments == cluster]
            if len(members):
                centroids[cluster] = members.mean(axis=0)
            else:
                farthest = int(nearest.argmax())
                logger.debug(f"Cluster {cluster} is empty; reseeding at point {farthest}")
                centroids[cluster] = points[farthest]
                nearest[farthest] = 0.0
    return KMeansResult(
        assignments=assignments,
        centroids=centroids,
        distortions=distortions,
        iterations=iterations,
    )


# ============================================================================
# Extraction
# ============================================================================


@dataclass(frozen=True, eq=False)
class HiddenStateDataset:
    """
    Hidden states visited while reading the extraction strings.

    Row r holds one prefix occurrence; ``next_token[r]`` is the token read next
    (None at the end of a string) and ``successor[r]`` the row it leads to (-1
    at the end). Rows with ``start`` set are the empty prefix.
    """

    hidden: np.ndarray
    labels: np.ndarray
    next_token: tuple[Token | None, ...]
    successor: np.ndarray
    start: np.ndarray

    def __len__(self) -> int:
        return len(self.labels)


def collect_hidden_states(model: Recognizer, strings: Sequence[str]) -> HiddenStateDataset:
    """Run the recognizer over ``strings`` and record every visited state."""
    if not strings:
        raise InvalidInputError("Hidden state collection needs at least one string")
    hidden, labels, tokens, successor, start = [], [], [], [], []
    offset = 0
    for word in strings:
        check_word(model.alphabet, word)
        result = model.forward(word)
        hidden.append(result.hidden)
        labels.extend(threshold(result.yhat))
        for i in range(len(word) + 1):
            last = i == len(word)
            tokens.append(None if last else word[i])
            successor.append(-1 if last else offset + i + 1)
            start.append(i == 0)
        offset += len(word) + 1
    return HiddenStateDataset(
        hidden=np.concatenate(hidden),
        labels=np.asarray(labels, dtype=bool),
        next_token=tuple(tokens),
        successor=np.asarray(successor, dtype=np.int64),
        start=np.asarray(start, dtype=bool),
    )


@dataclass(frozen=True, eq=False)
class KMeansExtraction:
    """
    Baseline extraction outcome.

    Attributes:
        dataset: Hidden states that were clustered
        clustering: The k-means result
        raw: Voted DFA restricted to clusters reachable from the initial one
        final: Minimized DFA
    """

    dataset: HiddenStateDataset
    clustering: KMeansResult
    raw: Dfa
    final: Dfa


def vote_automaton(
    dataset: HiddenStateDataset, assignments: np.ndarray, alphabet: tuple[Token, ...]
) -> Dfa:
    """
    DFA whose states are clusters.

    A cluster accepts when strictly more than half of its members are accepted
    (ties reject). The transition on a token goes to the successor cluster seen
    most often, ties going to the lowest cluster id; unseen pairs stay undefined.
    Clusters unreachable from the initial cluster are pruned.
    """
    clusters = sorted(int(c) for c in np.unique(assignments))
    accepting = frozenset(
        c for c in clusters if 2 * int(dataset.labels[assignments == c].sum()) > int((assignments == c).sum())
    )
    votes: dict[tuple[StateId, Token], Counter[StateId]] = {}
    for row, token in enumerate(dataset.next_token):
        if token is None:
            continue
        key = (int(assignments[row]), token)
        votes.setdefault(key, Counter())[int(assignments[dataset.successor[row]])] += 1
    transitions = {
        key: min(counter, key=lambda c: (-counter[c], c)) for key, counter in votes.items()
    }
    initial = int(assignments[np.flatnonzero(dataset.start)[0]])
    dfa = Dfa(
        alphabet=alphabet,
        states=frozenset(clusters),
        initial=initial,
        transitions=transitions,
        accepting=accepting,
    )
    return restrict(dfa, reachable_states(dfa))


def kmeans_extract(
    model: Recognizer,
    strings: Sequence[str],
    k: int,
    rng: np.random.Generator,
    max_iter: int = DEFAULT_MAX_ITER,
) -> KMeansExtraction:
    """
    Extract a DFA by clustering hidden states.

    Args:
        model: Recognizer to explain
        strings: Extraction strings
        k: Number of clusters
        rng: Generator for centroid initialization
        max_iter: Cap on Lloyd iterations

    Returns:
        KMeansExtraction with the voted and the minimized DFA
    """
    dataset = collect_hidden_states(model, strings)
    clustering = kmeans(dataset.hidden, min(k, len(dataset)), rng, max_iter)
    raw = vote_automaton(dataset, clustering.assignments, tuple(model.alphabet))
    final = minimize(raw)
    logger.info(
        f"k-means extraction: {clustering.k} clusters, {raw.size} reachable, "
        f"{final.size} after minimization ({clustering.iterations} iterations)"
    )
    return KMeansExtraction(dataset=dataset, clustering=clustering, raw=raw, final=final)
