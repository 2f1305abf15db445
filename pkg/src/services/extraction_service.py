"""
Automaton extraction by state merging.

This module provides:
- build_prefix_tree: trie of the extraction strings labeled by the recognizer
- MergePolicy / should_merge: same label and cosine similarity above 1 - kappa
- MergeGraph / merge: union-of-transitions state merging
- merge_all: the full merging pass over a prefix tree
- extract: tree -> merge -> determinize -> minimize, with an ExtractionReport

Merge order: the state to delete (q_i) runs over breadth-first ids from the
deepest state up, and each one folds into the lowest-numbered compatible state
(q_j), so survivors are always the shallower states.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal, Protocol

import numpy as np

from core.exceptions import AutomatonError, InvalidInputError
from models import Dfa, Nfa, PrefixTree, Recognizer, StateId, Token
from schemas import DEFAULT_KAPPA
from .automata_service import check_word, determinize, minimize, prefix_decisions
from .rnn_service import kappa_bound, saturation_level, threshold

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MergePolicy:
    """Similarity tolerance kappa in (0, 1)."""

    kappa: float

    def __post_init__(self) -> None:
        if not 0.0 < self.kappa < 1.0:
            raise InvalidInputError(
                "kappa must satisfy 0 < kappa < 1", details={"kappa": self.kappa}
            )

    @property
    def threshold(self) -> float:
        """Cosine similarity a pair has to exceed."""
        return 1.0 - self.kappa


class _Featured(Protocol):
    labels: Sequence[bool]
    features: np.ndarray


# ============================================================================
# Prefix tree
# ============================================================================


def build_prefix_tree(model: Recognizer, strings: Sequence[str]) -> PrefixTree:
    """
    Trie of ``strings`` whose states carry recognizer decisions and hidden states.

    Each string is read once; the hidden row of a prefix is taken from the
    first string that contains it (later strings compute the same row).

    Raises:
        InvalidInputError: On an empty list or a token outside the alphabet
    """
    if not strings:
        raise InvalidInputError("A prefix tree needs at least one string")
    alphabet = tuple(model.alphabet)
    rows: dict[str, tuple[bool, np.ndarray]] = {}
    for word in strings:
        check_word(alphabet, word)
        result = model.forward(word)
        labels = threshold(result.yhat)
        for i in range(len(word) + 1):
            rows.setdefault(word[:i], (labels[i], result.hidden[i]))

    order = {token: i for i, token in enumerate(alphabet)}
    prefixes = sorted(rows, key=lambda p: (len(p), [order[t] for t in p]))
    ids = {prefix: state for state, prefix in enumerate(prefixes)}
    edges = {(ids[p[:-1]], p[-1]): ids[p] for p in prefixes if p}
    tree = PrefixTree(
        alphabet=alphabet,
        prefixes=tuple(prefixes),
        edges=edges,
        labels=tuple(rows[p][0] for p in prefixes),
        features=np.stack([rows[p][1] for p in prefixes]),
    )
    logger.debug(f"Built prefix tree with {tree.size} states from {len(strings)} strings")
    return tree


# ============================================================================
# Merge policy
# ============================================================================


def _cosines(features: np.ndarray, norms: np.ndarray, state: int, others: np.ndarray) -> np.ndarray:
    return (features[others] @ features[state]) / (norms[others] * norms[state])


def should_merge(holder: _Featured, qi: StateId, qj: StateId, policy: MergePolicy) -> bool:
    """
    Whether two states may merge.

    True iff both carry the same label and the cosine similarity of their
    features is strictly above ``1 - kappa``. A zero feature vector is never
    similar to anything.
    """
    if holder.labels[qi] != holder.labels[qj]:
        return False
    left, right = holder.features[qi], holder.features[qj]
    norm_left, norm_right = np.linalg.norm(left), np.linalg.norm(right)
    if norm_left == 0 or norm_right == 0:
        logger.warning(f"Zero feature vector among states {qi}, {qj}; not merging")
        return False
    return bool(float(left @ right) / (norm_left * norm_right) > policy.threshold)


# ============================================================================
# Merging
# ============================================================================


class MergeGraph:
    """
    Mutable automaton used while merging.

    Transitions are set-valued, so merging can introduce nondeterminism.
    Labels and features are indexed by the original tree ids; a merged state
    keeps the survivor's feature.
    """

    def __init__(
        self,
        alphabet: tuple[Token, ...],
        initial: StateId,
        transitions: dict[tuple[StateId, Token], set[StateId]],
        labels: Sequence[bool],
        features: np.ndarray,
    ):
        self.alphabet = alphabet
        self.initial = initial
        self.labels = tuple(labels)
        self.features = features
        self.live: set[StateId] = set(range(len(self.labels)))
        self.out: dict[StateId, dict[Token, set[StateId]]] = {q: {} for q in self.live}
        self.into: dict[StateId, set[tuple[StateId, Token]]] = {q: set() for q in self.live}
        for (src, token), targets in transitions.items():
            for dst in targets:
                self._link(src, token, dst)

    @classmethod
    def from_tree(cls, tree: PrefixTree) -> "MergeGraph":
        return cls(
            alphabet=tree.alphabet,
            initial=tree.root,
            transitions={key: {dst} for key, dst in tree.edges.items()},
            labels=tree.labels,
            features=tree.features,
        )

    def _link(self, src: StateId, token: Token, dst: StateId) -> None:
        self.out[src].setdefault(token, set()).add(dst)
        self.into[dst].add((src, token))

    @property
    def size(self) -> int:
        return len(self.live)

    def copy(self) -> "MergeGraph":
        clone = object.__new__(MergeGraph)
        clone.alphabet = self.alphabet
        clone.initial = self.initial
        clone.labels = self.labels
        clone.features = self.features
        clone.live = set(self.live)
        clone.out = {q: {t: set(d) for t, d in edges.items()} for q, edges in self.out.items()}
        clone.into = {q: set(edges) for q, edges in self.into.items()}
        return clone

    def merge(self, qi: StateId, qj: StateId) -> None:
        """
        Delete ``qi`` and fold it into ``qj``.

        Edges into ``qi`` are redirected to ``qj`` and the outgoing edges of
        ``qi`` are added to those of ``qj``. The initial marker follows.

        Raises:
            AutomatonError: If the states coincide or one was already deleted
        """
        if qi == qj:
            raise AutomatonError("Cannot merge a state with itself", details={"state": qi})
        for state in (qi, qj):
            if state not in self.live:
                raise AutomatonError(
                    f"State {state} has already been merged away", details={"state": state}
                )
        for src, token in list(self.into.pop(qi)):
            targets = self.out[src][token]
            targets.discard(qi)
            targets.add(qj)
            self.into[qj].add((qj if src == qi else src, token))
        for token, targets in self.out.pop(qi).items():
            for dst in targets:
                self.into[dst].discard((qi, token))
                self._link(qj, token, dst)
        self.live.discard(qi)
        if self.initial == qi:
            self.initial = qj

    def to_nfa(self) -> Nfa:
        """Snapshot of the live part as an automaton."""
        return Nfa(
            alphabet=self.alphabet,
            states=frozenset(self.live),
            initial=self.initial,
            transitions={
                (src, token): frozenset(targets)
                for src, edges in self.out.items()
                for token, targets in edges.items()
            },
            accepting=frozenset(q for q in self.live if self.labels[q]),
        )


def merge(graph: MergeGraph, qi: StateId, qj: StateId) -> MergeGraph:
    """Merged copy of ``graph``; the input is left untouched."""
    merged = graph.copy()
    merged.merge(qi, qj)
    return merged


def merge_all(tree: PrefixTree, policy: MergePolicy) -> Nfa:
    """
    Merge every compatible pair of a prefix tree.

    States are visited from the highest breadth-first id down; each one is
    merged into the lowest-id state it is compatible with. Labels and
    features of surviving states never change, so restarting the scan after
    every merge would make exactly the same merges, and one pass reaches the
    fixed point.

    Returns:
        The merged automaton (possibly nondeterministic)
    """
    graph = MergeGraph.from_tree(tree)
    features = tree.features
    norms = np.linalg.norm(features, axis=1)
    labels = np.asarray(tree.labels, dtype=bool)
    zero = norms == 0
    if np.any(zero):
        logger.warning(f"{int(zero.sum())} states have zero features and will not merge")

    for qi in range(tree.size - 1, 0, -1):
        if zero[qi]:
            continue
        candidates = np.flatnonzero((labels[:qi] == labels[qi]) & ~zero[:qi])
        if len(candidates) == 0:
            continue
        similar = candidates[_cosines(features, norms, qi, candidates) > policy.threshold]
        if len(similar):
            graph.merge(qi, int(similar[0]))

    merged = graph.to_nfa()
    logger.debug(f"Merged {tree.size} tree states into {merged.size} (kappa={policy.kappa})")
    return merged


# ============================================================================
# Pipeline
# ============================================================================


@dataclass(frozen=True)
class ExtractionReport:
    """
    Result of one state merging extraction.

    Attributes:
        tree: The prefix tree the extraction started from
        merged: Automaton after merging (may be nondeterministic)
        determinized: Subset construction of ``merged``
        final: Minimized DFA
        kappa: Tolerance used
        data_count: Number of extraction strings
        train_fidelity: Fraction of tree prefixes where ``final`` agrees with the recognizer
    """

    tree: PrefixTree
    merged: Nfa
    determinized: Dfa
    final: Dfa
    kappa: float
    data_count: int
    train_fidelity: float

    @property
    def sizes(self) -> tuple[int, int, int]:
        """(tree states, merged states, minimized states)."""
        return self.tree.size, self.merged.size, self.final.size


def resolve_kappa(
    model: Recognizer, strings: Sequence[str], kappa: float | Literal["auto"]
) -> float:
    """
    Concrete tolerance for an extraction.

    ``"auto"`` measures the saturation of the recognizer on ``strings`` and
    uses the separation bound when it exists (capped below 1); otherwise the
    default tolerance is used and a warning is logged.
    """
    if kappa != "auto":
        return float(kappa)
    epsilon = saturation_level(model, list(strings))
    bound = kappa_bound(model.hidden_dim, epsilon)
    if bound is None:
        logger.warning(
            f"Saturation {epsilon:.4f} leaves no safe tolerance for d={model.hidden_dim}; "
            f"using kappa={DEFAULT_KAPPA}"
        )
        return DEFAULT_KAPPA
    resolved = min(bound, math.nextafter(1.0, 0.0))
    logger.info(f"Saturation {epsilon:.4f} gives kappa={resolved:.6f}")
    return resolved


def tree_fidelity(tree: PrefixTree, dfa: Dfa) -> float:
    """Fraction of tree prefixes on which ``dfa`` reproduces the tree label."""
    hits = sum(
        prefix_decisions(dfa, prefix)[-1] == label
        for prefix, label in zip(tree.prefixes, tree.labels, strict=True)
    )
    return hits / tree.size


def extract(
    model: Recognizer,
    strings: Sequence[str],
    kappa: float | Literal["auto"] = DEFAULT_KAPPA,
) -> ExtractionReport:
    """
    Extract a DFA from a recognizer.

    Args:
        model: Recognizer to explain
        strings: Extraction strings
        kappa: Similarity tolerance or ``"auto"``

    Returns:
        ExtractionReport with every intermediate machine and the sizes
    """
    tree = build_prefix_tree(model, strings)
    policy = MergePolicy(resolve_kappa(model, strings, kappa))
    merged = merge_all(tree, policy)
    determinized = determinize(merged)
    final = minimize(determinized)
    train_fidelity = tree_fidelity(tree, final)
    if train_fidelity < 1.0:
        logger.warning(
            f"Extracted DFA disagrees with the recognizer on "
            f"{1.0 - train_fidelity:.2%} of the extraction prefixes"
        )
    report = ExtractionReport(
        tree=tree,
        merged=merged,
        determinized=determinized,
        final=final,
        kappa=policy.kappa,
        data_count=len(strings),
        train_fidelity=train_fidelity,
    )
    logger.info(
        f"Extraction sizes (tree, merged, minimized) = {report.sizes}, "
        f"train fidelity {train_fidelity:.4f}"
    )
    return report
