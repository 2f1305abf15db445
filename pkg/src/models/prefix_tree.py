"""
Prefix tree (trie) built from recognizer decisions.

Each state stands for one distinct prefix of the extraction strings. States
are numbered in breadth-first order from the root with children visited in
alphabet order, so the root is always state 0.
"""

from dataclasses import dataclass

import numpy as np

from .automaton import Dfa, StateId, Token


@dataclass(frozen=True, eq=False)
class PrefixTree:
    """
    Trie automaton whose states carry recognizer features and labels.

    Attributes:
        alphabet: Ordered tokens
        prefixes: Prefix of each state, indexed by state id
        edges: (parent, token) -> child
        labels: Accept flag of each state (recognizer decision on its prefix)
        features: Matrix whose row ``q`` is the hidden state φ(q)
    """

    alphabet: tuple[Token, ...]
    prefixes: tuple[str, ...]
    edges: dict[tuple[StateId, Token], StateId]
    labels: tuple[bool, ...]
    features: np.ndarray

    root: StateId = 0

    @property
    def size(self) -> int:
        return len(self.prefixes)

    def state_of(self, prefix: str) -> StateId | None:
        """Follow ``prefix`` from the root; None when it leaves the tree."""
        state: StateId | None = self.root
        for token in prefix:
            state = self.edges.get((state, token))
            if state is None:
                return None
        return state

    def to_dfa(self) -> Dfa:
        """View the tree as a (partial) DFA."""
        return Dfa(
            alphabet=self.alphabet,
            states=frozenset(range(self.size)),
            initial=self.root,
            transitions=self.edges,
            accepting=frozenset(q for q, label in enumerate(self.labels) if label),
        )
