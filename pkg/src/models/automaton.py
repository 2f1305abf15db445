"""
Finite automaton value types.

This module defines:
- Dfa: deterministic automaton with a partial transition function
- Nfa: nondeterministic automaton (set-valued transitions)
- RunTrace: the state sequence visited while reading a string

States are opaque integers. A missing transition denotes the undefined state,
written DEAD (``None``); it is absorbing, never accepting and never a member
of ``states``, so state counts always exclude it.
"""

from collections.abc import Mapping
from dataclasses import dataclass, field
from types import MappingProxyType

from core.exceptions import AutomatonError

StateId = int
Token = str

DEAD: None = None


@dataclass(frozen=True)
class Dfa:
    """
    Deterministic finite automaton ⟨Σ, Q, q0, δ, F⟩ with partial δ.

    Attributes:
        alphabet: Ordered tokens; the order drives canonical numbering and export
        states: State ids
        initial: Initial state id
        transitions: (state, token) -> state; absent keys lead to DEAD
        accepting: Accepting state ids
    """

    alphabet: tuple[Token, ...]
    states: frozenset[StateId]
    initial: StateId
    transitions: Mapping[tuple[StateId, Token], StateId] = field(hash=False)
    accepting: frozenset[StateId]

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(
            self, "transitions", MappingProxyType(dict(self.transitions))
        )
        _check_alphabet(self.alphabet)
        if self.initial not in self.states:
            raise AutomatonError(
                "Initial state is not a member of the state set",
                details={"initial": self.initial},
            )
        if not self.accepting <= self.states:
            raise AutomatonError(
                "Accepting states must be a subset of the state set",
                details={"extra": sorted(self.accepting - self.states)},
            )
        for (src, token), dst in self.transitions.items():
            if src not in self.states or dst not in self.states:
                raise AutomatonError(
                    "Transition endpoint outside the state set",
                    details={"transition": (src, token, dst)},
                )
            if token not in self.alphabet:
                raise AutomatonError(
                    f"Transition token {token!r} is not in the alphabet",
                    details={"transition": (src, token, dst)},
                )

    @property
    def size(self) -> int:
        """Number of states (the undefined state is not counted)."""
        return len(self.states)

    def successor(self, state: StateId | None, token: Token) -> StateId | None:
        """Follow one transition; DEAD stays DEAD."""
        if state is DEAD:
            return DEAD
        return self.transitions.get((state, token), DEAD)

    def is_accepting(self, state: StateId | None) -> bool:
        return state is not DEAD and state in self.accepting

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dfa):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and self.states == other.states
            and self.initial == other.initial
            and dict(self.transitions) == dict(other.transitions)
            and self.accepting == other.accepting
        )

    def __hash__(self) -> int:
        return hash(
            (
                self.alphabet,
                self.states,
                self.initial,
                frozenset(self.transitions.items()),
                self.accepting,
            )
        )


@dataclass(frozen=True)
class Nfa:
    """
    Nondeterministic finite automaton with a single initial state.

    A string is accepted iff some path from ``initial`` ends in an accepting
    state. Empty successor sets are equivalent to a missing key.
    """

    alphabet: tuple[Token, ...]
    states: frozenset[StateId]
    initial: StateId
    transitions: Mapping[tuple[StateId, Token], frozenset[StateId]] = field(
        hash=False
    )
    accepting: frozenset[StateId]

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(
            self,
            "transitions",
            MappingProxyType(
                {
                    key: frozenset(targets)
                    for key, targets in self.transitions.items()
                    if targets
                }
            ),
        )
        _check_alphabet(self.alphabet)
        if self.initial not in self.states:
            raise AutomatonError(
                "Initial state is not a member of the state set",
                details={"initial": self.initial},
            )
        if not self.accepting <= self.states:
            raise AutomatonError("Accepting states must be a subset of the state set")
        for (src, token), targets in self.transitions.items():
            if src not in self.states or not targets <= self.states:
                raise AutomatonError(
                    "Transition endpoint outside the state set",
                    details={"source": src, "token": token},
                )
            if token not in self.alphabet:
                raise AutomatonError(f"Transition token {token!r} is not in the alphabet")

    @property
    def size(self) -> int:
        return len(self.states)

    def successors(self, state: StateId, token: Token) -> frozenset[StateId]:
        return self.transitions.get((state, token), frozenset())


@dataclass(frozen=True)
class RunTrace:
    """
    States visited while reading a string.

    ``states[0]`` is the initial state and ``states[i]`` the state after the
    first ``i`` tokens; DEAD entries mark the undefined state.
    """

    states: tuple[StateId | None, ...]
    accepted: bool

    @property
    def verdict(self) -> str:
        return "accept" if self.accepted else "reject"


def _check_alphabet(alphabet: tuple[Token, ...]) -> None:
    if len(set(alphabet)) != len(alphabet):
        raise AutomatonError("Alphabet contains duplicate tokens")
    for token in alphabet:
        if not isinstance(token, str) or len(token) != 1:
            raise AutomatonError(
                f"Tokens must be single characters, got {token!r}",
                details={"alphabet": list(alphabet)},
            )
