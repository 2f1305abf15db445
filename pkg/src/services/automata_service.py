"""
Finite automaton algorithms.

This module provides:
- Execution: run, prefix_decisions, accepts, nfa_accepts
- Determinization by subset construction
- Minimization by Hopcroft partition refinement
- Language equivalence by product reachability
- Canonical renumbering, trimming and word enumeration helpers

Every function is pure: inputs are never mutated and new automata are
returned. Machines use the partial-transition convention; algorithms that need
a total transition function add a temporary sink and strip it again.
"""

import itertools
import logging
from collections import deque
from collections.abc import Iterable, Iterator, Sequence

from core.exceptions import InvalidInputError
from models import DEAD, Dfa, Nfa, RunTrace, StateId, Token

logger = logging.getLogger(__name__)

_SINK: StateId = -1


# ============================================================================
# Execution
# ============================================================================


def check_word(alphabet: Sequence[Token], word: Iterable[Token]) -> None:
    """
    Ensure every token of ``word`` belongs to ``alphabet``.

    Raises:
        InvalidInputError: If a token is outside the alphabet
    """
    allowed = set(alphabet)
    for position, token in enumerate(word):
        if token not in allowed:
            raise InvalidInputError(
                f"Token {token!r} at position {position} is not in the alphabet",
                details={"alphabet": list(alphabet), "position": position},
            )


def run(dfa: Dfa, word: str) -> RunTrace:
    """
    Read ``word`` and record every visited state.

    Once the undefined state is entered every later entry is DEAD and the
    verdict is reject.

    Args:
        dfa: Automaton to execute
        word: String over the automaton's alphabet

    Returns:
        RunTrace of length len(word) + 1

    Raises:
        InvalidInputError: If ``word`` has a token outside the alphabet

    Example:
        >>> run(fig1, "abb").states
        (0, 1, 0, None)
    """
    check_word(dfa.alphabet, word)
    states: list[StateId | None] = [dfa.initial]
    for token in word:
        states.append(dfa.successor(states[-1], token))
    return RunTrace(states=tuple(states), accepted=dfa.is_accepting(states[-1]))


def prefix_decisions(dfa: Dfa, word: str) -> tuple[bool, ...]:
    """Accept verdict of every prefix of ``word``, starting with the empty one."""
    trace = run(dfa, word)
    return tuple(dfa.is_accepting(state) for state in trace.states)


def accepts(dfa: Dfa, word: str) -> bool:
    return run(dfa, word).accepted


def nfa_accepts(nfa: Nfa, word: str) -> bool:
    """Path-existence acceptance of an NFA."""
    check_word(nfa.alphabet, word)
    current = {nfa.initial}
    for token in word:
        current = {dst for src in current for dst in nfa.successors(src, token)}
        if not current:
            return False
    return bool(current & nfa.accepting)


# ============================================================================
# Determinization
# ============================================================================


def determinize(nfa: Nfa) -> Dfa:
    """
    Subset construction.

    Only subsets reachable from ``{initial}`` are built; the empty subset is
    the undefined state and is left out. Subsets are numbered in discovery
    order (breadth-first, tokens in alphabet order).
    """
    start = frozenset({nfa.initial})
    ids: dict[frozenset[StateId], StateId] = {start: 0}
    queue = deque([start])
    transitions: dict[tuple[StateId, Token], StateId] = {}

    while queue:
        subset = queue.popleft()
        for token in nfa.alphabet:
            target = frozenset(
                dst for src in subset for dst in nfa.successors(src, token)
            )
            if not target:
                continue
            if target not in ids:
                ids[target] = len(ids)
                queue.append(target)
            transitions[(ids[subset], token)] = ids[target]

    accepting = frozenset(
        state_id for subset, state_id in ids.items() if subset & nfa.accepting
    )
    logger.debug(f"Determinized {nfa.size}-state NFA into {len(ids)} subsets")
    return Dfa(
        alphabet=nfa.alphabet,
        states=frozenset(ids.values()),
        initial=0,
        transitions=transitions,
        accepting=accepting,
    )


# ============================================================================
# Structural helpers
# ============================================================================


def reachable_states(dfa: Dfa) -> frozenset[StateId]:
    seen = {dfa.initial}
    queue = deque([dfa.initial])
    while queue:
        state = queue.popleft()
        for token in dfa.alphabet:
            nxt = dfa.successor(state, token)
            if nxt is not DEAD and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(seen)


def live_states(dfa: Dfa) -> frozenset[StateId]:
    """States from which some accepting state can be reached."""
    predecessors: dict[StateId, set[StateId]] = {}
    for (src, _), dst in dfa.transitions.items():
        predecessors.setdefault(dst, set()).add(src)
    seen = set(dfa.accepting)
    queue = deque(dfa.accepting)
    while queue:
        state = queue.popleft()
        for src in predecessors.get(state, ()):
            if src not in seen:
                seen.add(src)
                queue.append(src)
    return frozenset(seen)


def restrict(dfa: Dfa, keep: Iterable[StateId]) -> Dfa:
    """Sub-automaton on ``keep`` (which must contain the initial state)."""
    kept = frozenset(keep)
    return Dfa(
        alphabet=dfa.alphabet,
        states=kept,
        initial=dfa.initial,
        transitions={
            (src, token): dst
            for (src, token), dst in dfa.transitions.items()
            if src in kept and dst in kept
        },
        accepting=dfa.accepting & kept,
    )


def trim(dfa: Dfa) -> Dfa:
    """
    Drop unreachable states and states that cannot reach acceptance.

    Both kinds behave exactly like the undefined state. When the language is
    empty the result is a single rejecting initial state.
    """
    useful = reachable_states(dfa) & live_states(dfa)
    if dfa.initial not in useful:
        return Dfa(
            alphabet=dfa.alphabet,
            states=frozenset({0}),
            initial=0,
            transitions={},
            accepting=frozenset(),
        )
    return restrict(dfa, useful)


def canonical(dfa: Dfa) -> Dfa:
    """
    Renumber reachable states 0.. in breadth-first order.

    Two automata are isomorphic on their reachable parts iff their canonical
    forms are equal.
    """
    order: dict[StateId, StateId] = {dfa.initial: 0}
    queue = deque([dfa.initial])
    transitions: dict[tuple[StateId, Token], StateId] = {}
    while queue:
        state = queue.popleft()
        for token in dfa.alphabet:
            nxt = dfa.successor(state, token)
            if nxt is DEAD:
                continue
            if nxt not in order:
                order[nxt] = len(order)
                queue.append(nxt)
            transitions[(order[state], token)] = order[nxt]
    return Dfa(
        alphabet=dfa.alphabet,
        states=frozenset(order.values()),
        initial=0,
        transitions=transitions,
        accepting=frozenset(order[q] for q in order if q in dfa.accepting),
    )


def is_isomorphic(a: Dfa, b: Dfa) -> bool:
    return canonical(a) == canonical(b)


# ============================================================================
# Minimization
# ============================================================================


def _hopcroft(
    states: frozenset[StateId],
    alphabet: tuple[Token, ...],
    delta: dict[tuple[StateId, Token], StateId],
    accepting: frozenset[StateId],
) -> list[frozenset[StateId]]:
    """Coarsest partition of a complete DFA compatible with acceptance."""
    inverse: dict[tuple[StateId, Token], set[StateId]] = {}
    for (src, token), dst in delta.items():
        inverse.setdefault((dst, token), set()).add(src)

    rejecting = states - accepting
    partition = [block for block in (accepting, rejecting) if block]
    waiting = [min(partition, key=len)] if len(partition) == 2 else []

    while waiting:
        splitter = waiting.pop()
        for token in alphabet:
            preimage = set()
            for state in splitter:
                preimage |= inverse.get((state, token), set())
            if not preimage:
                continue
            refined: list[frozenset[StateId]] = []
            for block in partition:
                inside = block & preimage
                outside = block - preimage
                if not inside or not outside:
                    refined.append(block)
                    continue
                refined.extend((inside, outside))
                if block in waiting:
                    waiting.remove(block)
                    waiting.extend((inside, outside))
                else:
                    waiting.append(min(inside, outside, key=len))
            partition = refined
    return partition


def minimize(dfa: Dfa) -> Dfa:
    """
    Minimal DFA recognizing the same language.

    Unreachable states are removed, the machine is completed with a temporary
    sink, Hopcroft refinement merges language-equivalent states, and the block
    that cannot reach acceptance (containing the sink) is dropped again. The
    result is in canonical numbering, so minimize is idempotent up to equality.
    """
    reachable = restrict(dfa, reachable_states(dfa))
    states = reachable.states | {_SINK}
    delta = {
        (state, token): reachable.transitions.get((state, token), _SINK)
        for state in reachable.states
        for token in dfa.alphabet
    }
    delta.update({(_SINK, token): _SINK for token in dfa.alphabet})

    blocks = _hopcroft(frozenset(states), dfa.alphabet, delta, reachable.accepting)
    block_of = {state: index for index, block in enumerate(blocks) for state in block}

    quotient = Dfa(
        alphabet=dfa.alphabet,
        states=frozenset(range(len(blocks))),
        initial=block_of[dfa.initial],
        transitions={
            (block_of[src], token): block_of[dst] for (src, token), dst in delta.items()
        },
        accepting=frozenset(block_of[q] for q in reachable.accepting),
    )
    result = canonical(trim(quotient))
    logger.debug(f"Minimized {dfa.size} states to {result.size}")
    return result


# ============================================================================
# Equivalence
# ============================================================================


def distinguishing_word(a: Dfa, b: Dfa) -> str | None:
    """
    Shortest string accepted by exactly one of the two automata.

    Breadth-first search over pairs of states of the product machine, with the
    undefined state as an ordinary (absorbing, rejecting) member of each pair.

    Raises:
        InvalidInputError: If the alphabets differ
    """
    if set(a.alphabet) != set(b.alphabet):
        raise InvalidInputError(
            "Automata over different alphabets cannot be compared",
            details={"left": list(a.alphabet), "right": list(b.alphabet)},
        )
    start = (a.initial, b.initial)
    parents: dict[tuple[StateId | None, StateId | None], tuple | None] = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        left, right = pair
        if a.is_accepting(left) != b.is_accepting(right):
            return _unwind(parents, pair)
        for token in a.alphabet:
            nxt = (a.successor(left, token), b.successor(right, token))
            if nxt == (DEAD, DEAD) or nxt in parents:
                continue
            parents[nxt] = (pair, token)
            queue.append(nxt)
    return None


def _unwind(parents: dict, pair: tuple) -> str:
    tokens: list[str] = []
    while parents[pair] is not None:
        pair, token = parents[pair]
        tokens.append(token)
    return "".join(reversed(tokens))


def equivalent(a: Dfa, b: Dfa) -> bool:
    """True iff both automata recognize the same language."""
    return distinguishing_word(a, b) is None


# ============================================================================
# Enumeration
# ============================================================================


def words(alphabet: Sequence[Token], max_len: int) -> Iterator[str]:
    """All strings over ``alphabet`` of length 0..max_len, shortest first."""
    for length in range(max_len + 1):
        for letters in itertools.product(alphabet, repeat=length):
            yield "".join(letters)
