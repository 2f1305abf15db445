"""
Automaton repository: DFA/NFA text format and DOT export.

DFA documents look like::

    # statemerge-dfa v1
    alphabet: a b
    states: 0 1
    initial: 0
    accepting: 0
    transition: 0 a 1
    transition: 1 b 0

NFA documents use the header ``# statemerge-nfa v1`` and may repeat a
(source, token) pair with different targets.
"""

import logging
from pathlib import Path

from core.exceptions import FileFormatError
from models import Dfa, Nfa, StateId, Token
from .base import BaseRepository, format_header, split_field

logger = logging.getLogger(__name__)

Automaton = Dfa | Nfa

_DFA = "dfa"
_NFA = "nfa"


def _edges(machine: Automaton) -> list[tuple[StateId, Token, StateId]]:
    """Transitions as sorted (src, token, dst) triples, tokens in alphabet order."""
    order = {token: i for i, token in enumerate(machine.alphabet)}
    if isinstance(machine, Dfa):
        triples = [(src, token, dst) for (src, token), dst in machine.transitions.items()]
    else:
        triples = [
            (src, token, dst)
            for (src, token), targets in machine.transitions.items()
            for dst in targets
        ]
    return sorted(triples, key=lambda edge: (edge[0], order[edge[1]], edge[2]))


class AutomatonRepository(BaseRepository[Automaton]):
    """Stores DFA (``.dfa``) and NFA (``.nfa``) documents."""

    kind = _DFA
    suffix = ".dfa"

    def header_for(self, document: Automaton) -> str:
        return format_header(_NFA if isinstance(document, Nfa) else _DFA, self.version)

    def parse_header(self, line: str, source: str) -> str:
        for kind in (_DFA, _NFA):
            if line.strip() == format_header(kind, self.version):
                return kind
        raise FileFormatError(
            f"{source}: not a statemerge automaton document ({line.strip()!r})",
            details={"source": source},
        )

    def path_for(self, name: str) -> Path:
        path = self.root / name
        if path.suffix in (".dfa", ".nfa"):
            return path
        return path.with_name(path.name + self.suffix)

    def serialize(self, document: Automaton) -> list[str]:
        lines = [
            f"alphabet: {' '.join(document.alphabet)}",
            f"states: {' '.join(str(q) for q in sorted(document.states))}",
            f"initial: {document.initial}",
            f"accepting: {' '.join(str(q) for q in sorted(document.accepting))}",
        ]
        lines.extend(f"transition: {src} {token} {dst}" for src, token, dst in _edges(document))
        return lines

    def parse(self, kind: str, lines: list[str], source: str) -> Automaton:
        body = [line for line in lines if line.strip() and not line.startswith("#")]
        if len(body) < 4:
            raise FileFormatError(
                f"{source}: automaton document is truncated", details={"source": source}
            )
        alphabet = tuple(split_field(body[0], "alphabet", source).split())
        states = frozenset(int(q) for q in split_field(body[1], "states", source).split())
        initial = int(split_field(body[2], "initial", source))
        accepting = frozenset(
            int(q) for q in split_field(body[3], "accepting", source).split()
        )

        multi: dict[tuple[StateId, Token], set[StateId]] = {}
        for line in body[4:]:
            parts = split_field(line, "transition", source).split()
            if len(parts) != 3:
                raise FileFormatError(
                    f"{source}: malformed transition {line!r}", details={"source": source}
                )
            src, token, dst = int(parts[0]), parts[1], int(parts[2])
            multi.setdefault((src, token), set()).add(dst)

        if kind == _NFA:
            return Nfa(
                alphabet=alphabet,
                states=states,
                initial=initial,
                transitions=multi,
                accepting=accepting,
            )
        if any(len(targets) > 1 for targets in multi.values()):
            raise FileFormatError(
                f"{source}: DFA document has a nondeterministic transition",
                details={"source": source},
            )
        return Dfa(
            alphabet=alphabet,
            states=states,
            initial=initial,
            transitions={key: next(iter(targets)) for key, targets in multi.items()},
            accepting=accepting,
        )

    # ------------------------------------------------------------------------
    # DOT
    # ------------------------------------------------------------------------

    def save_dot(self, document: Automaton, name: str, title: str | None = None) -> Path:
        """Write a Graphviz rendering next to the machine files."""
        path = self.root / (name if name.endswith(".dot") else f"{name}.dot")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(to_dot(document, title), encoding="utf-8")
        return path


def to_dot(machine: Automaton, title: str | None = None) -> str:
    """
    Graphviz rendering of an automaton.

    Accepting states are double circles and an invisible ``__start`` node points
    at the initial state. Output is deterministic: states in numeric order,
    edges sorted by source, token and target.
    """
    name = title or "automaton"
    lines = [
        f'digraph "{name}" {{',
        "  rankdir=LR;",
        '  __start [shape=point, label=""];',
    ]
    for state in sorted(machine.states):
        shape = "doublecircle" if state in machine.accepting else "circle"
        lines.append(f'  {state} [shape={shape}, label="{state}"];')
    lines.append(f"  __start -> {machine.initial};")
    for src, token, dst in _edges(machine):
        lines.append(f'  {src} -> {dst} [label="{token}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
