"""Deterministic automata: single-head DFAs, one-way multi-head DFAs with
a halt-on-undefined convention, the reversibility checker, and dense
matrix views of transition tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .core import ENDMARKERS, LEFT_END, RIGHT_END, OperatorTable, SymbolError

ACCEPTED = "accepted"
REJECTED = "rejected"
LIVELOCK = "livelock"


@dataclass(frozen=True)
class Dfa:
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    start: str
    accepting: frozenset[str]
    transitions: Mapping[tuple[str, str], str]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        known = set(self.states)
        if self.start not in known:
            raise ValueError(f"start state {self.start!r} is not declared")
        if not self.accepting <= known:
            raise ValueError("accepting states must be declared states")
        for q in self.states:
            for s in self.alphabet:
                if (q, s) not in self.transitions:
                    raise ValueError(f"transition map is partial: missing ({q!r}, {s!r})")
        for (q, s), q2 in self.transitions.items():
            if q not in known or q2 not in known or s not in self.alphabet:
                raise ValueError(f"transition ({q!r}, {s!r}) -> {q2!r} references unknown names")
        object.__setattr__(self, "transitions", dict(self.transitions))


def run_dfa(dfa: Dfa, word: Iterable[str]) -> bool:
    state = dfa.start
    for symbol in word:
        if symbol not in dfa.alphabet:
            raise SymbolError(f"symbol {symbol!r} not in the input alphabet")
        state = dfa.transitions[(state, symbol)]
    return state in dfa.accepting


@dataclass(frozen=True)
class MultiHeadDfa:
    """One-way deterministic automaton with k heads on a single
    endmarked tape.  The transition map is partial; the machine halts on
    an undefined read and accepts iff it halts in an accepting state."""

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    heads: int
    start: str
    accepting: frozenset[str]
    transitions: Mapping[tuple[str, tuple[str, ...]], tuple[str, tuple[int, ...]]]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        if self.heads < 1:
            raise ValueError("head count must be at least 1")
        if any(marker in self.alphabet for marker in ENDMARKERS):
            raise ValueError("endmarkers may not be declared input symbols")
        known = set(self.states)
        tape_symbols = set(self.alphabet) | set(ENDMARKERS)
        if self.start not in known or not self.accepting <= known:
            raise ValueError("start/accepting states must be declared states")
        clean = {}
        for (q, symbols), (q2, moves) in self.transitions.items():
            symbols = tuple(symbols)
            moves = tuple(int(d) for d in moves)
            if q not in known or q2 not in known:
                raise ValueError(f"transition from {q!r} to {q2!r} references unknown states")
            if len(symbols) != self.heads or len(moves) != self.heads:
                raise ValueError(f"transition ({q!r}, {symbols!r}) has wrong arity")
            if any(s not in tape_symbols for s in symbols):
                raise ValueError(f"transition symbols {symbols!r} outside the tape alphabet")
            if any(d not in (0, 1) for d in moves):
                raise ValueError("head moves must lie in {0, 1}")
            clean[(q, symbols)] = (q2, moves)
        object.__setattr__(self, "transitions", clean)


def default_step_budget(m: MultiHeadDfa, word_length: int) -> int:
    """Configuration count |Q| * (n + 2)^k; any loop revisits a
    configuration within this budget."""
    return len(m.states) * (word_length + 2) ** m.heads


def run_mhdfa(m: MultiHeadDfa, word: Iterable[str], max_steps: int | None = None) -> str:
    """Simulate on the tape ``#word$``; returns ``accepted``, ``rejected``
    or ``livelock`` (step budget exhausted)."""
    word = tuple(word)
    for symbol in word:
        if symbol not in m.alphabet:
            raise SymbolError(f"symbol {symbol!r} not in the input alphabet")
    tape = (LEFT_END, *word, RIGHT_END)
    last = len(tape) - 1
    budget = default_step_budget(m, len(word)) if max_steps is None else max_steps
    state = m.start
    heads = (0,) * m.heads
    for _ in range(budget):
        entry = m.transitions.get((state, tuple(tape[h] for h in heads)))
        if entry is None:
            return ACCEPTED if state in m.accepting else REJECTED
        state, moves = entry
        heads = tuple(min(h + d, last) for h, d in zip(heads, moves))
    return LIVELOCK


def dfa_as_multihead(dfa: Dfa) -> MultiHeadDfa:
    """View a DFA as a 1-head machine: every move is 1, the left marker is
    skipped, and the run halts (accepting iff in F) on reading ``$``."""
    transitions = {(q, (LEFT_END,)): (q, (1,)) for q in (dfa.start,)}
    for (q, s), q2 in dfa.transitions.items():
        transitions[(q, (s,))] = (q2, (1,))
    return MultiHeadDfa(
        states=dfa.states,
        alphabet=dfa.alphabet,
        heads=1,
        start=dfa.start,
        accepting=dfa.accepting,
        transitions=transitions,
    )


@dataclass(frozen=True)
class ReversibilityReport:
    """Outcome of the two reversibility conditions.

    ``move_conflicts`` lists targets entered with differing move tuples;
    ``column_conflicts`` lists (symbols, target, sources) where one target
    is reachable from several sources under the same read, i.e. a column
    of that read's 0/1 matrix has more than one entry."""

    move_conflicts: tuple[tuple[str, tuple[int, ...], tuple[int, ...]], ...]
    column_conflicts: tuple[tuple[tuple[str, ...], str, tuple[str, ...]], ...]

    @property
    def move_consistent(self) -> bool:
        return not self.move_conflicts

    @property
    def predecessor_unique(self) -> bool:
        return not self.column_conflicts

    @property
    def reversible(self) -> bool:
        return self.move_consistent and self.predecessor_unique

    def summary(self) -> str:
        if self.reversible:
            return "reversible"
        parts = []
        for target, a, b in self.move_conflicts:
            parts.append(f"target {target} entered with moves {a} and {b}")
        for symbols, target, sources in self.column_conflicts:
            parts.append(
                f"column {target} under {','.join(symbols)} has entries from {', '.join(sources)}"
            )
        return "not reversible: " + "; ".join(parts)


def check_reversible(m: MultiHeadDfa) -> ReversibilityReport:
    move_by_target: dict[str, tuple[int, ...]] = {}
    move_conflicts = []
    for (_, _), (target, moves) in sorted(m.transitions.items()):
        prior = move_by_target.setdefault(target, moves)
        if prior != moves:
            move_conflicts.append((target, prior, moves))

    by_read: dict[tuple[str, ...], dict[str, list[str]]] = {}
    for (source, symbols), (target, _) in sorted(m.transitions.items()):
        by_read.setdefault(symbols, {}).setdefault(target, []).append(source)
    column_conflicts = []
    for symbols in sorted(by_read):
        for target, sources in sorted(by_read[symbols].items()):
            if len(sources) > 1:
                column_conflicts.append((symbols, target, tuple(sorted(sources))))
    return ReversibilityReport(tuple(move_conflicts), tuple(column_conflicts))


def symbol_pair_matrix(machine: MultiHeadDfa | OperatorTable, pair: tuple[str, ...]) -> np.ndarray:
    """Dense transition matrix for one read; rows are source states,
    columns target states, in declared state order.  Classical machines
    yield 0/1 entries; undefined rows render as zero rows."""
    if isinstance(machine, OperatorTable):
        return machine.pair_matrix((pair[0], pair[1]))
    pair = tuple(pair)
    if len(pair) != machine.heads:
        raise ValueError(f"expected a {machine.heads}-symbol read, got {pair!r}")
    index = {q: i for i, q in enumerate(machine.states)}
    n = len(machine.states)
    out = np.zeros((n, n))
    for (source, symbols), (target, _) in machine.transitions.items():
        if symbols == pair:
            out[index[source], index[target]] = 1.0
    return out
