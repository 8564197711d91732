"""Build two-tape quantum machines from classical ones.

``compile_dfa`` moves a DFA's determinism onto the guess tape: every
transition gets a numbered tape-2 symbol, and a guess tape spelling out
an accepting transition sequence drives the quantum machine to its
accepting state with probability 1.  ``lift_rmfa`` reinterprets a
reversible two-head machine's 0/1 transition matrices as quantum
operators unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .classical import Dfa, MultiHeadDfa, check_reversible
from .core import (
    LEFT_END,
    RIGHT_END,
    OperatorTable,
    SymbolRelation,
    WellFormednessError,
)
from .quantum import TWO_HEAD, TWO_TAPE, TwoTapeQfa


@dataclass(frozen=True)
class TransitionNumbering:
    """Per input symbol, the DFA's transitions on that symbol in a fixed
    order (lexicographic by source-state index), and the derived tape-2
    labels ``p_1 .. p_n``."""

    per_symbol: Mapping[str, tuple[tuple[str, str], ...]]

    def label(self, symbol: str, position: int) -> str:
        return f"{symbol}_{position + 1}"

    def labels(self, symbol: str) -> tuple[str, ...]:
        return tuple(self.label(symbol, k) for k in range(len(self.per_symbol[symbol])))

    def entries(self):
        """Yields (symbol, label, source, target) for every transition."""
        for symbol, transitions in self.per_symbol.items():
            for k, (source, target) in enumerate(transitions):
                yield symbol, self.label(symbol, k), source, target


def number_transitions(dfa: Dfa) -> TransitionNumbering:
    order = {q: i for i, q in enumerate(dfa.states)}
    per_symbol = {}
    for symbol in dfa.alphabet:
        transitions = sorted(
            ((q, dfa.transitions[(q, symbol)]) for q in dfa.states),
            key=lambda qt: order[qt[0]],
        )
        per_symbol[symbol] = tuple(transitions)
    return TransitionNumbering(per_symbol)


def _fresh_name(base: str, taken: set[str]) -> str:
    name = base
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def compile_dfa(dfa: Dfa) -> TwoTapeQfa:
    """Two-tape machine accepting exactly the DFA's language under
    existential guessing.

    The guess tape must spell out transition numbers: the relation pairs
    each input symbol p with its labels p_1..p_n only, so every
    compatible tape picks one transition per position.  A correct guess
    walks the DFA deterministically and is collapsed to the accepting
    state on the ($, $) read; every wrong guess dies in the sink.

    The ($, $) block maps every DFA-accepting state to the one accepting
    state, so machines with more than one accepting state fail the static
    orthonormality check even though each run stays norm-preserving.
    """
    numbering = number_transitions(dfa)
    taken = set(dfa.states)
    start = _fresh_name("q0'", taken)
    accept = _fresh_name("q_acc", taken)
    states = (start, *dfa.states, accept)

    labels = [label for symbol in dfa.alphabet for label in numbering.labels(symbol)]
    tape2_alphabet = tuple(dfa.alphabet) + tuple(labels)
    relation = SymbolRelation(
        tuple(
            (symbol, numbering.label(symbol, k))
            for symbol in dfa.alphabet
            for k in range(len(numbering.per_symbol[symbol]))
        )
    )

    rows: dict[tuple[str, str], dict[str, tuple[tuple[str, complex], ...]]] = {
        (LEFT_END, LEFT_END): {start: ((dfa.start, 1.0 + 0j),)},
    }
    for symbol, label, source, target in numbering.entries():
        rows.setdefault((symbol, label), {})[source] = ((target, 1.0 + 0j),)
    if dfa.accepting:
        rows[(RIGHT_END, RIGHT_END)] = {
            q: ((accept, 1.0 + 0j),) for q in dfa.states if q in dfa.accepting
        }

    moves = {q: (1, 1) for q in states}
    moves[accept] = (0, 0)
    table = OperatorTable(
        states=states,
        alphabet1=tuple(dfa.alphabet),
        alphabet2=tape2_alphabet,
        rows=rows,
        moves=moves,
    )
    return TwoTapeQfa(
        states=states,
        input_alphabet=tuple(dfa.alphabet),
        tape2_alphabet=tape2_alphabet,
        start=start,
        accepting=frozenset({accept}),
        rejecting=frozenset(),
        table=table,
        relation=relation,
        mode=TWO_TAPE,
    )


def lift_rmfa(m: MultiHeadDfa) -> TwoTapeQfa:
    """Reinterpret a reversible 2-head machine as a two-head quantum
    machine with the identical 0/1 operator entries.

    Head moves become a function of the target state, which is exactly
    what the move-consistency half of reversibility guarantees; the
    predecessor-uniqueness half makes every symbol-pair matrix
    orthonormal.  Accepting states are measured on arrival, so machines
    that keep computing out of an accepting state would disagree with
    their classical run.
    """
    if m.heads != 2:
        raise ValueError(f"only 2-head machines can be lifted (got {m.heads} heads)")
    report = check_reversible(m)
    if not report.reversible:
        raise WellFormednessError(
            f"machine is not reversible; orthonormality would fail ({report.summary()})"
        )
    rows: dict[tuple[str, str], dict[str, tuple[tuple[str, complex], ...]]] = {}
    moves = {q: (0, 0) for q in m.states}
    for (source, symbols), (target, move) in sorted(m.transitions.items()):
        rows.setdefault((symbols[0], symbols[1]), {})[source] = ((target, 1.0 + 0j),)
        moves[target] = (move[0], move[1])
    table = OperatorTable(
        states=m.states,
        alphabet1=tuple(m.alphabet),
        alphabet2=tuple(m.alphabet),
        rows=rows,
        moves=moves,
    )
    return TwoTapeQfa(
        states=m.states,
        input_alphabet=tuple(m.alphabet),
        tape2_alphabet=tuple(m.alphabet),
        start=m.start,
        accepting=m.accepting,
        rejecting=frozenset(),
        table=table,
        relation=SymbolRelation.identity(m.alphabet),
        mode=TWO_HEAD,
    )
