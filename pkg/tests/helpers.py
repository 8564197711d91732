"""Shared builders for the test suite: random well-formed machines and
independent re-implementations used as oracles."""

from __future__ import annotations

import itertools
import re

import numpy as np

from qfasim.classical import MultiHeadDfa
from qfasim.core import LEFT_END, RIGHT_END, OperatorTable, SymbolRelation
from qfasim.quantum import TWO_TAPE, TwoTapeQfa


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    # fix the QR phase ambiguity so the result is a clean Haar sample
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_partial_table(
    rng: np.random.Generator,
    n_states: int = 4,
    symbols: tuple[str, ...] = ("a", "b"),
    pair_fraction: float = 0.7,
) -> OperatorTable:
    """Rows drawn from exact unitaries, with a random subset of sources
    kept per pair, so the Gram condition holds to machine precision."""
    states = tuple(f"q{i}" for i in range(n_states))
    gamma = symbols + (LEFT_END, RIGHT_END)
    rows = {}
    for pair in itertools.product(gamma, gamma):
        if rng.random() > pair_fraction:
            continue
        u = random_unitary(rng, n_states)
        kept = [i for i in range(n_states) if rng.random() < 0.8]
        if not kept:
            kept = [int(rng.integers(n_states))]
        rows[pair] = {
            states[j]: tuple(
                (states[i], complex(u[i, j]))
                for i in range(n_states)
                if abs(u[i, j]) > 1e-14
            )
            for j in kept
        }
    moves = {q: (int(rng.integers(2)), int(rng.integers(2))) for q in states}
    return OperatorTable(
        states=states, alphabet1=symbols, alphabet2=symbols, rows=rows, moves=moves
    )


def random_twotape_machine(
    rng: np.random.Generator,
    n_states: int = 3,
    symbols: tuple[str, ...] = ("a", "b"),
) -> TwoTapeQfa:
    """Random machine with the boundary discipline of the hand-built
    ones: a read on $ only targets states that keep that head still, so
    heads never push past the endmarker and evolution stays injective."""
    states = tuple(f"q{i}" for i in range(n_states))
    shuffled = list(states)
    rng.shuffle(shuffled)
    n_acc = int(rng.integers(0, 2))
    n_rej = int(rng.integers(0, 2))
    accepting = frozenset(shuffled[:n_acc])
    rejecting = frozenset(shuffled[n_acc : n_acc + n_rej])
    non_halting = [q for q in states if q not in accepting and q not in rejecting]
    moves = {q: (int(rng.integers(2)), int(rng.integers(2))) for q in states}
    for q in accepting | rejecting:
        moves[q] = (0, 0)

    gamma = symbols + (LEFT_END, RIGHT_END)
    rows = {}
    for pair in itertools.product(gamma, gamma):
        if rng.random() > 0.85:
            continue
        targets = [
            q
            for q in states
            if not (pair[0] == RIGHT_END and moves[q][0] == 1)
            and not (pair[1] == RIGHT_END and moves[q][1] == 1)
        ]
        if not targets:
            continue
        u = random_unitary(rng, len(targets))
        sources = [q for q in states if rng.random() < 0.8][: len(targets)]
        if not sources:
            sources = [states[int(rng.integers(n_states))]]
        rows[pair] = {
            src: tuple(
                (targets[i], complex(u[i, j]))
                for i in range(len(targets))
                if abs(u[i, j]) > 1e-14
            )
            for j, src in enumerate(sources)
        }
    table = OperatorTable(
        states=states, alphabet1=symbols, alphabet2=symbols, rows=rows, moves=moves
    )
    return TwoTapeQfa(
        states=states,
        input_alphabet=symbols,
        tape2_alphabet=symbols,
        start=non_halting[0],
        accepting=accepting,
        rejecting=rejecting,
        table=table,
        relation=SymbolRelation.identity(symbols),
        mode=TWO_TAPE,
    )


def random_multihead(rng: np.random.Generator, n_states: int = 3) -> MultiHeadDfa:
    states = tuple(f"q{i}" for i in range(n_states))
    symbols = ("a", "b")
    gamma = symbols + (LEFT_END, RIGHT_END)
    transitions = {}
    for q in states:
        for read in itertools.product(gamma, gamma):
            if rng.random() < 0.3:
                target = states[int(rng.integers(n_states))]
                moves = (int(rng.integers(2)), int(rng.integers(2)))
                transitions[(q, read)] = (target, moves)
    if not transitions:
        transitions[(states[0], (LEFT_END, LEFT_END))] = (states[0], (0, 1))
    return MultiHeadDfa(
        states=states,
        alphabet=symbols,
        heads=2,
        start=states[0],
        accepting=frozenset({states[-1]}),
        transitions=transitions,
    )


# --------------------------------------------------------------------------
# independent oracles (deliberately different mechanisms from the package)

def ww_by_splitting(word: tuple[str, ...]) -> bool:
    """Quadratic splitter: does any split point give two equal halves?"""
    return any(
        word[:k] == word[k:] and 2 * k == len(word) for k in range(len(word) + 1)
    )


_BLOCK = re.compile(r"[ab]*\*[ab]*")


def percent_by_regex(text: str) -> bool:
    """Regex block structure plus an explicit double loop over pairs."""
    if not text.startswith("%"):
        return False
    chunks = text.split("%")[1:]
    if any(_BLOCK.fullmatch(chunk) is None or chunk.count("*") != 1 for chunk in chunks):
        return False
    parsed = [chunk.split("*") for chunk in chunks]
    for i in range(len(parsed)):
        for j in range(len(parsed)):
            if i != j and parsed[i][0] == parsed[j][0] and parsed[i][1] != parsed[j][1]:
                return True
    return False


def wellformed_percent_words(max_len: int):
    """All words %B1%B2...%Bk (k >= 1) up to max_len whose blocks each
    hold exactly one * and otherwise letters a/b."""
    blocks_by_len: dict[int, list[str]] = {}
    for length in range(1, max_len):
        blocks = []
        for star in range(length):
            for letters in itertools.product("ab", repeat=length - 1):
                blocks.append(
                    "".join(letters[:star]) + "*" + "".join(letters[star:])
                )
        blocks_by_len[length] = blocks

    def extend(prefix: str, remaining: int):
        for length, blocks in blocks_by_len.items():
            if length + 1 > remaining:
                continue
            for block in blocks:
                word = prefix + "%" + block
                yield word
                yield from extend(word, remaining - length - 1)

    yield from extend("", max_len)


def step_image(machine: TwoTapeQfa, tape1, tape2, config):
    """Independent single-configuration step: the image of one basis
    configuration as a dict, with undefined rows mapped to a sink
    coordinate unique to the source."""
    state, h1, h2 = config
    rows = machine.table.rows.get((tape1[h1], tape2[h2]))
    row = rows.get(state) if rows else None
    if row is None:
        return {("sink", config): 1.0 + 0j}
    image = {}
    last1 = len(tape1) - 1
    last2 = len(tape2) - 1
    for target, amp in row:
        d1, d2 = machine.table.moves[target]
        key = (target, min(h1 + d1, last1), min(h2 + d2, last2))
        image[key] = image.get(key, 0j) + amp
    return image
