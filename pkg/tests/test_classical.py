import itertools

import numpy as np
import pytest

from qfasim.classical import (
    ACCEPTED,
    LIVELOCK,
    REJECTED,
    Dfa,
    MultiHeadDfa,
    check_reversible,
    dfa_as_multihead,
    run_dfa,
    run_mhdfa,
    symbol_pair_matrix,
)
from qfasim.core import SymbolError
from qfasim.examples import build_example

from helpers import random_multihead


@pytest.fixture
def even_a():
    return build_example("even-a-dfa").machine


def test_run_dfa(even_a):
    assert run_dfa(even_a, "aa") is True
    assert run_dfa(even_a, "a") is False
    assert run_dfa(even_a, "") is True


def test_run_dfa_rejects_foreign_symbol(even_a):
    with pytest.raises(SymbolError):
        run_dfa(even_a, "ab")


def test_dfa_requires_total_transitions():
    with pytest.raises(ValueError):
        Dfa(
            states=("q0", "q1"),
            alphabet=("a",),
            start="q0",
            accepting=frozenset({"q0"}),
            transitions={("q0", "a"): "q1"},
        )


def test_run_mhdfa_on_reconstruction():
    m = build_example("anbn-dfa2").machine
    assert run_mhdfa(m, "aabb") == ACCEPTED
    assert run_mhdfa(m, "ab") == ACCEPTED
    assert run_mhdfa(m, "aab") == REJECTED
    assert run_mhdfa(m, "") == REJECTED


def test_run_mhdfa_on_three_symbol_machine():
    m = build_example("anbncn-rev2").machine
    assert run_mhdfa(m, "aabbcc") == ACCEPTED
    assert run_mhdfa(m, "aabbc") == REJECTED


def test_run_mhdfa_reports_livelock():
    m = MultiHeadDfa(
        states=("q0",),
        alphabet=("a",),
        heads=1,
        start="q0",
        accepting=frozenset(),
        transitions={("q0", ("#",)): ("q0", (0,))},
    )
    assert run_mhdfa(m, "a") == LIVELOCK


def test_check_reversible_passes_on_reversible_machine():
    report = check_reversible(build_example("anbncn-rev2").machine)
    assert report.reversible
    assert report.summary() == "reversible"


def test_check_reversible_column_conflict_witness():
    report = check_reversible(build_example("anbn-dfa2-printed").machine)
    assert not report.reversible
    assert report.move_consistent
    symbols, target, sources = report.column_conflicts[0]
    assert symbols == ("b", "a")
    assert target == "q1"
    assert sources == ("q0", "q1")


def test_check_reversible_move_conflict():
    m = MultiHeadDfa(
        states=("q0", "q1"),
        alphabet=("a",),
        heads=2,
        start="q0",
        accepting=frozenset({"q1"}),
        transitions={
            ("q0", ("#", "#")): ("q1", (1, 1)),
            ("q0", ("a", "a")): ("q1", (0, 1)),
        },
    )
    report = check_reversible(m)
    assert not report.move_consistent


def test_single_transition_machine_is_reversible():
    m = MultiHeadDfa(
        states=("q0",),
        alphabet=("a",),
        heads=2,
        start="q0",
        accepting=frozenset({"q0"}),
        transitions={("q0", ("#", "#")): ("q0", (1, 1))},
    )
    assert check_reversible(m).reversible


def test_symbol_pair_matrix_figure_entries():
    printed = build_example("anbn-dfa2-printed").machine
    np.testing.assert_array_equal(
        symbol_pair_matrix(printed, ("b", "a")),
        np.array([[0, 1, 0], [0, 1, 0], [0, 0, 0]]),
    )
    fig3 = build_example("anbncn-rev2").machine
    m = symbol_pair_matrix(fig3, ("$", "$"))
    assert m[3, 4] == 1.0 and m.sum() == 1.0
    table = build_example("anbncn-2t1qfa").machine.table
    m = symbol_pair_matrix(table, ("#", "#"))
    assert m[0, 0] == 1.0 and abs(m).sum() == 1.0


def test_symbol_pair_matrix_checks_arity():
    with pytest.raises(ValueError):
        symbol_pair_matrix(build_example("anbncn-rev2").machine, ("a",))


def test_reversibility_matrix_formulation_agrees():
    # matrix reading: rows pairwise orthogonal per read <=> at most one
    # entry per column (0/1 matrices); checked on 1000 random machines
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        m = random_multihead(rng)
        reads = {symbols for _, symbols in m.transitions}
        matrix_unique = all(
            (symbol_pair_matrix(m, read).sum(axis=0) <= 1).all() for read in reads
        )
        assert matrix_unique == check_reversible(m).predecessor_unique


def test_reversible_machine_steps_injectively():
    # forward enumeration: no two distinct reachable configurations of a
    # reversible machine step to the same configuration
    m = build_example("anbncn-rev2").machine
    for word in ["abc", "aabbcc", "abcc", "ab"]:
        tape = ("#", *word, "$")
        last = len(tape) - 1
        seen = {}
        frontier = [(m.start, 0, 0)]
        visited = set(frontier)
        while frontier:
            state, h1, h2 = frontier.pop()
            entry = m.transitions.get((state, (tape[h1], tape[h2])))
            if entry is None:
                continue
            target, moves = entry
            nxt = (target, min(h1 + moves[0], last), min(h2 + moves[1], last))
            source = (state, h1, h2)
            assert seen.setdefault(nxt, source) == source
            if nxt not in visited:
                visited.add(nxt)
                frontier.append(nxt)


def test_dfa_lift_to_single_head_agrees():
    for name in ("even-a-dfa", "ends-b-dfa", "mod3-a-dfa"):
        dfa = build_example(name).machine
        lifted = dfa_as_multihead(dfa)
        for length in range(0, 9):
            for word in itertools.product(dfa.alphabet, repeat=length):
                expected = ACCEPTED if run_dfa(dfa, word) else REJECTED
                assert run_mhdfa(lifted, word) == expected
