import math

import numpy as np
import pytest

from qfasim.core import Superposition, SymbolError
from qfasim.examples import build_example
from qfasim.quantum import (
    TWO_HEAD,
    MeasureManyQfa,
    TapeCompatibilityError,
    TwoTapeQfa,
    run_mm1qfa,
    run_twotape,
    step_twotape,
    validate_automaton,
)

from helpers import random_twotape_machine, step_image

R2 = 1 / math.sqrt(2)


def _mm(operators, accepting=(), rejecting=(), states=("q0", "q_acc", "q_rej")):
    return MeasureManyQfa(
        states=states,
        alphabet=("a",),
        start="q0",
        accepting=frozenset(accepting),
        rejecting=frozenset(rejecting),
        operators=operators,
    )


def test_mm1qfa_accepts_on_endmarker():
    m = _mm(
        {
            "#": {"q0": (("q0", 1.0),)},
            "a": {"q0": (("q0", 1.0),)},
            "$": {"q0": (("q_acc", 1.0),)},
        },
        accepting=("q_acc",),
        rejecting=("q_rej",),
    )
    result = run_mm1qfa(m, "a")
    assert result.p_acc == pytest.approx(1.0)
    assert result.p_rej == pytest.approx(0.0)
    assert result.steps == 3


def test_mm1qfa_splits_mass():
    m = _mm(
        {
            "#": {"q0": (("q0", 1.0),)},
            "a": {"q0": (("q_acc", R2), ("q_rej", R2))},
            "$": {},
        },
        accepting=("q_acc",),
        rejecting=("q_rej",),
    )
    result = run_mm1qfa(m, "a")
    assert result.p_acc == pytest.approx(0.5)
    assert result.p_rej == pytest.approx(0.5)


def test_mm1qfa_rotation_by_45_degrees():
    # oracle: explicit 2x2 matrix product
    theta = math.pi / 4
    rot = np.array(
        [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
    )
    word = "aa"
    vec = np.array([1.0, 0.0])
    for _ in word:
        vec = rot @ vec
    expected_acc = vec[0] ** 2

    m = MeasureManyQfa(
        states=("q0", "q1", "q_acc", "q_rej"),
        alphabet=("a",),
        start="q0",
        accepting=frozenset({"q_acc"}),
        rejecting=frozenset({"q_rej"}),
        operators={
            "#": {"q0": (("q0", 1.0),), "q1": (("q1", 1.0),)},
            "a": {
                "q0": (("q0", rot[0, 0]), ("q1", rot[1, 0])),
                "q1": (("q0", rot[0, 1]), ("q1", rot[1, 1])),
            },
            "$": {"q0": (("q_acc", 1.0),), "q1": (("q_rej", 1.0),)},
        },
    )
    result = run_mm1qfa(m, word)
    assert result.p_acc == pytest.approx(expected_acc, abs=1e-12)
    assert result.p_acc == pytest.approx(0.0, abs=1e-12)  # cos^2(90 deg)
    assert result.p_rej == pytest.approx(1.0, abs=1e-12)


def test_mm1qfa_step_count_invariant():
    m = _mm(
        {
            "#": {"q0": (("q0", 1.0),)},
            "a": {"q0": (("q0", 1.0),)},
            "$": {"q0": (("q_acc", 1.0),)},
        },
        accepting=("q_acc",),
    )
    for word in ["", "a", "aaaa"]:
        assert run_mm1qfa(m, word).steps == len(word) + 2


def test_mm1qfa_rejects_foreign_symbols():
    m = _mm({"#": {}, "a": {}, "$": {}})
    with pytest.raises(SymbolError):
        run_mm1qfa(m, "b")


# --------------------------------------------------------------------------
# two-tape stepping

def test_step_twotape_first_move_of_anbncn():
    m = build_example("anbncn-2t1qfa").machine
    tapes = (("#", "a", "b", "c", "$"), ("#", "a", "b", "c", "$"))
    psi, acc, rej, sink = step_twotape(m, tapes, Superposition.basis(("q0", 0, 0)))
    assert dict(psi.items()) == {("q0", 0, 1): 1.0 + 0j}
    assert (acc, rej, sink) == (0.0, 0.0, 0.0)


def test_step_twotape_branches_with_equal_amplitude():
    m = build_example("ww").machine
    tapes = (("#", "a", "a", "$"), ("#", "m", "a", "$"))
    psi, acc, rej, sink = step_twotape(m, tapes, Superposition.basis(("q0", 0, 1)))
    assert psi[("q1", 0, 1)] == pytest.approx(R2)
    assert psi[("q2", 0, 1)] == pytest.approx(R2)
    assert (acc, rej, sink) == (0.0, 0.0, 0.0)


def test_step_twotape_sink_semantics():
    m = build_example("anbncn-2t1qfa").machine
    tapes = (("#", "a", "$"), ("#", "a", "$"))
    # q3 has no row under (#, #)
    psi, acc, rej, sink = step_twotape(m, tapes, Superposition.basis(("q3", 0, 0)))
    assert len(psi) == 0
    assert sink == pytest.approx(1.0)


def test_step_twotape_validates_tapes():
    m = build_example("anbncn-2t1qfa").machine
    with pytest.raises(ValueError):
        step_twotape(m, (("a",), ("#", "$")), Superposition.basis(("q0", 0, 0)))


def test_run_twotape_accepts_and_rejects():
    m = build_example("anbncn-2t1qfa").machine
    assert run_twotape(m, "abc", "abc").p_acc == pytest.approx(1.0)
    assert run_twotape(m, "abbc", "abbc").p_rej == pytest.approx(1.0)


def test_run_twotape_checks_relation_compatibility():
    m = build_example("ww").machine
    with pytest.raises(TapeCompatibilityError):
        run_twotape(m, "aa", "bb")
    with pytest.raises(TapeCompatibilityError):
        run_twotape(m, "aa", "a")
    with pytest.raises(SymbolError):
        run_twotape(m, "az", "am")


def test_run_twotape_forces_unique_tape_under_identity():
    m = build_example("anbncn-2t1qfa").machine
    assert run_twotape(m, "abc").p_acc == pytest.approx(1.0)


def test_run_twotape_livelock_diagnostic():
    # one state that never moves and never halts
    from qfasim.core import OperatorTable, SymbolRelation

    table = OperatorTable(
        states=("q0",),
        alphabet1=("a",),
        alphabet2=("a",),
        rows={("#", "#"): {"q0": (("q0", 1.0),)}},
        moves={"q0": (0, 0)},
    )
    m = TwoTapeQfa(
        states=("q0",),
        input_alphabet=("a",),
        tape2_alphabet=("a",),
        start="q0",
        accepting=frozenset(),
        rejecting=frozenset(),
        table=table,
        relation=SymbolRelation.identity(("a",)),
    )
    result = run_twotape(m, "a", "a")
    assert result.livelocked
    assert result.p_live == pytest.approx(1.0)
    assert result.steps == 1 * 3 * 3


def test_two_head_mode_matches_two_tape_identity():
    entry = build_example("anbncn-2t1qfa").machine
    twohead = TwoTapeQfa(
        states=entry.states,
        input_alphabet=entry.input_alphabet,
        tape2_alphabet=entry.tape2_alphabet,
        start=entry.start,
        accepting=entry.accepting,
        rejecting=entry.rejecting,
        table=entry.table,
        relation=entry.relation,
        mode=TWO_HEAD,
    )
    for word in ["abc", "aabbcc", "abca", "bca", ""]:
        lhs = run_twotape(entry, word, word, trace=True)
        rhs = run_twotape(twohead, word, trace=True)
        assert lhs.steps == rhs.steps
        assert lhs.p_acc == rhs.p_acc and lhs.p_rej == rhs.p_rej
        for a, b in zip(lhs.trace, rhs.trace):
            assert a.state.sorted_items() == b.state.sorted_items()
            assert (a.acc_mass, a.rej_mass, a.sink_mass) == (
                b.acc_mass,
                b.rej_mass,
                b.sink_mass,
            )


def test_compiled_machines_keep_single_live_configuration():
    from qfasim.compiler import compile_dfa

    machine = compile_dfa(build_example("ends-b-dfa").machine)
    result = run_twotape(machine, "ab", ("a_1", "b_1"), trace=True)
    for record in result.trace:
        assert len(record.state) <= 1


def test_probability_conservation_on_random_machines():
    rng = np.random.default_rng(5)
    for _ in range(40):
        m = random_twotape_machine(rng)
        length = int(rng.integers(0, 4))
        word = tuple(rng.choice(("a", "b")) for _ in range(length))
        result = run_twotape(m, word, word, max_steps=12, trace=True)
        running = 0.0
        for record in result.trace:
            running += record.acc_mass + record.rej_mass + record.sink_mass
            assert running + record.state.norm2() == pytest.approx(1.0, abs=1e-9)


def test_stepped_basis_orthogonality_on_random_machines():
    # distinct basis configurations step to orthogonal images; the
    # generator's boundary discipline keeps this true at $ as well
    rng = np.random.default_rng(6)
    for _ in range(30):
        m = random_twotape_machine(rng)
        word = tuple(rng.choice(("a", "b")) for _ in range(int(rng.integers(0, 4))))
        tape = ("#", *word, "$")
        non_halting = [q for q in m.states if q not in m.accepting | m.rejecting]
        configs = [
            (q, h1, h2)
            for q in non_halting
            for h1 in range(len(tape))
            for h2 in range(len(tape))
        ]
        images = [step_image(m, tape, tape, c) for c in configs]
        coords = sorted({key for img in images for key in img}, key=str)
        index = {key: i for i, key in enumerate(coords)}
        matrix = np.zeros((len(images), len(coords)), dtype=complex)
        for i, img in enumerate(images):
            for key, amp in img.items():
                matrix[i, index[key]] = amp
        gram = matrix.conj() @ matrix.T
        assert np.max(np.abs(gram - np.eye(len(images)))) <= 1e-9


def test_predecessor_positions_reconstruct():
    m = build_example("anbncn-2t1qfa").machine
    word = "aabbcc"
    result = run_twotape(m, word, word, trace=True)
    tape_len = len(word) + 2
    prev = {(q, 0, 0) for q in ("q0",)}
    for record in result.trace:
        for (state, h1, h2) in record.state.labels():
            d1, d2 = m.table.moves[state]
            src = (h1 - d1, h2 - d2)
            assert any((p1, p2) == src for (_, p1, p2) in prev) or h1 == tape_len - 1 or h2 == tape_len - 1
        prev = set(record.state.labels())


# --------------------------------------------------------------------------
# validation

def test_validate_passes_registry_machine():
    report = validate_automaton(build_example("anbncn-2t1qfa").machine)
    assert report.passed


def test_validate_flags_norm_violation():
    from qfasim.core import OperatorTable, SymbolRelation

    table = OperatorTable(
        states=("q0", "q1"),
        alphabet1=("a",),
        alphabet2=("a",),
        rows={("a", "a"): {"q0": (("q0", 1.0), ("q1", 1.0))}},
        moves={"q0": (1, 1), "q1": (1, 1)},
    )
    m = TwoTapeQfa(
        states=("q0", "q1"),
        input_alphabet=("a",),
        tape2_alphabet=("a",),
        start="q0",
        accepting=frozenset(),
        rejecting=frozenset(),
        table=table,
        relation=SymbolRelation.identity(("a",)),
    )
    report = validate_automaton(m)
    assert not report.passed
    failing = [c for c in report.checks if not c.passed]
    assert any("('a', 'a')" in c.detail for c in failing)


def test_validate_flags_moving_halting_state():
    from qfasim.core import OperatorTable, SymbolRelation

    table = OperatorTable(
        states=("q0", "q_acc"),
        alphabet1=("a",),
        alphabet2=("a",),
        rows={("$", "$"): {"q0": (("q_acc", 1.0),)}},
        moves={"q0": (1, 1), "q_acc": (1, 0)},
    )
    m = TwoTapeQfa(
        states=("q0", "q_acc"),
        input_alphabet=("a",),
        tape2_alphabet=("a",),
        start="q0",
        accepting=frozenset({"q_acc"}),
        rejecting=frozenset(),
        table=table,
        relation=SymbolRelation.identity(("a",)),
    )
    report = validate_automaton(m)
    assert not report.passed


def test_validate_compiler_output():
    from qfasim.compiler import compile_dfa

    for name in ("even-a-dfa", "ends-b-dfa", "mod3-a-dfa"):
        machine = compile_dfa(build_example(name).machine)
        assert validate_automaton(machine).passed
