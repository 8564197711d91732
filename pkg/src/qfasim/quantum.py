"""Quantum evolution engines.

Two simulators share this module: a measure-many single-head automaton
(state superpositions, one operator per tape symbol) and a two-tape
machine whose quantum state is a superposition over (state, head, head)
configurations.  A machine flagged as two-head runs the same engine with
both heads on one tape.

Measurement is performed after every operator application: amplitude on
accepting/rejecting states is converted to probability and removed.
Undefined rows route their mass to an absorbing reject sink.  Machines
are immutable; every run owns its superposition, so runs are independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .core import (
    LEFT_END,
    RIGHT_END,
    OperatorTable,
    Row,
    Superposition,
    SymbolError,
    SymbolRelation,
    check_gram_wellformed,
)

TWO_TAPE = "two-tape"
TWO_HEAD = "two-head"

#: a run stops once its live mass falls below this
LIVE_CUTOFF = 1e-12

#: configuration label: (state, head-1 position, head-2 position)
Config = tuple[str, int, int]


class TapeCompatibilityError(ValueError):
    """The two tape words cannot face each other under the relation."""


def _abs2(amp: complex) -> float:
    return amp.real * amp.real + amp.imag * amp.imag


@dataclass(frozen=True)
class StepRecord:
    step: int
    state: Superposition
    acc_mass: float
    rej_mass: float
    sink_mass: float


@dataclass(frozen=True)
class RunResult:
    """Accumulated observation outcomes of one run.

    ``p_rej`` includes sink mass.  ``p_live`` is whatever squared norm was
    still unmeasured when the run stopped; ``livelocked`` flags a stop
    caused by the step budget rather than exhaustion of live mass."""

    p_acc: float
    p_rej: float
    p_live: float
    steps: int
    livelocked: bool = False
    trace: tuple[StepRecord, ...] | None = None


@dataclass(frozen=True)
class MeasureManyQfa:
    """Single-head machine observed after every symbol; reads #, the
    input word, then $."""

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    start: str
    accepting: frozenset[str]
    rejecting: frozenset[str]
    operators: Mapping[str, Mapping[str, Row]]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "rejecting", frozenset(self.rejecting))
        known = set(self.states)
        if self.start not in known:
            raise ValueError(f"start state {self.start!r} is not declared")
        if not (self.accepting | self.rejecting) <= known:
            raise ValueError("halting states must be declared states")
        clean = {}
        for symbol, table in self.operators.items():
            rows = {}
            for src, entries in table.items():
                if src not in known:
                    raise ValueError(f"unknown source {src!r} under {symbol!r}")
                row = tuple((tgt, complex(amp)) for tgt, amp in entries)
                if any(tgt not in known for tgt, _ in row):
                    raise ValueError(f"unknown target under {symbol!r}")
                rows[src] = row
            clean[symbol] = rows
        object.__setattr__(self, "operators", clean)

    @property
    def non_halting(self) -> frozenset[str]:
        return frozenset(self.states) - self.accepting - self.rejecting

    def as_operator_table(self) -> OperatorTable:
        """Pair view of the per-symbol family (second symbol unused), for
        the shared orthonormality check."""
        rows = {(symbol, LEFT_END): table for symbol, table in self.operators.items()}
        return OperatorTable(
            states=self.states,
            alphabet1=tuple(self.operators),
            alphabet2=(),
            rows=rows,
            moves={q: (1, 0) for q in self.states},
        )


def run_mm1qfa(m: MeasureManyQfa, word: Iterable[str], trace: bool = False) -> RunResult:
    """Run on ``# word $``, measuring after every operator application.

    Consumes exactly ``len(word) + 2`` operators.  Mass on sources whose
    row is undefined counts as rejection."""
    word = tuple(word)
    for symbol in word:
        if symbol not in m.alphabet:
            raise SymbolError(f"symbol {symbol!r} not in the input alphabet")
    psi: dict[str, complex] = {m.start: 1.0 + 0j}
    p_acc = 0.0
    p_rej = 0.0
    steps = 0
    records: list[StepRecord] = []
    for symbol in (LEFT_END, *word, RIGHT_END):
        rows = m.operators.get(symbol, {})
        out: dict[str, complex] = {}
        sink_terms: list[float] = []
        for src, amp in psi.items():
            row = rows.get(src)
            if row is None:
                sink_terms.append(_abs2(amp))
                continue
            for tgt, coef in row:
                out[tgt] = out.get(tgt, 0j) + amp * coef
        live: dict[str, complex] = {}
        acc_terms: list[float] = []
        rej_terms: list[float] = []
        for state, amp in out.items():
            if state in m.accepting:
                acc_terms.append(_abs2(amp))
            elif state in m.rejecting:
                rej_terms.append(_abs2(amp))
            elif _abs2(amp) > 0.0:
                live[state] = amp
        acc = math.fsum(acc_terms)
        rej = math.fsum(rej_terms)
        sink = math.fsum(sink_terms)
        p_acc += acc
        p_rej += rej + sink
        psi = live
        steps += 1
        if trace:
            records.append(StepRecord(steps, Superposition(psi), acc, rej, sink))
    p_live = math.fsum(_abs2(a) for a in psi.values())
    return RunResult(p_acc, p_rej, p_live, steps, False, tuple(records) if trace else None)


@dataclass(frozen=True)
class TwoTapeQfa:
    """Two read-only endmarked tapes, one head each; tape 2 carries a
    guess word related to tape 1 by the symbol relation.  In two-head
    mode both heads walk one tape and the relation is the identity."""

    states: tuple[str, ...]
    input_alphabet: tuple[str, ...]
    tape2_alphabet: tuple[str, ...]
    start: Superposition
    accepting: frozenset[str]
    rejecting: frozenset[str]
    table: OperatorTable
    relation: SymbolRelation
    mode: str = TWO_TAPE

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "input_alphabet", tuple(self.input_alphabet))
        object.__setattr__(self, "tape2_alphabet", tuple(self.tape2_alphabet))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "rejecting", frozenset(self.rejecting))
        if isinstance(self.start, str):
            object.__setattr__(self, "start", Superposition.basis(self.start))
        elif not isinstance(self.start, Superposition):
            object.__setattr__(self, "start", Superposition(self.start))
        if self.mode not in (TWO_TAPE, TWO_HEAD):
            raise ValueError(f"unknown mode {self.mode!r}")
        known = set(self.states)
        if set(self.table.states) != known:
            raise ValueError("operator table and machine disagree on the state set")
        if not set(self.start.labels()) <= known:
            raise ValueError("start superposition uses undeclared states")
        if self.accepting & self.rejecting:
            raise ValueError("accepting and rejecting sets overlap")

    def halting(self) -> frozenset[str]:
        return self.accepting | self.rejecting


def _resolve_tapes(
    m: TwoTapeQfa, word: tuple[str, ...], tape2: tuple[str, ...] | None
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    for symbol in word:
        if symbol not in m.input_alphabet:
            raise SymbolError(f"symbol {symbol!r} not in the input alphabet")
    tape1 = (LEFT_END, *word, RIGHT_END)
    if m.mode == TWO_HEAD:
        return tape1, tape1
    if tape2 is None:
        forced = []
        for symbol in word:
            image = m.relation.image(symbol)
            if len(image) != 1:
                raise TapeCompatibilityError(
                    f"symbol {symbol!r} admits {len(image)} second-tape symbols; "
                    "a tape-2 word is required"
                )
            forced.append(image[0])
        tape2 = tuple(forced)
    else:
        tape2 = tuple(tape2)
        if len(tape2) != len(word):
            raise TapeCompatibilityError(
                f"tape lengths differ: {len(word)} vs {len(tape2)}"
            )
        for a, b in zip(word, tape2):
            if b not in m.tape2_alphabet:
                raise SymbolError(f"symbol {b!r} not in the tape-2 alphabet")
            if not m.relation.contains(a, b):
                raise TapeCompatibilityError(f"pair ({a!r}, {b!r}) is not in the relation")
    return tape1, (LEFT_END, *tape2, RIGHT_END)


def _step(
    m: TwoTapeQfa,
    tape1: tuple[str, ...],
    tape2: tuple[str, ...],
    psi: dict[Config, complex],
) -> tuple[dict[Config, complex], float, float, float]:
    """One evolution step on raw dictionaries; see step_twotape."""
    rows_by_pair = m.table.rows
    moves = m.table.moves
    accepting = m.accepting
    rejecting = m.rejecting
    last1 = len(tape1) - 1
    last2 = len(tape2) - 1
    out: dict[Config, complex] = {}
    acc_terms: list[float] = []
    rej_terms: list[float] = []
    sink_terms: list[float] = []
    for config, amp in psi.items():
        state, h1, h2 = config
        if state in accepting:
            acc_terms.append(_abs2(amp))
            continue
        if state in rejecting:
            rej_terms.append(_abs2(amp))
            continue
        rows = rows_by_pair.get((tape1[h1], tape2[h2]))
        row = rows.get(state) if rows else None
        if row is None:
            sink_terms.append(_abs2(amp))
            continue
        for target, coef in row:
            d1, d2 = moves[target]
            key = (target, min(h1 + d1, last1), min(h2 + d2, last2))
            out[key] = out.get(key, 0j) + amp * coef
    live: dict[Config, complex] = {}
    for config, amp in out.items():
        state = config[0]
        mass = _abs2(amp)
        if state in accepting:
            acc_terms.append(mass)
        elif state in rejecting:
            rej_terms.append(mass)
        elif mass > 0.0:
            live[config] = amp
    return live, math.fsum(acc_terms), math.fsum(rej_terms), math.fsum(sink_terms)


def step_twotape(
    m: TwoTapeQfa,
    tapes: tuple[tuple[str, ...], tuple[str, ...]],
    psi: Superposition,
) -> tuple[Superposition, float, float, float]:
    """Apply one step to a superposition over configurations.

    Each live configuration reads the symbols under its heads, applies
    the matching operator row, and every target lands with its own head
    moves (heads clamp at $).  Amplitude arriving on halting states is
    measured out and returned as acc/rej mass; amplitude on sources with
    no defined row becomes sink mass.
    """
    tape1, tape2 = tuple(tapes[0]), tuple(tapes[1])
    if tape1[:1] != (LEFT_END,) or tape1[-1:] != (RIGHT_END,):
        raise ValueError("tape 1 must be #-prefixed and $-suffixed")
    if tape2[:1] != (LEFT_END,) or tape2[-1:] != (RIGHT_END,):
        raise ValueError("tape 2 must be #-prefixed and $-suffixed")
    live, acc, rej, sink = _step(m, tape1, tape2, dict(psi.items()))
    return Superposition(live), acc, rej, sink


def default_max_steps(m: TwoTapeQfa, len1: int, len2: int) -> int:
    """Configuration count |Q| * (n1 + 2) * (n2 + 2)."""
    return len(m.states) * (len1 + 2) * (len2 + 2)


def run_twotape(
    m: TwoTapeQfa,
    word: Iterable[str],
    tape2: Iterable[str] | None = None,
    *,
    max_steps: int | None = None,
    trace: bool = False,
) -> RunResult:
    """Run from the start superposition with both heads on #.

    In two-tape mode ``tape2`` must be relation-compatible with ``word``
    (it may be omitted when the relation forces a unique tape).  In
    two-head mode ``tape2`` is ignored.  Sink mass counts as rejection;
    mass still live at the step budget is reported as ``p_live``.
    """
    word = tuple(word)
    tape2_word = None if tape2 is None else tuple(tape2)
    tape1, full_tape2 = _resolve_tapes(m, word, tape2_word)
    budget = (
        default_max_steps(m, len(word), len(full_tape2) - 2)
        if max_steps is None
        else max_steps
    )
    psi: dict[Config, complex] = {
        (state, 0, 0): amp for state, amp in m.start.items()
    }
    p_acc = 0.0
    p_rej = 0.0
    steps = 0
    records: list[StepRecord] = []
    live_mass = math.fsum(_abs2(a) for a in psi.values())
    while psi and steps < budget:
        psi, acc, rej, sink = _step(m, tape1, full_tape2, psi)
        p_acc += acc
        p_rej += rej + sink
        steps += 1
        if trace:
            records.append(StepRecord(steps, Superposition(psi), acc, rej, sink))
        live_mass = math.fsum(_abs2(a) for a in psi.values())
        if live_mass < LIVE_CUTOFF:
            break
    livelocked = bool(psi) and live_mass >= LIVE_CUTOFF
    return RunResult(
        p_acc, p_rej, live_mass, steps, livelocked, tuple(records) if trace else None
    )


# --------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [
            f"[{'ok' if c.passed else 'FAIL'}] {c.name}" + (f": {c.detail}" if c.detail else "")
            for c in self.checks
        ]


def validate_automaton(m: TwoTapeQfa | MeasureManyQfa) -> ValidationReport:
    """Aggregate well-formedness report: per-pair orthonormality, halting
    moves, start normalization, and relation alphabets."""
    checks: list[CheckResult] = []
    if isinstance(m, MeasureManyQfa):
        report = check_gram_wellformed(m.as_operator_table())
        checks.append(
            CheckResult(
                "orthonormal operators",
                report.passed,
                f"max deviation {report.max_deviation:.3e}"
                + (f" on {[p[0] for p in report.failing_pairs()]}" if not report.passed else ""),
            )
        )
        overlap = m.accepting & m.rejecting
        checks.append(
            CheckResult(
                "halting partition disjoint",
                not overlap,
                "" if not overlap else f"overlap {sorted(overlap)}",
            )
        )
        missing = [s for s in m.alphabet if s not in m.operators]
        checks.append(
            CheckResult(
                "operator per symbol",
                not missing,
                "" if not missing else f"no operator for {missing}",
            )
        )
        return ValidationReport(tuple(checks))

    report = check_gram_wellformed(m.table)
    checks.append(
        CheckResult(
            "orthonormal symbol-pair operators",
            report.passed,
            f"max deviation {report.max_deviation:.3e}"
            + (f" on pairs {report.failing_pairs()}" if not report.passed else ""),
        )
    )
    bad_moves = [
        q for q in sorted(m.halting()) if m.table.moves.get(q, (0, 0)) != (0, 0)
    ]
    checks.append(
        CheckResult(
            "halting states stationary",
            not bad_moves,
            "" if not bad_moves else f"nonzero moves on {bad_moves}",
        )
    )
    norm = m.start.norm2()
    checks.append(
        CheckResult(
            "start superposition normalized",
            abs(norm - 1.0) <= 1e-9,
            f"squared norm {norm:.12f}",
        )
    )
    domain_ok = set(m.relation.domain) <= set(m.input_alphabet)
    codomain_ok = set(m.relation.codomain) <= set(m.tape2_alphabet)
    checks.append(
        CheckResult(
            "relation alphabets",
            domain_ok and codomain_ok,
            "" if domain_ok and codomain_ok else "relation symbols outside the declared alphabets",
        )
    )
    if m.mode == TWO_HEAD:
        two_head_ok = m.relation.is_identity_on(m.input_alphabet) and tuple(
            m.tape2_alphabet
        ) == tuple(m.input_alphabet)
        checks.append(
            CheckResult(
                "two-head mode constraints",
                two_head_ok,
                "" if two_head_ok else "two-head machines need identity relation and equal alphabets",
            )
        )
    return ValidationReport(tuple(checks))
