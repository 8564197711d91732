"""Command-line surface and the on-disk automaton format.

The file format is a single JSON document.  Amplitudes are stored as
expression text (``1/sqrt(2)``, ``exp(i*pi*2/2)``, plain decimals), so
files stay human-diffable and exact-looking values survive a round trip.
``#`` and ``$`` are reserved and may appear only in transition reads.

Machine references on the command line are either a file path or
``examples:<name>``.  All output is deterministic; ``--json`` switches
any subcommand to machine-readable output.  Exit codes: 0 for
success/accept, 1 for reject/fail, 2 for usage or validation errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Any

import numpy as np

from .classical import (
    ACCEPTED,
    Dfa,
    MultiHeadDfa,
    check_reversible,
    run_dfa,
    run_mhdfa,
    symbol_pair_matrix,
)
from .compiler import compile_dfa, lift_rmfa
from .core import (
    ENDMARKERS,
    OperatorTable,
    Superposition,
    SymbolRelation,
    check_gram_wellformed,
    format_amplitude,
    parse_amplitude,
)
from .examples import build_example, registry_names
from .lang import (
    EXISTS_MAX,
    FIXED_TAPE,
    FORALL_MIN,
    ACCEPT,
    AcceptanceSemantics,
    accept_probability,
    bounded_equivalence,
    classify,
    oracle_alphabet,
)
from .quantum import (
    TWO_HEAD,
    TWO_TAPE,
    MeasureManyQfa,
    TwoTapeQfa,
    run_mm1qfa,
    run_twotape,
    validate_automaton,
)

MODELS = ("dfa", "mhdfa", "mm1qfa", "1qfa2", "2t1qfa")


class FileFormatError(ValueError):
    """The automaton file is malformed; the message names the offender."""


@dataclass(frozen=True)
class LoadResult:
    model: str
    machine: Dfa | MultiHeadDfa | MeasureManyQfa | TwoTapeQfa
    warnings: tuple[str, ...]


# --------------------------------------------------------------------------
# serialization

def _require(doc: dict, key: str, kind=None):
    if key not in doc:
        raise FileFormatError(f"missing field {key!r}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise FileFormatError(f"field {key!r} has the wrong type")
    return value


def _check_symbols(symbols, what):
    for s in symbols:
        if not isinstance(s, str) or not s:
            raise FileFormatError(f"{what} contains a non-string symbol")
        if s in ENDMARKERS:
            raise FileFormatError(f"reserved symbol {s!r} used in {what}")
    return tuple(symbols)


def _parse_start(raw, states) -> Superposition:
    if isinstance(raw, str):
        if raw not in states:
            raise FileFormatError(f"start state {raw!r} is not declared")
        return Superposition.basis(raw)
    if isinstance(raw, dict):
        amps = {}
        for state, expr in raw.items():
            if state not in states:
                raise FileFormatError(f"start superposition names unknown state {state!r}")
            amps[state] = parse_amplitude(expr)
        return Superposition(amps)
    raise FileFormatError("start must be a state name or a state->amplitude mapping")


def _parse_targets(raw, states):
    if not isinstance(raw, list) or not raw:
        raise FileFormatError("transition targets must be a non-empty list")
    out = []
    for item in raw:
        if not (isinstance(item, list) and len(item) == 2):
            raise FileFormatError(f"bad target entry {item!r}")
        state, expr = item
        if state not in states:
            raise FileFormatError(f"transition targets unknown state {state!r}")
        out.append((state, parse_amplitude(expr)))
    return tuple(out)


def _reachable_warning(states, start_states, edges) -> list[str]:
    reached = set(start_states)
    frontier = list(start_states)
    while frontier:
        here = frontier.pop()
        for nxt in edges.get(here, ()):
            if nxt not in reached:
                reached.add(nxt)
                frontier.append(nxt)
    unreachable = [q for q in states if q not in reached]
    if unreachable:
        return [f"unreachable states: {', '.join(unreachable)}"]
    return []


def load_automaton(path: str) -> LoadResult:
    """Load and validate a machine description.

    Unresolvable references and reserved-symbol misuse are fatal;
    orthonormality deviations and unreachable states come back as
    warnings."""
    try:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: not valid JSON (line {exc.lineno})") from None
    if not isinstance(doc, dict):
        raise FileFormatError(f"{path}: the document must be a JSON object")
    return load_automaton_dict(doc)


def load_automaton_dict(doc: dict) -> LoadResult:
    model = _require(doc, "model", str)
    if model not in MODELS:
        raise FileFormatError(f"unknown model {model!r}; expected one of {MODELS}")
    states = tuple(_require(doc, "states", list))
    if any(not isinstance(q, str) for q in states):
        raise FileFormatError("states must be strings")
    if any(q in ENDMARKERS for q in states):
        raise FileFormatError("reserved symbol used as a state name")
    alphabet = _check_symbols(_require(doc, "input_alphabet", list), "input_alphabet")
    transitions = _require(doc, "transitions", list)
    warnings: list[str] = []

    if model == "dfa":
        table = {}
        for t in transitions:
            read = _require(t, "read", list)
            if len(read) != 1:
                raise FileFormatError("dfa transitions read exactly one symbol")
            target = _require(t, "to", str)
            table[(_require(t, "from", str), read[0])] = target
        machine: Any = Dfa(
            states=states,
            alphabet=alphabet,
            start=_require(doc, "start", str),
            accepting=frozenset(doc.get("accept", ())),
            transitions=table,
        )
        edges = {}
        for (q, _), q2 in table.items():
            edges.setdefault(q, set()).add(q2)
        warnings += _reachable_warning(states, [machine.start], edges)
        return LoadResult(model, machine, tuple(warnings))

    if model == "mhdfa":
        heads = _require(doc, "heads", int)
        table = {}
        for t in transitions:
            read = tuple(_require(t, "read", list))
            moves = tuple(_require(t, "moves", list))
            table[(_require(t, "from", str), read)] = (_require(t, "to", str), moves)
        machine = MultiHeadDfa(
            states=states,
            alphabet=alphabet,
            heads=heads,
            start=_require(doc, "start", str),
            accepting=frozenset(doc.get("accept", ())),
            transitions=table,
        )
        edges = {}
        for (q, _), (q2, _) in table.items():
            edges.setdefault(q, set()).add(q2)
        warnings += _reachable_warning(states, [machine.start], edges)
        return LoadResult(model, machine, tuple(warnings))

    if model == "mm1qfa":
        operators: dict[str, dict[str, tuple]] = {}
        for t in transitions:
            read = _require(t, "read", list)
            if len(read) != 1:
                raise FileFormatError("mm1qfa transitions read exactly one symbol")
            operators.setdefault(read[0], {})[_require(t, "from", str)] = _parse_targets(
                t["to"], states
            )
        machine = MeasureManyQfa(
            states=states,
            alphabet=alphabet,
            start=_require(doc, "start", str),
            accepting=frozenset(doc.get("accept", ())),
            rejecting=frozenset(doc.get("reject", ())),
            operators=operators,
        )
        report = validate_automaton(machine)
        warnings += [f"validation: {line}" for line in report.lines() if "FAIL" in line]
        return LoadResult(model, machine, tuple(warnings))

    # two-tape / two-head quantum machine
    mode = TWO_HEAD if model == "1qfa2" else TWO_TAPE
    tape2_alphabet = _check_symbols(
        doc.get("tape2_alphabet", list(alphabet)), "tape2_alphabet"
    )
    rho_pairs = tuple(
        (pair[0], pair[1]) for pair in doc.get("rho", [[s, s] for s in alphabet])
    )
    head_moves = _require(doc, "head_moves", dict)
    moves = {}
    for state in states:
        if state not in head_moves:
            raise FileFormatError(f"head_moves is missing state {state!r}")
        moves[state] = tuple(head_moves[state])
    rows: dict[tuple[str, str], dict[str, tuple]] = {}
    for t in transitions:
        read = _require(t, "read", list)
        if len(read) != 2:
            raise FileFormatError("two-tape transitions read a symbol pair")
        rows.setdefault((read[0], read[1]), {})[_require(t, "from", str)] = _parse_targets(
            t["to"], states
        )
    table = OperatorTable(
        states=states,
        alphabet1=alphabet,
        alphabet2=tape2_alphabet,
        rows=rows,
        moves=moves,
    )
    machine = TwoTapeQfa(
        states=states,
        input_alphabet=alphabet,
        tape2_alphabet=tape2_alphabet,
        start=_parse_start(_require(doc, "start"), states),
        accepting=frozenset(doc.get("accept", ())),
        rejecting=frozenset(doc.get("reject", ())),
        table=table,
        relation=SymbolRelation(rho_pairs),
        mode=mode,
    )
    gram = check_gram_wellformed(table)
    if not gram.passed:
        warnings.append(
            f"orthonormality deviation {gram.max_deviation:.3e} on pairs {gram.failing_pairs()}"
        )
    edges = {}
    for pair_rows in rows.values():
        for src, targets in pair_rows.items():
            edges.setdefault(src, set()).update(t for t, _ in targets)
    warnings += _reachable_warning(states, list(machine.start.labels()), edges)
    return LoadResult(model, machine, tuple(warnings))


def export_automaton(machine, model: str | None = None) -> dict:
    """Serialize a machine to the JSON document structure."""
    if isinstance(machine, Dfa):
        return {
            "model": "dfa",
            "states": list(machine.states),
            "start": machine.start,
            "accept": sorted(machine.accepting),
            "input_alphabet": list(machine.alphabet),
            "transitions": [
                {"from": q, "read": [s], "to": q2}
                for (q, s), q2 in sorted(machine.transitions.items())
            ],
        }
    if isinstance(machine, MultiHeadDfa):
        return {
            "model": "mhdfa",
            "states": list(machine.states),
            "heads": machine.heads,
            "start": machine.start,
            "accept": sorted(machine.accepting),
            "input_alphabet": list(machine.alphabet),
            "transitions": [
                {"from": q, "read": list(read), "to": q2, "moves": list(moves)}
                for (q, read), (q2, moves) in sorted(machine.transitions.items())
            ],
        }
    if isinstance(machine, MeasureManyQfa):
        return {
            "model": "mm1qfa",
            "states": list(machine.states),
            "start": machine.start,
            "accept": sorted(machine.accepting),
            "reject": sorted(machine.rejecting),
            "input_alphabet": list(machine.alphabet),
            "transitions": [
                {
                    "from": src,
                    "read": [symbol],
                    "to": [[tgt, format_amplitude(amp)] for tgt, amp in row],
                }
                for symbol in sorted(machine.operators)
                for src, row in sorted(machine.operators[symbol].items())
            ],
        }
    if isinstance(machine, TwoTapeQfa):
        start_raw: Any
        items = machine.start.sorted_items()
        if len(items) == 1 and abs(items[0][1] - 1.0) < 1e-15:
            start_raw = items[0][0]
        else:
            start_raw = {state: format_amplitude(amp) for state, amp in items}
        return {
            "model": "1qfa2" if machine.mode == TWO_HEAD else "2t1qfa",
            "states": list(machine.states),
            "start": start_raw,
            "accept": sorted(machine.accepting),
            "reject": sorted(machine.rejecting),
            "input_alphabet": list(machine.input_alphabet),
            "tape2_alphabet": list(machine.tape2_alphabet),
            "rho": [list(pair) for pair in machine.relation.pairs],
            "head_moves": {q: list(machine.table.moves[q]) for q in machine.states},
            "transitions": [
                {
                    "from": src,
                    "read": list(pair),
                    "to": [[tgt, format_amplitude(amp)] for tgt, amp in row],
                }
                for pair in machine.table.defined_pairs()
                for src, row in sorted(machine.table.rows[pair].items())
            ],
        }
    raise TypeError(f"cannot export {type(machine).__name__}")


def save_automaton(machine, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(export_automaton(machine), handle, indent=2)
        handle.write("\n")


# --------------------------------------------------------------------------
# helpers

def _resolve(ref: str) -> tuple[Any, tuple[str, ...]]:
    if ref.startswith("examples:"):
        entry = build_example(ref.split(":", 1)[1])
        return entry.machine, ()
    loaded = load_automaton(ref)
    return loaded.machine, loaded.warnings


def tokenize_word(text: str, alphabet) -> tuple[str, ...]:
    """Split CLI word text into symbols: explicit separators (commas or
    spaces) win; otherwise greedy longest match against the alphabet."""
    if text == "":
        return ()
    if "," in text or " " in text:
        parts = [p for p in text.replace(",", " ").split() if p]
        for p in parts:
            if p not in alphabet:
                raise ValueError(f"symbol {p!r} is not in the alphabet")
        return tuple(parts)
    symbols = sorted(alphabet, key=len, reverse=True)
    out = []
    i = 0
    while i < len(text):
        for s in symbols:
            if text.startswith(s, i):
                out.append(s)
                i += len(s)
                break
        else:
            raise ValueError(f"cannot read a symbol at ...{text[i:]!r}")
    return tuple(out)


def _render_word(word) -> str:
    word = tuple(word)
    if not word:
        return "(empty)"
    if all(len(s) == 1 for s in word):
        return "".join(word)
    return ",".join(word)


def _machine_input_alphabet(machine):
    if isinstance(machine, (Dfa, MultiHeadDfa)):
        return machine.alphabet
    if isinstance(machine, MeasureManyQfa):
        return machine.alphabet
    return machine.input_alphabet


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _print_warnings(warnings) -> None:
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)


def _format_matrix(matrix: np.ndarray, states) -> list[str]:
    def fmt(value: complex) -> str:
        value = complex(value)
        if abs(value.imag) < 1e-12 and abs(value.real - round(value.real)) < 1e-12:
            return str(int(round(value.real)))
        if abs(value.imag) < 1e-12:
            return f"{value.real:.6f}"
        return f"{value.real:.6f}{value.imag:+.6f}i"

    cells = [[fmt(matrix[i, j]) for j in range(len(states))] for i in range(len(states))]
    widths = [
        max(len(states[j]), max(len(cells[i][j]) for i in range(len(states))))
        for j in range(len(states))
    ]
    label_width = max(len(q) for q in states)
    lines = [
        " " * (label_width + 2)
        + "  ".join(states[j].rjust(widths[j]) for j in range(len(states)))
    ]
    for i, q in enumerate(states):
        lines.append(
            q.rjust(label_width)
            + "  "
            + "  ".join(cells[i][j].rjust(widths[j]) for j in range(len(states)))
        )
    return lines


def _trace_lines(result) -> list[str]:
    lines = []
    for record in result.trace or ():
        lines.append(
            f"step {record.step}: measured acc={record.acc_mass:.6f} "
            f"rej={record.rej_mass:.6f} sink={record.sink_mass:.6f}"
        )
        for label, amp in record.state.sorted_items():
            if isinstance(label, tuple):
                name = f"{label[0]}@({label[1]},{label[2]})"
            else:
                name = str(label)
            lines.append(f"    {name}  {amp.real:+.6f}{amp.imag:+.6f}i")
    return lines


# --------------------------------------------------------------------------
# subcommands

def _cmd_validate(args) -> int:
    machine, warnings = _resolve(args.machine)
    _print_warnings(warnings)
    if isinstance(machine, (TwoTapeQfa, MeasureManyQfa)):
        report = validate_automaton(machine)
        payload = {
            "machine": args.machine,
            "passed": report.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in report.checks
            ],
        }
        _emit(args, payload, report.lines() + ["PASS" if report.passed else "FAIL"])
        return 0 if report.passed else 1
    if isinstance(machine, MultiHeadDfa):
        report = check_reversible(machine)
        payload = {
            "machine": args.machine,
            "passed": True,
            "reversible": report.reversible,
            "detail": report.summary(),
        }
        _emit(args, payload, [f"structure: ok", f"reversibility: {report.summary()}", "PASS"])
        return 0
    _emit(args, {"machine": args.machine, "passed": True}, ["structure: ok", "PASS"])
    return 0


def _cmd_run(args) -> int:
    machine, warnings = _resolve(args.machine)
    _print_warnings(warnings)
    word = tokenize_word(args.input, _machine_input_alphabet(machine))
    if isinstance(machine, Dfa):
        accepted = run_dfa(machine, word)
        _emit(args, {"accepted": accepted}, ["accepted" if accepted else "rejected"])
        return 0 if accepted else 1
    if isinstance(machine, MultiHeadDfa):
        outcome = run_mhdfa(machine, word, args.max_steps)
        _emit(args, {"outcome": outcome}, [outcome])
        return 0 if outcome == ACCEPTED else 1
    if isinstance(machine, MeasureManyQfa):
        result = run_mm1qfa(machine, word, trace=args.trace)
    else:
        tape2 = (
            tokenize_word(args.tape2, machine.tape2_alphabet)
            if args.tape2 is not None
            else None
        )
        result = run_twotape(
            machine, word, tape2, max_steps=args.max_steps, trace=args.trace
        )
    payload = {
        "p_acc": result.p_acc,
        "p_rej": result.p_rej,
        "p_live": result.p_live,
        "steps": result.steps,
        "livelocked": result.livelocked,
    }
    lines = [
        f"p_acc  = {result.p_acc:.6f}",
        f"p_rej  = {result.p_rej:.6f}",
        f"p_live = {result.p_live:.6f}" + ("  (livelock)" if result.livelocked else ""),
        f"steps  = {result.steps}",
    ]
    if args.trace:
        lines += _trace_lines(result)
    _emit(args, payload, lines)
    return 0


def _cmd_accept(args) -> int:
    machine, warnings = _resolve(args.machine)
    _print_warnings(warnings)
    if not isinstance(machine, TwoTapeQfa):
        print("error: accept needs a two-tape machine", file=sys.stderr)
        return 2
    word = tokenize_word(args.input, machine.input_alphabet)
    fixed = (
        tokenize_word(args.tape2, machine.tape2_alphabet)
        if args.tape2 is not None
        else None
    )
    semantics = AcceptanceSemantics(
        mode=args.semantics, cutpoint=args.cutpoint, fixed_tape=fixed
    )
    outcome = accept_probability(machine, word, semantics)
    decision = classify(outcome, semantics)
    payload = {
        "probability": outcome.probability,
        "witness": list(outcome.witness) if outcome.witness is not None else None,
        "decision": decision,
        "diagnostic": outcome.diagnostic,
    }
    lines = [f"probability = {outcome.probability:.6f}"]
    if outcome.witness is not None:
        lines.append(f"witness tape: {_render_word(outcome.witness)}")
    if outcome.diagnostic:
        lines.append(f"note: {outcome.diagnostic}")
    lines.append(f"decision: {decision}")
    _emit(args, payload, lines)
    return 0 if decision == ACCEPT else 1


def _cmd_compile_dfa(args) -> int:
    machine, warnings = _resolve(args.dfa)
    _print_warnings(warnings)
    if not isinstance(machine, Dfa):
        print("error: compile-dfa needs a dfa machine", file=sys.stderr)
        return 2
    compiled = compile_dfa(machine)
    save_automaton(compiled, args.output)
    report = validate_automaton(compiled)
    _emit(
        args,
        {"output": args.output, "validated": report.passed},
        [f"wrote {args.output}", "validation: " + ("PASS" if report.passed else "FAIL")],
    )
    return 0 if report.passed else 1


def _cmd_lift_rmfa(args) -> int:
    machine, warnings = _resolve(args.mhdfa)
    _print_warnings(warnings)
    if not isinstance(machine, MultiHeadDfa):
        print("error: lift-rmfa needs a mhdfa machine", file=sys.stderr)
        return 2
    lifted = lift_rmfa(machine)
    save_automaton(lifted, args.output)
    report = validate_automaton(lifted)
    _emit(
        args,
        {"output": args.output, "validated": report.passed},
        [f"wrote {args.output}", "validation: " + ("PASS" if report.passed else "FAIL")],
    )
    return 0 if report.passed else 1


def _cmd_lang_test(args) -> int:
    machine, warnings = _resolve(args.machine)
    _print_warnings(warnings)
    if not isinstance(machine, TwoTapeQfa):
        print("error: lang-test needs a two-tape machine", file=sys.stderr)
        return 2
    semantics = AcceptanceSemantics(mode=args.semantics, cutpoint=args.cutpoint)
    report = bounded_equivalence(
        machine,
        args.oracle,
        args.max_len,
        semantics,
        min_len=args.min_len,
    )
    payload = {
        "oracle": args.oracle,
        "words_checked": report.words_checked,
        "truncated": report.truncated,
        "disagreements": [
            {
                "word": _render_word(d.word),
                "decision": d.decision,
                "member": d.member,
                "probability": d.probability,
            }
            for d in report.disagreements
        ],
    }
    lines = [f"checked {report.words_checked} words against {args.oracle}"]
    if report.truncated:
        lines.append("warning: word budget exhausted; result is partial")
    if report.disagreements:
        lines.append(f"{len(report.disagreements)} disagreement(s):")
        for d in report.disagreements:
            lines.append(
                f"  {_render_word(d.word)}: machine={d.decision} "
                f"(p={d.probability:.6f}) oracle={'member' if d.member else 'non-member'}"
            )
    else:
        lines.append("no disagreements")
    _emit(args, payload, lines)
    return 0 if report.agreed else 1


def _cmd_matrices(args) -> int:
    machine, warnings = _resolve(args.machine)
    _print_warnings(warnings)
    if isinstance(machine, TwoTapeQfa):
        table = machine.table
        states = table.states
        pairs = table.defined_pairs()
        getter = lambda pair: table.pair_matrix(pair)  # noqa: E731
    elif isinstance(machine, MultiHeadDfa):
        states = machine.states
        pairs = sorted({symbols for _, symbols in machine.transitions})
        getter = lambda pair: symbol_pair_matrix(machine, pair)  # noqa: E731
    elif isinstance(machine, MeasureManyQfa):
        states = machine.states
        pairs = [(s,) for s in sorted(machine.operators)]
        table = machine.as_operator_table()
        getter = lambda pair: table.pair_matrix((pair[0], "#"))  # noqa: E731
    else:
        print("error: dfa machines have single-symbol rows; use mhdfa or quantum models",
              file=sys.stderr)
        return 2
    if args.pair is not None:
        wanted = tuple(p.strip() for p in args.pair.split(","))
        pairs = [p for p in pairs if tuple(p) == wanted]
        if not pairs:
            pairs = [wanted]
    payload = {}
    lines: list[str] = []
    for pair in pairs:
        matrix = getter(tuple(pair))
        label = ",".join(pair)
        payload[label] = [[format_amplitude(v) for v in row] for row in matrix.tolist()]
        lines.append(f"M[{label}]")
        lines += _format_matrix(matrix, list(states))
        lines.append("")
    _emit(args, payload, lines[:-1] if lines else [])
    return 0


def _cmd_examples(args) -> int:
    if args.action == "list":
        names = registry_names()
        payload = {"examples": []}
        lines = []
        for name in names:
            entry = build_example(name)
            payload["examples"].append(
                {"name": name, "kind": entry.kind, "description": entry.description}
            )
            lines.append(f"{name:22s} {entry.kind:7s} {entry.description}")
        _emit(args, payload, lines)
        return 0
    entry = build_example(args.name)
    if args.action == "show":
        payload = {
            "name": entry.name,
            "kind": entry.kind,
            "description": entry.description,
            "notes": list(entry.notes),
            "definition": export_automaton(entry.machine),
        }
        lines = [
            f"name: {entry.name}",
            f"kind: {entry.kind}",
            f"description: {entry.description}",
        ]
        if entry.notes:
            lines.append("notes:")
            lines += [f"  - {note}" for note in entry.notes]
        lines.append(json.dumps(export_automaton(entry.machine), indent=2))
        _emit(args, payload, lines)
        return 0
    # export
    save_automaton(entry.machine, args.output)
    _emit(args, {"output": args.output}, [f"wrote {args.output}"])
    return 0


# --------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfasim",
        description="simulate, validate and compile small quantum and classical automata",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help):  # noqa: A002
        p = sub.add_parser(name, help=help)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(fn=fn)
        return p

    p = add("validate", _cmd_validate, "well-formedness / reversibility report")
    p.add_argument("machine")

    p = add("run", _cmd_run, "single run with explicit tapes")
    p.add_argument("machine")
    p.add_argument("--input", required=True, help="word on tape 1 ('' for the empty word)")
    p.add_argument("--tape2", help="word on tape 2 (two-tape machines)")
    p.add_argument("--trace", action="store_true", help="print per-step configurations")
    p.add_argument("--max-steps", type=int, default=None)

    p = add("accept", _cmd_accept, "acceptance probability over guess tapes")
    p.add_argument("machine")
    p.add_argument("--input", required=True)
    p.add_argument(
        "--semantics",
        choices=(EXISTS_MAX, FORALL_MIN, FIXED_TAPE, "exists", "forall", "fixed"),
        default=EXISTS_MAX,
        type=lambda s: {"exists": EXISTS_MAX, "forall": FORALL_MIN, "fixed": FIXED_TAPE}.get(s, s),
    )
    p.add_argument("--cutpoint", type=float, default=0.5)
    p.add_argument("--tape2", help="fixed guess tape (fixed semantics)")

    p = add("compile-dfa", _cmd_compile_dfa, "build a two-tape machine from a dfa")
    p.add_argument("dfa")
    p.add_argument("-o", "--output", required=True)

    p = add("lift-rmfa", _cmd_lift_rmfa, "lift a reversible 2-head machine")
    p.add_argument("mhdfa")
    p.add_argument("-o", "--output", required=True)

    p = add("lang-test", _cmd_lang_test, "compare against a brute-force oracle")
    p.add_argument("machine")
    p.add_argument("--oracle", required=True)
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--min-len", type=int, default=0)
    p.add_argument(
        "--semantics",
        choices=(EXISTS_MAX, FORALL_MIN, "exists", "forall"),
        default=EXISTS_MAX,
        type=lambda s: {"exists": EXISTS_MAX, "forall": FORALL_MIN}.get(s, s),
    )
    p.add_argument("--cutpoint", type=float, default=0.5)

    p = add("matrices", _cmd_matrices, "transition matrices, one grid per read")
    p.add_argument("machine")
    p.add_argument("--pair", help="single read to print, e.g. '#,b'")

    p = add("examples", _cmd_examples, "registry: list | show <name> | export <name> -o FILE")
    p.add_argument("action", choices=("list", "show", "export"))
    p.add_argument("name", nargs="?")
    p.add_argument("-o", "--output")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "examples":
        if args.action in ("show", "export") and not args.name:
            parser.error("examples show/export need a name")
        if args.action == "export" and not args.output:
            parser.error("examples export needs -o FILE")
    try:
        return args.fn(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
