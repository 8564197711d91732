"""Acceptance over guess tapes, cut-point decisions, and brute-force
language oracles for bounded equivalence testing.

Acceptance is existential by default: a word is accepted with the best
probability any relation-compatible guess tape achieves.  The dual
(worst tape) and a fixed-tape mode are provided because rejection
arguments quantify over all guesses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .classical import run_dfa
from .core import SymbolError, rho_count, rho_expand
from .quantum import TWO_TAPE, TwoTapeQfa, run_twotape

EXISTS_MAX = "exists-max"
FORALL_MIN = "forall-min"
FIXED_TAPE = "fixed-tape"

MODES = (EXISTS_MAX, FORALL_MIN, FIXED_TAPE)

#: decision margin around the cut-point
DECISION_EPS = 1e-9
#: live mass above this leaves a decision unresolved
LIVE_EPS = 1e-6
#: default cap on enumerated guess tapes
DEFAULT_TAPE_CAP = 10**6
#: default cap on words examined by bounded_equivalence
DEFAULT_WORD_CAP = 2 * 10**6

ACCEPT = "accept"
REJECT = "reject"
MARGINAL = "marginal"


class TapeBudgetError(RuntimeError):
    """Guess-tape enumeration would exceed the configured cap."""


class WordBudgetError(RuntimeError):
    """Word enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class AcceptanceSemantics:
    mode: str = EXISTS_MAX
    cutpoint: float = 0.5
    fixed_tape: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 0.0 <= self.cutpoint <= 1.0:
            raise ValueError("cutpoint must lie in [0, 1]")
        if self.fixed_tape is not None:
            object.__setattr__(self, "fixed_tape", tuple(self.fixed_tape))
        if self.mode == FIXED_TAPE and self.fixed_tape is None:
            raise ValueError("fixed-tape mode needs a tape")


@dataclass(frozen=True)
class AcceptanceOutcome:
    """Probability plus the tape achieving it (best tape for exists-max,
    worst for forall-min, the supplied one for fixed-tape).  ``live_mass``
    is the largest unmeasured residual seen across examined tapes."""

    probability: float
    witness: tuple[str, ...] | None
    live_mass: float = 0.0
    diagnostic: str | None = None


def accept_probability(
    m: TwoTapeQfa,
    word: Iterable[str],
    semantics: AcceptanceSemantics = AcceptanceSemantics(),
    *,
    max_steps: int | None = None,
    tape_cap: int = DEFAULT_TAPE_CAP,
) -> AcceptanceOutcome:
    """Acceptance probability of a word under the given semantics.

    A word with a symbol outside the relation's domain has no compatible
    tape at all and scores probability 0 (with a diagnostic), not an
    error.  Ties between guess tapes resolve to the tape enumerated
    first, i.e. the lexicographically least one.
    """
    word = tuple(word)
    if semantics.mode == FIXED_TAPE:
        result = run_twotape(m, word, semantics.fixed_tape, max_steps=max_steps)
        return AcceptanceOutcome(result.p_acc, semantics.fixed_tape, result.p_live)
    try:
        count = rho_count(m.relation, word) if m.mode == TWO_TAPE else 1
        if count == 0:
            raise SymbolError("some symbol has an empty image")
        if count > tape_cap:
            raise TapeBudgetError(
                f"{count} guess tapes exceed the cap of {tape_cap}"
            )
        tapes = rho_expand(m.relation, word) if m.mode == TWO_TAPE else iter([word])
    except SymbolError as exc:
        return AcceptanceOutcome(0.0, None, 0.0, diagnostic=str(exc))

    best: float | None = None
    witness: tuple[str, ...] | None = None
    live_mass = 0.0
    want_max = semantics.mode == EXISTS_MAX
    for tape in tapes:
        result = run_twotape(m, word, tape, max_steps=max_steps)
        live_mass = max(live_mass, result.p_live)
        if best is None or (result.p_acc > best if want_max else result.p_acc < best):
            best = result.p_acc
            witness = tape
    if best is None:
        return AcceptanceOutcome(0.0, None, 0.0, diagnostic="no compatible guess tape")
    return AcceptanceOutcome(best, witness, live_mass)


def classify(outcome: AcceptanceOutcome, semantics: AcceptanceSemantics) -> str:
    """Cut-point decision for an already-computed outcome."""
    if outcome.probability > semantics.cutpoint + DECISION_EPS:
        return ACCEPT
    if outcome.probability < semantics.cutpoint - DECISION_EPS and outcome.live_mass <= LIVE_EPS:
        return REJECT
    return MARGINAL


def decide(
    m: TwoTapeQfa,
    word: Iterable[str],
    semantics: AcceptanceSemantics = AcceptanceSemantics(),
    *,
    max_steps: int | None = None,
    tape_cap: int = DEFAULT_TAPE_CAP,
) -> str:
    """``accept`` / ``reject`` / ``marginal`` (strictly above the
    cut-point accepts).  Unresolved live mass above ``LIVE_EPS`` keeps a
    low probability from counting as a clean rejection."""
    outcome = accept_probability(m, word, semantics, max_steps=max_steps, tape_cap=tape_cap)
    return classify(outcome, semantics)


# --------------------------------------------------------------------------
# brute-force language oracles

ORACLES = ("anbn", "anbncn", "ww", "percent-lang")

_ORACLE_ALPHABETS = {
    "anbn": ("a", "b"),
    "anbncn": ("a", "b", "c"),
    "ww": ("a", "b"),
    "percent-lang": ("a", "b", "*", "%"),
}


def oracle_alphabet(oracle: str) -> tuple[str, ...]:
    name = oracle.split(":", 1)
    if name[0] == "dfa":
        from .examples import build_example

        return build_example(name[1]).machine.alphabet
    try:
        return _ORACLE_ALPHABETS[oracle]
    except KeyError:
        raise ValueError(f"unknown oracle {oracle!r}") from None


def _percent_blocks(word: tuple[str, ...]) -> list[tuple[str, str]] | None:
    """Parse %w*x%w*x... structure; None when malformed (missing leading
    %, empty block, or a block without exactly one literal *)."""
    if not word or word[0] != "%":
        return None
    blocks: list[tuple[str, str]] = []
    current: list[str] = []
    for symbol in list(word[1:]) + ["%"]:
        if symbol != "%":
            current.append(symbol)
            continue
        if current.count("*") != 1:
            return None
        split = current.index("*")
        left = current[:split]
        right = current[split + 1 :]
        if any(c not in ("a", "b") for c in left + right):
            return None
        blocks.append(("".join(left), "".join(right)))
        current = []
    return blocks


def oracle_membership(oracle: str, word: Iterable[str]) -> bool:
    """Direct decision by definition; see the module docstring.

    ``dfa:<name>`` runs the named registry DFA.  Malformed block
    structure for ``percent-lang`` is a plain False, not an error."""
    word = tuple(word)
    if oracle.startswith("dfa:"):
        from .examples import build_example

        entry = build_example(oracle.split(":", 1)[1])
        return run_dfa(entry.machine, word)
    alphabet = oracle_alphabet(oracle)
    for symbol in word:
        if symbol not in alphabet:
            raise SymbolError(f"symbol {symbol!r} outside the {oracle} alphabet")
    if oracle == "anbn":
        half = len(word) // 2
        return (
            len(word) >= 2
            and len(word) % 2 == 0
            and all(s == "a" for s in word[:half])
            and all(s == "b" for s in word[half:])
        )
    if oracle == "anbncn":
        third = len(word) // 3
        return (
            len(word) >= 3
            and len(word) % 3 == 0
            and all(s == "a" for s in word[:third])
            and all(s == "b" for s in word[third : 2 * third])
            and all(s == "c" for s in word[2 * third :])
        )
    if oracle == "ww":
        half = len(word) // 2
        return len(word) % 2 == 0 and word[:half] == word[half:]
    if oracle == "percent-lang":
        blocks = _percent_blocks(word)
        if blocks is None:
            return False
        return any(
            w1 == w2 and x1 != x2
            for (w1, x1), (w2, x2) in itertools.combinations(blocks, 2)
        )
    raise ValueError(f"unknown oracle {oracle!r}")


# --------------------------------------------------------------------------
# bounded equivalence

@dataclass(frozen=True)
class Disagreement:
    word: tuple[str, ...]
    decision: str
    member: bool
    probability: float
    witness: tuple[str, ...] | None


@dataclass(frozen=True)
class EquivalenceReport:
    disagreements: tuple[Disagreement, ...]
    words_checked: int
    truncated: bool

    @property
    def agreed(self) -> bool:
        return not self.disagreements and not self.truncated


def words_over(alphabet: Iterable[str], max_len: int, min_len: int = 0):
    alphabet = tuple(alphabet)
    for length in range(min_len, max_len + 1):
        yield from itertools.product(alphabet, repeat=length)


def bounded_equivalence(
    m: TwoTapeQfa,
    oracle: str,
    max_len: int,
    semantics: AcceptanceSemantics = AcceptanceSemantics(),
    *,
    min_len: int = 0,
    alphabet: Iterable[str] | None = None,
    word_cap: int = DEFAULT_WORD_CAP,
    tape_cap: int = DEFAULT_TAPE_CAP,
) -> EquivalenceReport:
    """Compare the machine's cut-point decisions against an oracle on
    every word up to ``max_len`` (over the oracle's alphabet unless one
    is given).  Marginal outcomes count as disagreements.  Exceeding the
    word cap flags the report as truncated instead of running forever."""
    alphabet = tuple(alphabet) if alphabet is not None else oracle_alphabet(oracle)
    disagreements: list[Disagreement] = []
    checked = 0
    truncated = False
    for word in words_over(alphabet, max_len, min_len):
        if checked >= word_cap:
            truncated = True
            break
        checked += 1
        member = oracle_membership(oracle, word)
        outcome = accept_probability(m, word, semantics, tape_cap=tape_cap)
        decision = classify(outcome, semantics)
        if decision == MARGINAL or (decision == ACCEPT) != member:
            disagreements.append(
                Disagreement(word, decision, member, outcome.probability, outcome.witness)
            )
    return EquivalenceReport(tuple(disagreements), checked, truncated)
