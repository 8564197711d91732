"""Shared arithmetic: amplitude expressions, sparse superpositions,
symbol-pair operator tables and the orthonormality machinery.

Everything here is immutable after construction and safe to use from
several threads at once.
"""

from __future__ import annotations

import ast
import cmath
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Mapping

import numpy as np

LEFT_END = "#"
RIGHT_END = "$"
ENDMARKERS = (LEFT_END, RIGHT_END)

#: amplitudes smaller than this are dropped from superpositions and tables
PRUNE_THRESHOLD = 1e-15
#: tolerance for orthonormality validation
VALIDATION_TOL = 1e-9
#: tolerance for unitary completion residuals
COMPLETION_TOL = 1e-12


class AmplitudeError(ValueError):
    """Amplitude text outside the accepted grammar, or a bad evaluation."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message if position is None else f"{message} (column {position})")
        self.position = position


class SymbolError(ValueError):
    """A symbol was used outside the alphabet or relation that owns it."""


class WellFormednessError(ValueError):
    """An operator table violates the per-pair orthonormality condition."""


# --------------------------------------------------------------------------
# amplitude expressions
#
# Accepted grammar: decimal literals, rationals p/q, sqrt(n), 1/sqrt(n),
# i, pi, exp(i*pi*p/q), unary minus, and sums/differences/products of
# those.  Parsed through the Python AST so error positions come for free.

def parse_amplitude(text: str) -> complex:
    """Evaluate an amplitude expression such as ``1/sqrt(2)`` or
    ``exp(i*pi*2/2)`` to a complex number.

    Raises :class:`AmplitudeError` on syntax errors (with column) and on
    division by zero.
    """
    if not isinstance(text, str) or not text.strip():
        raise AmplitudeError("empty amplitude expression")
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise AmplitudeError("invalid amplitude syntax", position=exc.offset) from None
    value = _eval_amplitude_node(tree.body)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise AmplitudeError(f"amplitude {text!r} does not evaluate to a finite value")
    return value


_AMPLITUDE_NAMES = {"i": 1j, "pi": complex(math.pi)}
_AMPLITUDE_CALLS: dict[str, Callable[[complex], complex]] = {
    "sqrt": cmath.sqrt,
    "exp": cmath.exp,
}


def _eval_amplitude_node(node: ast.expr) -> complex:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return complex(node.value)
    if isinstance(node, ast.Name):
        try:
            return _AMPLITUDE_NAMES[node.id]
        except KeyError:
            raise AmplitudeError(f"unknown name {node.id!r}", node.col_offset) from None
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        value = _eval_amplitude_node(node.operand)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)):
        left = _eval_amplitude_node(node.left)
        right = _eval_amplitude_node(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if right == 0:
            raise AmplitudeError("division by zero", node.col_offset)
        return left / right
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        fn = _AMPLITUDE_CALLS.get(node.func.id)
        if fn is None or len(node.args) != 1 or node.keywords:
            raise AmplitudeError(f"unsupported call {ast.dump(node.func)}", node.col_offset)
        return fn(_eval_amplitude_node(node.args[0]))
    raise AmplitudeError("unsupported amplitude syntax", getattr(node, "col_offset", None))


def format_amplitude(value: complex) -> str:
    """Render a complex value as expression text that re-parses to the
    same value (full-precision decimals)."""
    value = complex(value)
    if value.imag == 0:
        return repr(value.real)
    if value.real == 0:
        return f"{value.imag!r}*i"
    sign = "+" if value.imag >= 0 else "-"
    return f"{value.real!r} {sign} {abs(value.imag)!r}*i"


# --------------------------------------------------------------------------
# superpositions

def _abs2(amp: complex) -> float:
    return amp.real * amp.real + amp.imag * amp.imag


class Superposition:
    """Sparse complex-amplitude assignment over hashable basis labels.

    Labels are typically state names or (state, head, head) configuration
    triples.  Amplitudes with magnitude below :data:`PRUNE_THRESHOLD` are
    dropped at construction time.
    """

    __slots__ = ("_amps",)

    def __init__(self, amplitudes: Mapping[Hashable, complex] | Iterable[tuple[Hashable, complex]] = ()):
        items = amplitudes.items() if isinstance(amplitudes, Mapping) else amplitudes
        amps: dict[Hashable, complex] = {}
        for label, amp in items:
            value = complex(amp)
            if abs(value) >= PRUNE_THRESHOLD:
                amps[label] = value
        self._amps = amps

    @classmethod
    def basis(cls, label: Hashable) -> "Superposition":
        return cls({label: 1.0})

    def __getitem__(self, label: Hashable) -> complex:
        return self._amps.get(label, 0j)

    def __contains__(self, label: Hashable) -> bool:
        return label in self._amps

    def __len__(self) -> int:
        return len(self._amps)

    def __iter__(self) -> Iterator[Hashable]:
        return iter(self._amps)

    def __bool__(self) -> bool:
        return bool(self._amps)

    def items(self):
        return self._amps.items()

    def labels(self):
        return self._amps.keys()

    def sorted_items(self) -> list[tuple[Hashable, complex]]:
        """Items in a deterministic label order (for printing)."""
        def key(pair):
            label = pair[0]
            return label if isinstance(label, tuple) else (label,)
        return sorted(self._amps.items(), key=key)

    def norm2(self) -> float:
        """Squared l2 norm."""
        return math.fsum(_abs2(a) for a in self._amps.values())

    def mass(self, labels: Iterable[Hashable]) -> float:
        """Squared norm of the projection onto the given labels."""
        return math.fsum(_abs2(self._amps[l]) for l in labels if l in self._amps)

    def project(self, keep: Callable[[Hashable], bool]) -> "Superposition":
        return Superposition({l: a for l, a in self._amps.items() if keep(l)})

    @classmethod
    def linear(cls, terms: Iterable[tuple[complex, "Superposition"]]) -> "Superposition":
        """Linear combination sum(coef * psi)."""
        out: dict[Hashable, complex] = {}
        for coef, psi in terms:
            for label, amp in psi.items():
                out[label] = out.get(label, 0j) + coef * amp
        return cls(out)

    def __repr__(self) -> str:
        body = ", ".join(f"{l!r}: {a:.6g}" for l, a in self.sorted_items())
        return f"Superposition({{{body}}})"


# --------------------------------------------------------------------------
# operator tables

Row = tuple[tuple[str, complex], ...]


def _normalize_alphabet(symbols: Iterable[str]) -> tuple[str, ...]:
    out = list(dict.fromkeys(symbols))
    for marker in ENDMARKERS:
        if marker not in out:
            out.append(marker)
    return tuple(out)


@dataclass(frozen=True)
class OperatorTable:
    """Partial family of transition operators indexed by symbol pairs.

    ``rows[(s1, s2)][source]`` lists ``(target, amplitude)`` pairs, i.e. the
    image vector of ``source`` under the operator for ``(s1, s2)``.
    ``moves[state]`` is the per-head advance applied on arrival in that
    state.  Sources without a row under a given pair are implicitly routed
    to an absorbing reject sink during simulation.
    """

    states: tuple[str, ...]
    alphabet1: tuple[str, ...]
    alphabet2: tuple[str, ...]
    rows: Mapping[tuple[str, str], Mapping[str, Row]]
    moves: Mapping[str, tuple[int, int]]

    def __post_init__(self):
        states = tuple(self.states)
        if len(set(states)) != len(states):
            raise ValueError("duplicate state names")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "alphabet1", _normalize_alphabet(self.alphabet1))
        object.__setattr__(self, "alphabet2", _normalize_alphabet(self.alphabet2))
        known = set(states)

        rows: dict[tuple[str, str], dict[str, Row]] = {}
        for (s1, s2), table in self.rows.items():
            if s1 not in self.alphabet1:
                raise SymbolError(f"symbol {s1!r} not in the first alphabet")
            if s2 not in self.alphabet2:
                raise SymbolError(f"symbol {s2!r} not in the second alphabet")
            clean: dict[str, Row] = {}
            for src, entries in table.items():
                if src not in known:
                    raise ValueError(f"unknown source state {src!r} under {(s1, s2)}")
                row = []
                for tgt, amp in entries:
                    if tgt not in known:
                        raise ValueError(f"unknown target state {tgt!r} under {(s1, s2)}")
                    value = complex(amp)
                    if abs(value) >= PRUNE_THRESHOLD:
                        row.append((tgt, value))
                clean[src] = tuple(row)
            rows[(s1, s2)] = clean
        object.__setattr__(self, "rows", rows)

        moves: dict[str, tuple[int, int]] = {}
        for state in states:
            if state not in self.moves:
                raise ValueError(f"head-move map is missing state {state!r}")
            d1, d2 = self.moves[state]
            if d1 not in (0, 1) or d2 not in (0, 1):
                raise ValueError(f"moves for {state!r} must lie in {{0, 1}}")
            moves[state] = (int(d1), int(d2))
        object.__setattr__(self, "moves", moves)

        index = {q: k for k, q in enumerate(states)}
        object.__setattr__(self, "_index", index)

    def state_index(self, state: str) -> int:
        return self._index[state]

    def defined_pairs(self) -> list[tuple[str, str]]:
        return sorted(self.rows)

    def pair_matrix(self, pair: tuple[str, str]) -> np.ndarray:
        """Dense matrix for one symbol pair; rows are source states and
        columns are target states, in declared state order.  Undefined
        sources render as zero rows."""
        s1, s2 = pair
        if s1 not in self.alphabet1 or s2 not in self.alphabet2:
            raise SymbolError(f"pair {pair!r} lies outside the table alphabets")
        n = len(self.states)
        out = np.zeros((n, n), dtype=complex)
        for src, row in self.rows.get((s1, s2), {}).items():
            i = self._index[src]
            for tgt, amp in row:
                out[i, self._index[tgt]] += amp
        return out


def apply_operator(
    table: OperatorTable, pair: tuple[str, str], psi: Superposition
) -> tuple[Superposition, float]:
    """Apply one symbol-pair operator to a superposition over states.

    Returns the image superposition restricted to defined source rows,
    plus the probability mass routed to the reject sink by sources whose
    row is undefined.
    """
    s1, s2 = pair
    if s1 not in table.alphabet1:
        raise SymbolError(f"symbol {s1!r} not in the first alphabet")
    if s2 not in table.alphabet2:
        raise SymbolError(f"symbol {s2!r} not in the second alphabet")
    rows = table.rows.get((s1, s2), {})
    out: dict[Hashable, complex] = {}
    sink_terms: list[float] = []
    for src, amp in psi.items():
        row = rows.get(src)
        if row is None:
            sink_terms.append(_abs2(amp))
            continue
        for tgt, coef in row:
            out[tgt] = out.get(tgt, 0j) + amp * coef
    return Superposition(out), math.fsum(sink_terms)


# --------------------------------------------------------------------------
# orthonormality checking and unitary completion

@dataclass(frozen=True)
class GramReport:
    """Per-pair deviation of the Gram matrix of defined image vectors from
    the identity.  The requirement that entries vanish whenever the head
    moves disagree with the target's move assignment is structural here:
    moves are stored per target state, so a conflicting entry cannot be
    expressed at all."""

    tolerance: float
    deviations: Mapping[tuple[str, str], float]

    @property
    def max_deviation(self) -> float:
        return max(self.deviations.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return all(dev <= self.tolerance for dev in self.deviations.values())

    def failing_pairs(self) -> list[tuple[str, str]]:
        return sorted(p for p, dev in self.deviations.items() if dev > self.tolerance)


def _image_matrix(table: OperatorTable, pair: tuple[str, str]) -> tuple[list[str], np.ndarray]:
    """Defined sources and their image vectors (one per matrix row)."""
    rows = table.rows.get(pair, {})
    sources = [q for q in table.states if q in rows]
    images = np.zeros((len(sources), len(table.states)), dtype=complex)
    for i, src in enumerate(sources):
        for tgt, amp in rows[src]:
            images[i, table.state_index(tgt)] += amp
    return sources, images


def check_gram_wellformed(table: OperatorTable, tol: float = VALIDATION_TOL) -> GramReport:
    """Check per-pair orthonormality of the defined image vectors.

    Passes vacuously for pairs without defined rows."""
    deviations: dict[tuple[str, str], float] = {}
    for pair in table.rows:
        _, images = _image_matrix(table, pair)
        if images.shape[0] == 0:
            deviations[pair] = 0.0
            continue
        gram = images.conj() @ images.T
        deviations[pair] = float(np.max(np.abs(gram - np.eye(images.shape[0]))))
    return GramReport(tolerance=tol, deviations=deviations)


def _orthonormal_extension(rows: np.ndarray, count: int) -> list[np.ndarray]:
    """Extend the given orthonormal row vectors by `count` further ones.

    Candidates are canonical basis vectors taken in index order, so the
    extension is deterministic; each accepted vector is orthogonalised
    twice for numerical headroom."""
    n = rows.shape[1]
    accepted = [rows[i] for i in range(rows.shape[0])]
    added: list[np.ndarray] = []
    for k in range(n):
        if len(added) == count:
            break
        v = np.zeros(n, dtype=complex)
        v[k] = 1.0
        for _ in range(2):
            for b in accepted:
                v = v - (b.conj() @ v) * b
        norm = np.linalg.norm(v)
        if norm < 1e-6:
            continue
        v = v / norm
        accepted.append(v)
        added.append(v)
    if len(added) != count:
        raise WellFormednessError("orthonormal extension failed; input rows are degenerate")
    return added


def unitary_complete(table: OperatorTable) -> tuple[OperatorTable, tuple[str, ...]]:
    """Extend a partial table to one whose every symbol-pair matrix is a
    square unitary.

    Undefined source rows are routed to fresh rejecting states (one per
    missing row, shared across pairs) with moves (0, 0); the remaining
    rows are filled by deterministic orthonormal extension.  Original
    entries are preserved bit for bit.  Raises
    :class:`WellFormednessError` if the input violates the Gram condition.
    """
    report = check_gram_wellformed(table, VALIDATION_TOL)
    if not report.passed:
        raise WellFormednessError(
            f"table is not extendable; Gram deviation {report.max_deviation:.3e} "
            f"on pairs {report.failing_pairs()}"
        )
    n0 = len(table.states)
    missing = max((n0 - len(rows) for rows in table.rows.values()), default=0)
    if missing == 0:
        return table, ()

    taken = set(table.states)
    fresh: list[str] = []
    k = 0
    while len(fresh) < missing:
        name = f"rej{k}"
        while name in taken:
            name = "_" + name
        fresh.append(name)
        taken.add(name)
        k += 1
    states = table.states + tuple(fresh)
    n = len(states)
    index = {q: i for i, q in enumerate(states)}

    new_rows: dict[tuple[str, str], dict[str, Row]] = {}
    for pair in sorted(table.rows):
        rows = table.rows[pair]
        completed: dict[str, Row] = {q: rows[q] for q in table.states if q in rows}
        # assigned image rows: defined images padded to the wider space,
        # then one fresh basis vector per undefined original source
        assigned = np.zeros((n0, n), dtype=complex)
        row_count = 0
        for q in table.states:
            if q in rows:
                for tgt, amp in rows[q]:
                    assigned[row_count, index[tgt]] += amp
                row_count += 1
        next_fresh = 0
        for q in table.states:
            if q not in rows:
                target = fresh[next_fresh]
                next_fresh += 1
                completed[q] = ((target, 1.0 + 0j),)
                assigned[row_count, index[target]] = 1.0
                row_count += 1
        extension = _orthonormal_extension(assigned, n - n0)
        for j, source in enumerate(fresh):
            vec = extension[j]
            completed[source] = tuple(
                (states[t], complex(vec[t])) for t in range(n) if abs(vec[t]) >= PRUNE_THRESHOLD
            )
        new_rows[pair] = completed

    moves = dict(table.moves)
    for source in fresh:
        moves[source] = (0, 0)
    completed_table = OperatorTable(
        states=states,
        alphabet1=table.alphabet1,
        alphabet2=table.alphabet2,
        rows=new_rows,
        moves=moves,
    )
    return completed_table, tuple(fresh)


# --------------------------------------------------------------------------
# the tape relation

@dataclass(frozen=True)
class SymbolRelation:
    """Finite relation pairing first-tape symbols with the second-tape
    symbols allowed opposite them.  Carries the model's nondeterminism."""

    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        seen: dict[tuple[str, str], None] = {}
        for a, b in self.pairs:
            if a in ENDMARKERS or b in ENDMARKERS:
                raise SymbolError("endmarkers may not appear in the tape relation")
            seen.setdefault((a, b))
        object.__setattr__(self, "pairs", tuple(seen))
        images: dict[str, list[str]] = {}
        for a, b in self.pairs:
            images.setdefault(a, []).append(b)
        object.__setattr__(self, "_images", {a: tuple(bs) for a, bs in images.items()})

    @classmethod
    def identity(cls, symbols: Iterable[str]) -> "SymbolRelation":
        return cls(tuple((s, s) for s in symbols))

    @property
    def domain(self) -> tuple[str, ...]:
        return tuple(self._images)

    @property
    def codomain(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(b for _, b in self.pairs))

    def image(self, symbol: str) -> tuple[str, ...]:
        return self._images.get(symbol, ())

    def contains(self, a: str, b: str) -> bool:
        return b in self._images.get(a, ())

    def is_identity_on(self, symbols: Iterable[str]) -> bool:
        symbols = tuple(symbols)
        return all(self.image(s) == (s,) for s in symbols) and set(self.domain) == set(symbols)


def rho_count(relation: SymbolRelation, word: Iterable[str]) -> int:
    """Number of compatible second-tape words; exact product of the
    per-symbol image sizes."""
    count = 1
    for symbol in word:
        count *= len(relation.image(symbol))
    return count


def rho_expand(relation: SymbolRelation, word: Iterable[str]) -> Iterator[tuple[str, ...]]:
    """All second-tape words compatible with `word` position by position,
    enumerated lazily in lexicographic order of the per-symbol image
    indices (declaration order of the relation's pairs)."""
    images = []
    for symbol in word:
        image = relation.image(symbol)
        if not image:
            raise SymbolError(
                f"symbol {symbol!r} is outside the relation's domain; "
                "the word cannot be placed on the first tape"
            )
        images.append(image)
    return itertools.product(*images)
