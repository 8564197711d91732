"""qfasim: simulators, validators and compilers for small quantum and
classical finite automata with one or two heads/tapes."""

from .classical import (
    ACCEPTED,
    LIVELOCK,
    REJECTED,
    Dfa,
    MultiHeadDfa,
    ReversibilityReport,
    check_reversible,
    dfa_as_multihead,
    run_dfa,
    run_mhdfa,
    symbol_pair_matrix,
)
from .compiler import TransitionNumbering, compile_dfa, lift_rmfa, number_transitions
from .core import (
    AmplitudeError,
    GramReport,
    OperatorTable,
    Superposition,
    SymbolError,
    SymbolRelation,
    WellFormednessError,
    apply_operator,
    check_gram_wellformed,
    format_amplitude,
    parse_amplitude,
    rho_count,
    rho_expand,
    unitary_complete,
)
from .examples import RegistryEntry, build_example, registry_names
from .lang import (
    ACCEPT,
    EXISTS_MAX,
    FIXED_TAPE,
    FORALL_MIN,
    MARGINAL,
    REJECT,
    AcceptanceOutcome,
    AcceptanceSemantics,
    Disagreement,
    EquivalenceReport,
    accept_probability,
    bounded_equivalence,
    classify,
    decide,
    oracle_alphabet,
    oracle_membership,
    words_over,
)
from .quantum import (
    TWO_HEAD,
    TWO_TAPE,
    MeasureManyQfa,
    RunResult,
    StepRecord,
    TapeCompatibilityError,
    TwoTapeQfa,
    ValidationReport,
    run_mm1qfa,
    run_twotape,
    step_twotape,
    validate_automaton,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
