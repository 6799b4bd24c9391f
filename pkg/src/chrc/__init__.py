"""Constraint handling rules over constants: engine and deciders.

The package parses single- and multi-headed rule programs whose only
built-in is equality over a finite set of constants, runs them under the
abstract ("o") and theoretical ("t") operational semantics, and decides
divergence (for range-restricted programs) and termination-existence
(for single-headed programs) with machine-checkable witnesses.
"""

from .decide import (
    BoundParameters,
    DivergenceVerdict,
    DivergenceWitness,
    NotRangeRestricted,
    NotSingleHeaded,
    TerminationVerdict,
    bound_L,
    bound_parameters,
    decide_divergence,
    decide_termination_existence,
    effective_cap,
    verify_divergence_witness,
    verify_termination_witness,
)
from .engine import (
    OMEGA_O,
    OMEGA_T,
    Computation,
    Configuration,
    ReplayError,
    initial_configuration,
    normalize,
    replay,
    run,
    successors,
)
from .forest import Forest, build_forest, compress, eta, node_sequence, repetitiveness
from .oracle import (
    ExplorationReport,
    differential_corpus,
    enumerate_strictly_increasing,
    explore,
)
from .store import BuiltinStore, ProjectedStore, equivalent
from .syntax import (
    ChrAtom,
    Equation,
    ParseError,
    Program,
    Rule,
    Term,
    classify,
    parse_goal,
    parse_program,
)
from .wqo import leq

__all__ = [
    "BoundParameters",
    "BuiltinStore",
    "ChrAtom",
    "Computation",
    "Configuration",
    "DivergenceVerdict",
    "DivergenceWitness",
    "Equation",
    "ExplorationReport",
    "Forest",
    "NotRangeRestricted",
    "NotSingleHeaded",
    "OMEGA_O",
    "OMEGA_T",
    "ParseError",
    "Program",
    "ProjectedStore",
    "ReplayError",
    "Rule",
    "Term",
    "TerminationVerdict",
    "bound_L",
    "bound_parameters",
    "build_forest",
    "classify",
    "compress",
    "decide_divergence",
    "decide_termination_existence",
    "differential_corpus",
    "effective_cap",
    "enumerate_strictly_increasing",
    "equivalent",
    "eta",
    "explore",
    "initial_configuration",
    "leq",
    "node_sequence",
    "normalize",
    "parse_goal",
    "parse_program",
    "replay",
    "repetitiveness",
    "run",
    "successors",
    "verify_divergence_witness",
    "verify_termination_witness",
]

__version__ = "0.1.0"
