"""Parsing with unification grammars via interaction-free specialization.

The pipeline: parse a string or word lattice with the context-free
backbone of a unification grammar, read the chart as a specialization
grammar, transform that grammar into interaction-free form, and enumerate
every feature-structure solution without backtracking.
"""

from .constraints import (
    Constant,
    Constraint,
    ConstraintSet,
    EMPTY,
    Label,
    NameSupply,
    Term,
    TOP,
    Variable,
)
from .grammar import (
    DependencyOrder,
    Grammar,
    GrammarKind,
    NontermCall,
    Provenance,
    Rule,
    Symbol,
    Terminal,
    Violation,
    fresh_rename,
    grammar_alpha_equivalent,
    pure_derivation_grammar,
    rule_alpha_equivalent,
    rule_dependency_order,
    rules_in_dependency_order,
    validate_reference_grammar,
)
from .standardize import (
    equivalent,
    is_interaction_free,
    is_standardized,
    reduce_once,
    standardize,
)
from .chart import (
    Chart,
    Edge,
    InputFsa,
    build_backbone_chart,
    check_acyclic,
    specialize,
    specialize_chart,
    string_to_fsa,
)
from .transform import (
    TransformStats,
    partial_evaluate,
    select_lowest_non_if,
    sweep_unreachable,
    to_interaction_free,
    triggering_position,
)
from .solutions import (
    EnumerationStats,
    FeatureStructure,
    certify_interaction_free,
    count_derivations,
    enumerate_solutions,
    iso_equal,
    multiset_iso_equal,
    oracle_enumerate,
    structure_of,
)
from .formats import emit, parse_fsa_file, parse_grammar_file
from . import errors

__version__ = "0.1.0"
