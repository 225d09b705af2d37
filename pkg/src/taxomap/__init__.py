"""Taxonomy alignment by relaxation labelling.

The package maps the synsets of a source sense graph onto a target
graph.  Candidate targets share a word with the source synset; iterated
support from structural, relation and overlap constraints concentrates
each synset's weight on compatible candidates, and links above a
threshold become the mapping.
"""
from .constraints import (
    Connection,
    ConstraintSet,
    GeneralizedConstraint,
    HeuristicConstraint,
    Scope,
    Side,
    SimilarityKind,
    StructuralConstraint,
    DEFAULT_STOPLIST,
    candidate_labels,
    content_words,
    load_stoplist,
    parse_constraint_config,
    similarity,
    total_support,
)
from .errors import (
    ConfigError,
    DependencyError,
    EvalInputError,
    GraphValidationError,
    ParseError,
    RelaxationInvariantError,
    TaxomapError,
    UnknownNodeError,
)
from .evaluate import (
    EvalReport,
    GoldSample,
    PopulationScore,
    evaluate,
    format_gold,
    load_gold_file,
    parse_gold_file,
    render_kv,
    render_table,
)
from .graph import (
    PartOfSpeech,
    RelationType,
    RELATIONS,
    SenseGraph,
    Synset,
    Violation,
    load_graph,
    normalize_word,
    parse_graph,
    serialize_graph,
)
from .pipeline import (
    DEFAULT_PLAN,
    PRESETS,
    Phase,
    PhasePlan,
    PhaseResult,
    build_problem,
    candidate_problem,
    format_mapping,
    load_mapping_file,
    parse_mapping_file,
    plan_from_spec,
    run_all,
    run_phase,
    write_mapping_file,
)
from .relax import (
    Assignment,
    FrozenWeights,
    Mapping,
    MappingProblem,
    RunStats,
    Settings,
    extract_mapping,
    initialize,
    run,
    update_step,
)
from .synth import SynthConfig, generate

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "ConfigError",
    "Connection",
    "ConstraintSet",
    "DEFAULT_PLAN",
    "DEFAULT_STOPLIST",
    "DependencyError",
    "EvalInputError",
    "EvalReport",
    "FrozenWeights",
    "GeneralizedConstraint",
    "GoldSample",
    "GraphValidationError",
    "HeuristicConstraint",
    "Mapping",
    "MappingProblem",
    "ParseError",
    "PartOfSpeech",
    "Phase",
    "PhasePlan",
    "PhaseResult",
    "PopulationScore",
    "PRESETS",
    "RelationType",
    "RELATIONS",
    "RelaxationInvariantError",
    "RunStats",
    "Scope",
    "SenseGraph",
    "Settings",
    "Side",
    "SimilarityKind",
    "StructuralConstraint",
    "SynthConfig",
    "Synset",
    "TaxomapError",
    "UnknownNodeError",
    "Violation",
    "build_problem",
    "candidate_labels",
    "candidate_problem",
    "content_words",
    "evaluate",
    "extract_mapping",
    "format_gold",
    "format_mapping",
    "generate",
    "initialize",
    "load_gold_file",
    "load_graph",
    "load_mapping_file",
    "load_stoplist",
    "normalize_word",
    "parse_constraint_config",
    "parse_gold_file",
    "parse_graph",
    "parse_mapping_file",
    "plan_from_spec",
    "render_kv",
    "render_table",
    "run",
    "run_all",
    "run_phase",
    "serialize_graph",
    "similarity",
    "total_support",
    "update_step",
    "write_mapping_file",
]
