import pytest

from taxomap import (
    ConstraintSet,
    GeneralizedConstraint,
    HeuristicConstraint,
    MappingProblem,
    PartOfSpeech,
    Scope,
    Side,
    SimilarityKind,
    StructuralConstraint,
    build_problem,
)

from helpers import make_graph

W_ONLY = ConstraintSet(heuristic=(HeuristicConstraint(SimilarityKind.WORDS),))
IIB = ConstraintSet(
    structural=(StructuralConstraint(Side.BOTH, Scope.IMMEDIATE, Scope.IMMEDIATE),)
)


@pytest.fixture
def nested_context_pair():
    """A mid-chain synset with one structurally supported candidate.

    Source: parent sp above sx above leaves sy, sz.  Target mirrors it
    (tp, tx, ty, tz) and adds two isolated synsets tx2, tx3 that share
    sx's word, so sx has three candidates and only tx agrees with the
    context connections sp->tp, sy->ty, sz->tz.
    """
    source = make_graph(
        [
            ("sp", "n", ["parent"]),
            ("sx", "n", ["x"]),
            ("sy", "n", ["leafy"]),
            ("sz", "n", ["leafz"]),
        ],
        [("sx", "sp", "hypernym"), ("sy", "sx", "hypernym"), ("sz", "sx", "hypernym")],
    )
    target = make_graph(
        [
            ("tp", "n", ["parent"]),
            ("tx", "n", ["x"]),
            ("ty", "n", ["leafy"]),
            ("tz", "n", ["leafz"]),
            ("tx2", "n", ["x"]),
            ("tx3", "n", ["x"]),
        ],
        [("tx", "tp", "hypernym"), ("ty", "tx", "hypernym"), ("tz", "tx", "hypernym")],
    )
    return source, target


@pytest.fixture
def nested_context_problem(nested_context_pair):
    source, target = nested_context_pair
    return build_problem(source, target, PartOfSpeech.NOUN, IIB)


@pytest.fixture
def tie_pair():
    """Two target candidates that nothing can tell apart."""
    source = make_graph(
        [("sp", "n", ["parent"]), ("sx", "n", ["twin"])],
        [("sx", "sp", "hypernym")],
    )
    target = make_graph(
        [
            ("tp", "n", ["parent"]),
            ("t1", "n", ["twin"], "same gloss either way"),
            ("t2", "n", ["twin"], "same gloss either way"),
        ],
        [("t1", "tp", "hypernym"), ("t2", "tp", "hypernym")],
    )
    return source, target


@pytest.fixture
def participle_pair():
    """Adjective resolvable only through its verb's mapping.

    sa shares its word with ta1 and ta2; word and gloss overlap are
    symmetric.  Only the participle link (sa to sv, ta1 to tv, ta2 to a
    different verb) separates the candidates, and it needs the frozen
    verb phase.
    """
    source = make_graph(
        [
            ("sa", "a", ["bent"], "shape adjective"),
            ("sv", "v", ["bend"], "verb gloss"),
        ],
        [("sa", "sv", "participle_of")],
    )
    target = make_graph(
        [
            ("ta1", "a", ["bent"], "shape adjective"),
            ("ta2", "a", ["bent"], "shape adjective"),
            ("tv", "v", ["bend"], "verb gloss"),
            ("tv2", "v", ["fold"], "verb gloss"),
        ],
        [("ta1", "tv", "participle_of"), ("ta2", "tv2", "participle_of")],
    )
    return source, target


ADJ_WITH_PARTICIPLE = ConstraintSet(
    generalized=(GeneralizedConstraint("participle_of"),),
    heuristic=(
        HeuristicConstraint(SimilarityKind.WORDS),
        HeuristicConstraint(SimilarityKind.GLOSS),
    ),
)
ADJ_WITHOUT_PARTICIPLE = ConstraintSet(
    heuristic=(
        HeuristicConstraint(SimilarityKind.WORDS),
        HeuristicConstraint(SimilarityKind.GLOSS),
    ),
)
