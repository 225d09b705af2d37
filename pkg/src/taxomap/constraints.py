"""Candidate generation, similarity measures and per-connection support.

A connection links one source synset to one candidate target synset.
Constraints score how well a connection agrees with its context:

* structural constraints look at hypernym/hyponym neighborhoods on both
  sides and sum the current weights of context connections;
* generalized constraints do the same over any single relation kind,
  reading frozen weights from earlier phases when the relation crosses
  into another part of speech;
* heuristic constraints compare word, gloss or frame overlap and do not
  depend on the solver state at all.

Every sum here goes through ``math.fsum``, which returns the correctly
rounded value of the exact sum.  Results therefore do not depend on
enumeration order, which keeps the solver bit-for-bit reproducible.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from .errors import ConfigError, DependencyError, ParseError
from .graph import POS_BY_CODE, RELATIONS, PartOfSpeech, SenseGraph, Synset, _records

# Small bundled list of English function words used when comparing
# glosses; override with a stoplist file for other corpora.
DEFAULT_STOPLIST = frozenset(
    """
    a an the and or nor but if then else when while as of to in on at by
    for with from into onto over under between through during before
    after above below up down out off again is are was were be been
    being am do does did have has had having not no so too very can
    could will would shall should may might must this that these those
    it its they them their
    """.split()
)


class Side(Enum):
    """Which half of the hierarchy a structural constraint inspects."""

    HYPERNYM = "e"
    HYPONYM = "o"
    BOTH = "b"


class Scope(Enum):
    """Immediate neighbors only, or the whole transitive closure."""

    IMMEDIATE = "i"
    TRANSITIVE = "a"


class SimilarityKind(Enum):
    WORDS = "w"
    GLOSS = "g"
    FRAMES = "f"


@dataclass(frozen=True)
class Connection:
    """One (source synset, candidate target synset) pair."""

    source: str
    target: str


@dataclass(frozen=True)
class StructuralConstraint:
    side: Side
    source_scope: Scope
    target_scope: Scope
    weight: float = 1.0

    @property
    def code(self) -> str:
        """Two scope letters then the side letter, e.g. ``aab``."""
        return f"{self.source_scope.value}{self.target_scope.value}{self.side.value}"

    @property
    def label(self) -> str:
        return f"structural {self.source_scope.value}{self.target_scope.value} {self.side.value}"


@dataclass(frozen=True)
class GeneralizedConstraint:
    relation: str
    weight: float = 1.0

    @property
    def label(self) -> str:
        return f"generalized {self.relation}"


@dataclass(frozen=True)
class HeuristicConstraint:
    kind: SimilarityKind
    weight: float = 1.0

    @property
    def label(self) -> str:
        return f"heuristic {self.kind.value}"


@dataclass(frozen=True)
class ConstraintSet:
    """The constraints driving one mapping problem, with their weights."""

    structural: tuple = ()
    generalized: tuple = ()
    heuristic: tuple = ()

    def __post_init__(self):
        if not (self.structural or self.generalized or self.heuristic):
            raise ConfigError("a constraint set needs at least one constraint")
        for c in self:
            if c.weight < 0:
                raise ConfigError(f"negative weight on {c.label}")
        for c in self.generalized:
            if c.relation not in RELATIONS:
                raise ConfigError(f"unknown relation {c.relation!r} in constraint set")
        if self.total_weight <= 0:
            raise ConfigError("total constraint weight must be positive")

    def __iter__(self):
        yield from self.structural
        yield from self.generalized
        yield from self.heuristic

    @property
    def total_weight(self) -> float:
        return math.fsum(c.weight for c in self)


# -- candidates and similarity --------------------------------------------


def candidate_labels(source_synset: Synset, target: SenseGraph) -> list:
    """Target synsets sharing at least one word, same part of speech.

    Returns ids sorted for determinism; an empty list marks the source
    synset as unmappable.
    """
    index = target.word_index[source_synset.pos]
    hits: set = set()
    for word in source_synset.words:
        hits |= index.get(word, frozenset())
    return sorted(hits)


_TOKEN = re.compile(r"[a-z0-9_']+")


def content_words(text: str, stoplist=DEFAULT_STOPLIST) -> frozenset:
    """Normalized gloss tokens minus punctuation and the stoplist."""
    tokens = (t.strip("'") for t in _TOKEN.findall(text.lower()))
    return frozenset(t for t in tokens if t and t not in stoplist)


def _compared_sets(kind: SimilarityKind, s: Synset, t: Synset, stoplist):
    if kind is SimilarityKind.WORDS:
        return set(s.words), set(t.words)
    if kind is SimilarityKind.GLOSS:
        return content_words(s.gloss, stoplist), content_words(t.gloss, stoplist)
    if s.pos is not PartOfSpeech.VERB or t.pos is not PartOfSpeech.VERB:
        raise ValueError("frame similarity is only defined between verb synsets")
    return s.frames, t.frames


def similarity(kind: SimilarityKind, s: Synset, t: Synset, stoplist=DEFAULT_STOPLIST) -> int:
    """Shared-element count for one similarity kind."""
    left, right = _compared_sets(kind, s, t, stoplist)
    return len(left & right)


# -- support --------------------------------------------------------------


_SIDE_RELS = {
    Side.HYPERNYM: ("hypernym",),
    Side.HYPONYM: ("hyponym",),
    Side.BOTH: ("hypernym", "hyponym"),
}


def _scope_set(graph: SenseGraph, sid: str, rel_name: str, scope: Scope) -> frozenset:
    if scope is Scope.IMMEDIATE:
        return graph.immediate(sid, rel_name)
    return graph.transitive(sid, rel_name)


def structural_contributions(conn, c, state, src, tgt) -> list:
    """Context pairs feeding one structural constraint, with weights.

    Only nonzero entries are reported; the support value is their sum
    times the constraint weight.
    """
    out = []
    for rel_name in _SIDE_RELS[c.side]:
        sources = _scope_set(src, conn.source, rel_name, c.source_scope)
        targets = _scope_set(tgt, conn.target, rel_name, c.target_scope)
        if not sources or not targets:
            continue
        for s2 in sorted(sources):
            for t2 in sorted(targets):
                w = state.weight(s2, t2)
                if w:
                    out.append((s2, t2, w))
    return out


def structural_support(conn, c, state, src, tgt) -> float:
    """Weighted sum of context-connection weights in the constraint's scopes."""
    return c.weight * math.fsum(w for _, _, w in structural_contributions(conn, c, state, src, tgt))


def generalized_contributions(conn, c, state, frozen, src, tgt) -> list:
    """Context pairs joined by one relation kind, with their weights.

    Same-POS context reads the live state; context in another part of
    speech reads the frozen weights of an earlier phase and raises
    :class:`DependencyError` if that phase is missing.
    """
    pos = src.synset(conn.source).pos
    sources = src.immediate(conn.source, c.relation)
    targets = tgt.immediate(conn.target, c.relation)
    out = []
    for s2 in sorted(sources):
        pos2 = src.synset(s2).pos
        if pos2 is pos:
            lookup = state.weight
        else:
            provider = frozen.get(pos2) if frozen else None
            if provider is None:
                raise DependencyError(
                    f"relation {c.relation!r} reaches pos '{pos2.value}' but no frozen mapping for it was given"
                )
            lookup = provider.weight
        for t2 in sorted(targets):
            w = lookup(s2, t2)
            if w:
                out.append((s2, t2, w))
    return out


def generalized_support(conn, c, state, frozen, src, tgt) -> float:
    return c.weight * math.fsum(
        w for _, _, w in generalized_contributions(conn, c, state, frozen, src, tgt)
    )


def heuristic_support(conn, c, src, tgt, stoplist=DEFAULT_STOPLIST) -> float:
    """Overlap count scaled into [0, weight] by the smaller compared set."""
    s = src.synset(conn.source)
    t = tgt.synset(conn.target)
    left, right = _compared_sets(c.kind, s, t, stoplist)
    norm = max(1, min(len(left), len(right)))
    return c.weight * len(left & right) / norm


def total_support(conn, cs, state, frozen, src, tgt, stoplist=DEFAULT_STOPLIST) -> float:
    """Sum of all constraint supports, normalized by total constraint weight."""
    parts = [structural_support(conn, c, state, src, tgt) for c in cs.structural]
    parts += [generalized_support(conn, c, state, frozen, src, tgt) for c in cs.generalized]
    parts += [heuristic_support(conn, c, src, tgt, stoplist) for c in cs.heuristic]
    return math.fsum(parts) / cs.total_weight


def total_support_parts(conn, cs, state, frozen, src, tgt, stoplist=DEFAULT_STOPLIST) -> list:
    """Per-constraint breakdown used by the trace output.

    Returns (label, value, contributions) triples; contributions is
    None for heuristic constraints, which have no context pairs.
    """
    parts = []
    for c in cs.structural:
        contribs = structural_contributions(conn, c, state, src, tgt)
        parts.append((c.label, c.weight * math.fsum(w for _, _, w in contribs), contribs))
    for c in cs.generalized:
        contribs = generalized_contributions(conn, c, state, frozen, src, tgt)
        parts.append((c.label, c.weight * math.fsum(w for _, _, w in contribs), contribs))
    for c in cs.heuristic:
        parts.append((c.label, heuristic_support(conn, c, src, tgt, stoplist), None))
    return parts


class CompiledSupport:
    """Per-problem support evaluator with precomputed contribution indexes.

    For every connection the support is the sum, in constraint order,
    of parts: either a constant (heuristic overlap, frozen cross-POS
    weights) or ``weight * fsum(state[slots])`` over a fixed index
    array.  Because fsum is exactly rounded, the result is bit-equal to
    :func:`total_support` on the same state.
    """

    def __init__(self, problem):
        cs = problem.constraints
        self._total_weight = cs.total_weight
        self._n_slots = problem.n_slots
        self._programs = []
        src, tgt = problem.source, problem.target
        for vi, var in enumerate(problem.variables):
            for t1 in problem.labels[vi]:
                conn = Connection(var, t1)
                parts = []
                for c in cs.structural:
                    slots = self._structural_slots(problem, conn, c)
                    if slots:
                        parts.append((c.weight, np.asarray(slots, dtype=np.intp)))
                for c in cs.generalized:
                    part = self._generalized_part(problem, conn, c)
                    if part is not None:
                        parts.append(part)
                for c in cs.heuristic:
                    const = heuristic_support(conn, c, src, tgt, problem.stoplist)
                    if const:
                        parts.append(const)
                self._programs.append(parts)

    @staticmethod
    def _structural_slots(problem, conn, c) -> list:
        slots = []
        for rel_name in _SIDE_RELS[c.side]:
            sources = _scope_set(problem.source, conn.source, rel_name, c.source_scope)
            if not sources:
                continue
            targets = _scope_set(problem.target, conn.target, rel_name, c.target_scope)
            if not targets:
                continue
            for s2 in sources:
                vj = problem.var_index.get(s2)
                if vj is None:
                    continue
                for t2, slot in problem.label_slots[vj].items():
                    if t2 in targets:
                        slots.append(slot)
        return slots

    @staticmethod
    def _generalized_part(problem, conn, c):
        pos = problem.pos
        sources = problem.source.immediate(conn.source, c.relation)
        if not sources:
            return None
        targets = problem.target.immediate(conn.target, c.relation)
        slots = []
        consts = []
        for s2 in sources:
            pos2 = problem.source.synset(s2).pos
            if pos2 is pos:
                vj = problem.var_index.get(s2)
                if vj is None:
                    continue
                for t2, slot in problem.label_slots[vj].items():
                    if t2 in targets:
                        slots.append(slot)
            else:
                provider = problem.frozen.get(pos2)
                if provider is None:
                    raise DependencyError(
                        f"relation {c.relation!r} reaches pos '{pos2.value}' but no frozen mapping for it was given"
                    )
                consts.extend(provider.weight(s2, t2) for t2 in targets)
        if slots and consts:
            # The catalog fixes the target POS per source POS, so a single
            # constraint never mixes live and frozen context.
            raise ConfigError(f"relation {c.relation!r} mixes live and frozen context")
        if slots:
            return (c.weight, np.asarray(slots, dtype=np.intp))
        if consts:
            const = c.weight * math.fsum(consts)
            return const if const else None
        return None

    def supports(self, flat: np.ndarray) -> np.ndarray:
        """Normalized support for every connection, aligned with the state."""
        out = np.zeros(self._n_slots)
        tw = self._total_weight
        fsum = math.fsum
        for slot, parts in enumerate(self._programs):
            if not parts:
                continue
            vals = [
                p if isinstance(p, float) else p[0] * fsum(flat[p[1]])
                for p in parts
            ]
            out[slot] = fsum(vals) / tw
        return out


# -- constraint set configuration files ------------------------------------


@dataclass(frozen=True)
class ConstraintConfig:
    """Parsed constraint configuration: a default set plus per-POS overrides."""

    default: ConstraintSet | None = None
    per_pos: Mapping = field(default_factory=dict)
    stoplist_path: str | None = None

    def set_for(self, pos: PartOfSpeech, presets: Mapping) -> ConstraintSet:
        if pos in self.per_pos:
            return self.per_pos[pos]
        if self.default is not None:
            return self.default
        return presets[pos]


_SCOPE_BY_CODE = {s.value: s for s in Scope}
_SIDE_BY_CODE = {s.value: s for s in Side}
_SIM_BY_CODE = {k.value: k for k in SimilarityKind}


def _parse_weight(token: str, lineno: int, path) -> float:
    try:
        weight = float(token)
    except ValueError:
        raise ParseError(f"bad weight {token!r}", line=lineno, path=path) from None
    if weight < 0:
        raise ParseError(f"negative weight {token!r}", line=lineno, path=path)
    return weight


def parse_constraint_config(source, *, path: str | None = None) -> ConstraintConfig:
    """Parse a constraint configuration file.

    The grammar is line oriented; ``#`` comments and blank lines are
    ignored.  Lines before any section header define the default set,
    a ``[n]`` ``[v]`` ``[a]`` ``[r]`` header starts the override for
    one part of speech.  Directives:

    * ``structural <scopes> <side> <weight>`` with scopes two letters
      from ``i`` (immediate) and ``a`` (transitive ancestors), source
      then target, and side ``e`` (hypernym), ``o`` (hyponym) or ``b``;
    * ``generalized <relation> <weight>``;
    * ``heuristic <w|g|f> <weight>``;
    * ``stoplist <path>`` naming a one-word-per-line stoplist file.
    """
    buckets: dict = {None: []}
    current = None
    stoplist_path = None
    for lineno, line in _records(source):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            code = stripped[1:-1].strip()
            pos = POS_BY_CODE.get(code)
            if pos is None:
                raise ParseError(f"unknown section {stripped!r}", line=lineno, path=path)
            current = pos
            buckets.setdefault(pos, [])
            continue
        tokens = stripped.split()
        kind = tokens[0]
        if kind == "stoplist":
            parts = stripped.split(None, 1)
            if len(parts) != 2:
                raise ParseError("stoplist needs a path", line=lineno, path=path)
            stoplist_path = parts[1].strip()
        elif kind == "structural":
            if len(tokens) != 4:
                raise ParseError(
                    "expected: structural <scopes> <side> <weight>", line=lineno, path=path
                )
            scopes, side_code, weight_tok = tokens[1], tokens[2], tokens[3]
            if len(scopes) != 2 or any(ch not in _SCOPE_BY_CODE for ch in scopes):
                raise ParseError(f"bad scope pair {scopes!r}", line=lineno, path=path)
            if side_code not in _SIDE_BY_CODE:
                raise ParseError(f"bad side {side_code!r}", line=lineno, path=path)
            buckets[current].append(
                StructuralConstraint(
                    _SIDE_BY_CODE[side_code],
                    _SCOPE_BY_CODE[scopes[0]],
                    _SCOPE_BY_CODE[scopes[1]],
                    _parse_weight(weight_tok, lineno, path),
                )
            )
        elif kind == "generalized":
            if len(tokens) != 3:
                raise ParseError(
                    "expected: generalized <relation> <weight>", line=lineno, path=path
                )
            if tokens[1] not in RELATIONS:
                raise ParseError(f"unknown relation {tokens[1]!r}", line=lineno, path=path)
            buckets[current].append(
                GeneralizedConstraint(tokens[1], _parse_weight(tokens[2], lineno, path))
            )
        elif kind == "heuristic":
            if len(tokens) != 3:
                raise ParseError("expected: heuristic <w|g|f> <weight>", line=lineno, path=path)
            if tokens[1] not in _SIM_BY_CODE:
                raise ParseError(f"unknown similarity kind {tokens[1]!r}", line=lineno, path=path)
            buckets[current].append(
                HeuristicConstraint(_SIM_BY_CODE[tokens[1]], _parse_weight(tokens[2], lineno, path))
            )
        else:
            raise ParseError(f"unknown directive {kind!r}", line=lineno, path=path)

    def build(constraints, where):
        try:
            return ConstraintSet(
                structural=tuple(c for c in constraints if isinstance(c, StructuralConstraint)),
                generalized=tuple(c for c in constraints if isinstance(c, GeneralizedConstraint)),
                heuristic=tuple(c for c in constraints if isinstance(c, HeuristicConstraint)),
            )
        except ConfigError as exc:
            raise ConfigError(f"{where}: {exc}") from None

    default = build(buckets[None], "default section") if buckets[None] else None
    per_pos = {
        pos: build(lines, f"section [{pos.value}]")
        for pos, lines in buckets.items()
        if pos is not None
    }
    return ConstraintConfig(default=default, per_pos=per_pos, stoplist_path=stoplist_path)


def load_stoplist(path) -> frozenset:
    """Read a stoplist file: one word per line, ``#`` comments allowed."""
    from .graph import normalize_word

    with open(path, encoding="utf-8") as fh:
        return frozenset(normalize_word(line) for _, line in _records(fh.read()))
