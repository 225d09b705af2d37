"""Lexical sense graphs: synsets, typed relations, traversal, interchange files.

The interchange format is line-oriented UTF-8 text with LF endings.

* nodes file: ``id<TAB>pos<TAB>word1,word2<TAB>gloss<TAB>frame1,frame2``
  where ``pos`` is one of ``n v a r``; the gloss and frame fields may be
  empty, and frames are only legal on verbs.
* edges file: ``relation<TAB>from_id<TAB>to_id``.

Lines starting with ``#`` and blank lines are ignored in both files.
Words are normalized on load: lowercased, internal whitespace joined
with underscores.  No stemming is applied; matching elsewhere in the
package is exact match on the normalized strings.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

from .errors import GraphValidationError, ParseError, UnknownNodeError


class PartOfSpeech(Enum):
    """The four parts of speech a synset may carry."""

    NOUN = "n"
    VERB = "v"
    ADJECTIVE = "a"
    ADVERB = "r"

    def __str__(self) -> str:
        return self.value


POS_BY_CODE = {p.value: p for p in PartOfSpeech}
_N = PartOfSpeech.NOUN
_V = PartOfSpeech.VERB
_A = PartOfSpeech.ADJECTIVE
_R = PartOfSpeech.ADVERB


@dataclass(frozen=True)
class RelationType:
    """A typed edge kind with a part-of-speech signature.

    ``signatures`` lists the (source_pos, target_pos) pairs an edge of
    this type may connect.  ``transitive_ok`` marks the relation kinds
    that form an acyclic hierarchy and therefore support transitive
    traversal.
    """

    name: str
    symmetric: bool
    signatures: frozenset
    transitive_ok: bool = False


def _same_pos(*poses: PartOfSpeech) -> frozenset:
    return frozenset((p, p) for p in poses)


RELATIONS: dict[str, RelationType] = {
    r.name: r
    for r in (
        RelationType("hypernym", False, _same_pos(_N, _V), transitive_ok=True),
        RelationType("hyponym", False, _same_pos(_N, _V), transitive_ok=True),
        RelationType("antonym", True, _same_pos(_N, _V, _A, _R)),
        RelationType("also_see", True, _same_pos(_N, _V, _A, _R)),
        RelationType("similar_to", True, _same_pos(_A)),
        RelationType("participle_of", False, frozenset({(_A, _V)})),
        RelationType("pertains", False, frozenset({(_A, _N)})),
        RelationType("attribute", False, frozenset({(_A, _N)})),
        RelationType("derived_from", False, frozenset({(_R, _A)})),
    )
}

# Mutually inverse directed relations; an edge of one implies the
# mirrored edge of the other.
INVERSES = {"hypernym": "hyponym", "hyponym": "hypernym"}

_WS_RUN = re.compile(r"\s+")


def normalize_word(word: str) -> str:
    """Lowercase a lemma and join internal whitespace with underscores."""
    return _WS_RUN.sub("_", word.strip().lower())


@dataclass(frozen=True)
class Synset:
    """One sense node: an id, a part of speech, its words and payloads."""

    id: str
    pos: PartOfSpeech
    words: tuple
    gloss: str = ""
    frames: frozenset = frozenset()


@dataclass(frozen=True)
class Violation:
    """One invariant breach found by :meth:`SenseGraph.validate`."""

    rule: str
    ids: tuple
    message: str


_EMPTY: frozenset = frozenset()


class SenseGraph:
    """An immutable collection of synsets joined by typed relations.

    Hypernym and hyponym edges are normalized to both directions at
    construction time, so input data only needs one of them.  Instances
    must not be mutated after construction; all traversal methods are
    then safe to call concurrently.
    """

    def __init__(self, synsets: Iterable[Synset], edges: Iterable[tuple], *, normalize: bool = True):
        self.synsets: dict[str, Synset] = {}
        for syn in synsets:
            if syn.id in self.synsets:
                raise ValueError(f"duplicate synset id {syn.id!r}")
            self.synsets[syn.id] = syn

        edge_set: set[tuple] = set()
        for a, b, rel in edges:
            edge_set.add((a, b, rel))
            if normalize and rel in INVERSES:
                edge_set.add((b, a, INVERSES[rel]))
        self.edges: frozenset = frozenset(edge_set)

        self._out: dict[tuple, set] = {}
        self._in: dict[tuple, set] = {}
        for a, b, rel in self.edges:
            self._out.setdefault((a, rel), set()).add(b)
            self._in.setdefault((b, rel), set()).add(a)

        self.word_index = self._build_word_index()
        self._reach: dict[str, dict[str, frozenset]] = {}

    def _build_word_index(self) -> dict:
        index: dict[PartOfSpeech, dict[str, set]] = {p: {} for p in PartOfSpeech}
        for sid, syn in self.synsets.items():
            bucket = index[syn.pos]
            for word in syn.words:
                bucket.setdefault(word, set()).add(sid)
        return {
            pos: {w: frozenset(ids) for w, ids in bucket.items()}
            for pos, bucket in index.items()
        }

    # -- basic access -------------------------------------------------

    def __contains__(self, sid: str) -> bool:
        return sid in self.synsets

    def __eq__(self, other) -> bool:
        if not isinstance(other, SenseGraph):
            return NotImplemented
        return self.synsets == other.synsets and self.edges == other.edges

    def synset(self, sid: str) -> Synset:
        try:
            return self.synsets[sid]
        except KeyError:
            raise UnknownNodeError(f"unknown synset id {sid!r}") from None

    def pos_ids(self, pos: PartOfSpeech) -> tuple:
        """All synset ids of one part of speech, sorted."""
        return tuple(sorted(sid for sid, s in self.synsets.items() if s.pos is pos))

    @staticmethod
    def _rel(rel) -> RelationType:
        if isinstance(rel, RelationType):
            return rel
        try:
            return RELATIONS[rel]
        except KeyError:
            raise ValueError(f"unknown relation {rel!r}") from None

    # -- traversal ----------------------------------------------------

    def immediate(self, sid: str, rel) -> frozenset:
        """Direct rel-neighbors of a node.

        Directed relations follow outgoing edges only; symmetric
        relations return neighbors in both orientations.
        """
        rel = self._rel(rel)
        self.synset(sid)
        out = self._out.get((sid, rel.name), _EMPTY)
        if not rel.symmetric:
            return frozenset(out)
        inc = self._in.get((sid, rel.name), _EMPTY)
        return frozenset(out) | frozenset(inc)

    def transitive(self, sid: str, rel) -> frozenset:
        """Transitive closure of :meth:`immediate`, excluding the node itself.

        Only defined for the acyclic directed relations (hypernym and
        hyponym); anything else raises ``ValueError``.
        """
        rel = self._rel(rel)
        if not rel.transitive_ok:
            raise ValueError(f"relation {rel.name!r} does not support transitive traversal")
        self.synset(sid)
        return self._closures(rel.name).get(sid, _EMPTY)

    def _closures(self, rel_name: str) -> dict:
        """Reachable-set map for one directed relation, computed once."""
        cached = self._reach.get(rel_name)
        if cached is not None:
            return cached
        indeg = {sid: 0 for sid in self.synsets}
        for a, b, rel in self.edges:
            if rel == rel_name and a in indeg and b in indeg:
                indeg[b] += 1
        ready = [sid for sid, d in indeg.items() if d == 0]
        order = []
        while ready:
            node = ready.pop()
            order.append(node)
            for nxt in self._out.get((node, rel_name), _EMPTY):
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    ready.append(nxt)
        if len(order) < len(indeg):
            stuck = tuple(sorted(sid for sid, d in indeg.items() if d > 0))
            raise GraphValidationError(
                [Violation("hypernym-cycle", stuck, f"cycle through {', '.join(stuck)}")]
            )
        closures: dict[str, frozenset] = {}
        for node in reversed(order):
            direct = self._out.get((node, rel_name))
            if not direct:
                continue
            acc = set(direct)
            for nxt in direct:
                acc |= closures.get(nxt, _EMPTY)
            closures[node] = frozenset(acc)
        self._reach[rel_name] = closures
        return closures

    # -- validation ---------------------------------------------------

    def validate(self) -> list:
        """Check every structural invariant; returns a list of violations.

        An empty list means the graph is well formed.  Each violation
        names the rule it breaks and the offending ids.
        """
        out: list[Violation] = []
        for sid in sorted(self.synsets):
            syn = self.synsets[sid]
            if not syn.words:
                out.append(Violation("empty-words", (sid,), f"synset {sid} has no words"))
            for w in syn.words:
                if w != normalize_word(w):
                    out.append(
                        Violation("word-normalization", (sid,), f"word {w!r} of {sid} is not normalized")
                    )
            if syn.frames and syn.pos is not PartOfSpeech.VERB:
                out.append(
                    Violation("pos-payload", (sid,), f"non-verb synset {sid} carries verb frames")
                )
        for a, b, rel_name in sorted(self.edges):
            rel = RELATIONS.get(rel_name)
            if rel is None:
                out.append(Violation("unknown-relation", (a, b), f"unknown relation {rel_name!r}"))
                continue
            missing = [sid for sid in (a, b) if sid not in self.synsets]
            if missing:
                out.append(
                    Violation(
                        "unknown-endpoint",
                        tuple(missing),
                        f"{rel_name} edge {a} -> {b} references unknown ids {missing}",
                    )
                )
                continue
            sig = (self.synsets[a].pos, self.synsets[b].pos)
            if sig not in rel.signatures:
                out.append(
                    Violation(
                        "pos-signature",
                        (a, b),
                        f"{rel_name} edge {a} -> {b} connects {sig[0]} to {sig[1]}",
                    )
                )
            if rel_name in INVERSES and (b, a, INVERSES[rel_name]) not in self.edges:
                out.append(
                    Violation(
                        "inverse-closure",
                        (a, b),
                        f"{rel_name} edge {a} -> {b} lacks its {INVERSES[rel_name]} mirror",
                    )
                )
        for pos in PartOfSpeech:
            cyclic = self._hypernym_cycle_ids(pos)
            if cyclic:
                out.append(
                    Violation(
                        "hypernym-cycle",
                        cyclic,
                        f"hypernym cycle among {', '.join(cyclic)}",
                    )
                )
        if self._build_word_index() != self.word_index:
            out.append(Violation("word-index", (), "word index does not match synset words"))
        return out

    def _hypernym_cycle_ids(self, pos: PartOfSpeech) -> tuple:
        nodes = {sid for sid, s in self.synsets.items() if s.pos is pos}
        succ: dict[str, list] = {sid: [] for sid in nodes}
        indeg = {sid: 0 for sid in nodes}
        for a, b, rel in self.edges:
            if rel == "hypernym" and a in nodes and b in nodes:
                succ[a].append(b)
                indeg[b] += 1
        ready = [sid for sid in nodes if indeg[sid] == 0]
        done = 0
        while ready:
            node = ready.pop()
            done += 1
            for nxt in succ[node]:
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    ready.append(nxt)
        if done == len(nodes):
            return ()
        return tuple(sorted(sid for sid in nodes if indeg[sid] > 0))


# -- interchange files ---------------------------------------------------


def _records(source) -> Iterator[tuple]:
    """Yield (line_number, payload) pairs, skipping blanks and comments."""
    lines = source.splitlines() if isinstance(source, str) else source
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield lineno, line


def parse_graph(nodes, edges, *, nodes_path: str | None = None, edges_path: str | None = None) -> SenseGraph:
    """Parse the two interchange files into a validated graph.

    ``nodes`` and ``edges`` may be strings or iterables of lines.
    Format problems raise :class:`ParseError` with the line number;
    structural problems (for example a hypernym cycle) raise
    :class:`GraphValidationError`.
    """
    synsets: list[Synset] = []
    first_line: dict[str, int] = {}
    for lineno, line in _records(nodes):
        fields = line.split("\t")
        if len(fields) != 5:
            raise ParseError(
                f"expected 5 tab-separated fields, got {len(fields)}",
                line=lineno,
                path=nodes_path,
            )
        sid, pos_code, words_field, gloss, frames_field = fields
        if not sid:
            raise ParseError("empty synset id", line=lineno, path=nodes_path)
        if sid in first_line:
            raise ParseError(
                f"duplicate synset id {sid!r}, first defined on line {first_line[sid]}",
                line=lineno,
                path=nodes_path,
            )
        first_line[sid] = lineno
        pos = POS_BY_CODE.get(pos_code)
        if pos is None:
            raise ParseError(f"unknown pos code {pos_code!r}", line=lineno, path=nodes_path)
        words = tuple(normalize_word(w) for w in words_field.split(",") if w.strip())
        if not words:
            raise ParseError(f"synset {sid} has no words", line=lineno, path=nodes_path)
        frames = frozenset()
        if frames_field:
            try:
                frames = frozenset(int(f) for f in frames_field.split(","))
            except ValueError:
                raise ParseError(
                    f"bad frame list {frames_field!r}", line=lineno, path=nodes_path
                ) from None
        if frames and pos is not PartOfSpeech.VERB:
            raise ParseError(
                f"synset {sid} is not a verb but carries frames", line=lineno, path=nodes_path
            )
        synsets.append(Synset(sid, pos, words, gloss, frames))

    known = {s.id for s in synsets}
    pos_of = {s.id: s.pos for s in synsets}
    triples: list[tuple] = []
    for lineno, line in _records(edges):
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(
                f"expected 3 tab-separated fields, got {len(fields)}",
                line=lineno,
                path=edges_path,
            )
        rel_name, a, b = fields
        rel = RELATIONS.get(rel_name)
        if rel is None:
            raise ParseError(f"unknown relation {rel_name!r}", line=lineno, path=edges_path)
        for sid in (a, b):
            if sid not in known:
                raise ParseError(
                    f"{rel_name} edge references unknown id {sid!r}", line=lineno, path=edges_path
                )
        if (pos_of[a], pos_of[b]) not in rel.signatures:
            raise ParseError(
                f"{rel_name} edge {a} -> {b} connects {pos_of[a]} to {pos_of[b]}",
                line=lineno,
                path=edges_path,
            )
        triples.append((a, b, rel_name))

    graph = SenseGraph(synsets, triples)
    violations = graph.validate()
    if violations:
        raise GraphValidationError(violations)
    return graph


def load_graph(nodes_path, edges_path) -> SenseGraph:
    """Read and parse a graph from its two interchange files."""
    with open(nodes_path, encoding="utf-8") as fh:
        nodes = fh.read()
    with open(edges_path, encoding="utf-8") as fh:
        edges = fh.read()
    return parse_graph(nodes, edges, nodes_path=str(nodes_path), edges_path=str(edges_path))


def serialize_graph(graph: SenseGraph) -> tuple:
    """Render a graph back to (nodes_text, edges_text).

    Output is deterministic: synsets sorted by id, edges sorted by
    relation and endpoints.  Derived hyponym mirrors are omitted, the
    parser recreates them.  Round-trips: parsing the output yields a
    graph equal to the input.
    """
    node_lines = []
    for sid in sorted(graph.synsets):
        syn = graph.synsets[sid]
        if "\t" in syn.gloss or "\n" in syn.gloss:
            raise ValueError(f"gloss of {sid} contains reserved characters")
        frames = ",".join(str(f) for f in sorted(syn.frames))
        node_lines.append(f"{sid}\t{syn.pos.value}\t{','.join(syn.words)}\t{syn.gloss}\t{frames}")
    edge_lines = [
        f"{rel}\t{a}\t{b}"
        for rel, a, b in sorted((rel, a, b) for a, b, rel in graph.edges if rel != "hyponym")
    ]
    nodes_text = "\n".join(node_lines) + ("\n" if node_lines else "")
    edges_text = "\n".join(edge_lines) + ("\n" if edge_lines else "")
    return nodes_text, edges_text
