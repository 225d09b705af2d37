"""Test-side reference implementations and graph builders.

The oracle in this module recomputes connection support from raw edge
triples with its own traversal and tokenization.  It never calls the
package's neighborhood, similarity or support code, so agreement
between the two is meaningful.
"""
from __future__ import annotations

import math
import random
import re

from taxomap import (
    ConstraintSet,
    GeneralizedConstraint,
    HeuristicConstraint,
    PartOfSpeech,
    Scope,
    SenseGraph,
    Side,
    SimilarityKind,
    StructuralConstraint,
    Synset,
)

# Relation facts duplicated on purpose; the oracle must not consult the
# package catalog.
SYMMETRIC = {"antonym", "also_see", "similar_to"}
INVERSE = {"hypernym": "hyponym", "hyponym": "hypernym"}

_WORD = re.compile(r"[a-z0-9_']+")


def make_graph(nodes, edges=()):
    """nodes: (id, pos_code, words, [gloss, [frames]]) tuples."""
    synsets = []
    for spec in nodes:
        sid, code, words = spec[0], spec[1], spec[2]
        gloss = spec[3] if len(spec) > 3 else ""
        frames = frozenset(spec[4]) if len(spec) > 4 else frozenset()
        pos = {p.value: p for p in PartOfSpeech}[code]
        synsets.append(Synset(sid, pos, tuple(words), gloss, frames))
    return SenseGraph(synsets, edges)


# -- independent support oracle ---------------------------------------------


def _neighbors(triples, sid, relation):
    out = set()
    for a, b, rel in triples:
        if rel == relation and a == sid:
            out.add(b)
        elif relation in SYMMETRIC and rel == relation and b == sid:
            out.add(a)
        elif rel == INVERSE.get(relation) and b == sid:
            out.add(a)
    return out


def _reachable(triples, sid, relation):
    """All nodes at least one hop away along one directed relation."""
    seen = set()
    frontier = [sid]
    while frontier:
        node = frontier.pop()
        for nxt in _neighbors(triples, node, relation):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def _scope(triples, sid, relation, scope):
    if scope is Scope.IMMEDIATE:
        return _neighbors(triples, sid, relation)
    return _reachable(triples, sid, relation)


def _tokens(text, stoplist):
    return {tok for tok in _WORD.findall(text.lower()) if tok not in stoplist}


def oracle_total_support(conn, cs, weights, frozen_weights, src, tgt, stoplist):
    """Brute-force support for one connection.

    ``weights`` and each ``frozen_weights[pos]`` are plain
    ``{(source_id, target_id): weight}`` dicts.  ``src`` and ``tgt`` are
    SenseGraphs used only for synset payload lookups and their raw
    ``edges`` triples.
    """
    src_triples = sorted(src.edges)
    tgt_triples = sorted(tgt.edges)
    sides = {
        Side.HYPERNYM: ("hypernym",),
        Side.HYPONYM: ("hyponym",),
        Side.BOTH: ("hypernym", "hyponym"),
    }
    parts = []
    weight_total = []
    for c in cs.structural:
        found = []
        for relation in sides[c.side]:
            for s2 in _scope(src_triples, conn.source, relation, c.source_scope):
                for t2 in _scope(tgt_triples, conn.target, relation, c.target_scope):
                    found.append(weights.get((s2, t2), 0.0))
        parts.append(c.weight * math.fsum(found))
        weight_total.append(c.weight)
    pos = src.synsets[conn.source].pos
    for c in cs.generalized:
        found = []
        for s2 in _neighbors(src_triples, conn.source, c.relation):
            pos2 = src.synsets[s2].pos
            table = weights if pos2 is pos else frozen_weights[pos2]
            for t2 in _neighbors(tgt_triples, conn.target, c.relation):
                found.append(table.get((s2, t2), 0.0))
        parts.append(c.weight * math.fsum(found))
        weight_total.append(c.weight)
    s_syn = src.synsets[conn.source]
    t_syn = tgt.synsets[conn.target]
    for c in cs.heuristic:
        if c.kind is SimilarityKind.WORDS:
            left, right = set(s_syn.words), set(t_syn.words)
        elif c.kind is SimilarityKind.GLOSS:
            left, right = _tokens(s_syn.gloss, stoplist), _tokens(t_syn.gloss, stoplist)
        else:
            left, right = set(s_syn.frames), set(t_syn.frames)
        norm = max(1, min(len(left), len(right)))
        parts.append(c.weight * len(left & right) / norm)
        weight_total.append(c.weight)
    return math.fsum(parts) / math.fsum(weight_total)


def assignment_as_dict(assignment):
    out = {}
    for var, labels, vec in assignment.items():
        for t, w in zip(labels, vec):
            out[(var, t)] = float(w)
    return out


# -- randomized problems for oracle comparisons ------------------------------

_STRUCTURAL_GRID = [
    StructuralConstraint(side, s_scope, t_scope)
    for side in Side
    for s_scope in Scope
    for t_scope in Scope
]


def random_constraint_set(rng, pos, with_cross_pos):
    structural = []
    generalized = []
    heuristic = []
    if pos in (PartOfSpeech.NOUN, PartOfSpeech.VERB):
        for c in _STRUCTURAL_GRID:
            if rng.random() < 0.4:
                structural.append(
                    StructuralConstraint(c.side, c.source_scope, c.target_scope,
                                         weight=rng.choice((0.5, 1.0, 2.0)))
                )
        if rng.random() < 0.5:
            generalized.append(GeneralizedConstraint("antonym", rng.choice((0.5, 1.0))))
    else:
        generalized.append(GeneralizedConstraint("antonym", rng.choice((0.5, 1.0))))
        if rng.random() < 0.5:
            generalized.append(GeneralizedConstraint("similar_to"))
        if with_cross_pos:
            generalized.append(GeneralizedConstraint("participle_of", rng.choice((1.0, 2.0))))
            generalized.append(GeneralizedConstraint("pertains"))
    if rng.random() < 0.8:
        heuristic.append(HeuristicConstraint(SimilarityKind.WORDS, rng.choice((0.5, 1.0))))
    if rng.random() < 0.8:
        heuristic.append(HeuristicConstraint(SimilarityKind.GLOSS))
    if pos is PartOfSpeech.VERB and rng.random() < 0.5:
        heuristic.append(HeuristicConstraint(SimilarityKind.FRAMES))
    if not (structural or generalized or heuristic):
        heuristic.append(HeuristicConstraint(SimilarityKind.WORDS))
    return ConstraintSet(
        structural=tuple(structural),
        generalized=tuple(generalized),
        heuristic=tuple(heuristic),
    )
