"""Seeded synthetic graph pairs with a known gold mapping.

The generator builds a source graph (random hypernym hierarchies for
nouns and verbs, relation clusters for adjectives and adverbs), copies
it into a target graph, then perturbs the copy:

* ``node_delete`` removes a target synset, so the source one has no
  counterpart;
* ``node_split`` adds a twin next to a target synset, so the gold entry
  becomes a set of both parts;
* ``word_rename`` replaces a target synset's words, which breaks
  candidate sharing;
* ``edge_rewire`` moves hypernym edges to random acyclic positions,
  perturbing structure without touching the gold mapping.

Everything is driven by one seed: the same configuration always yields
byte-identical graphs and gold files.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping

from .errors import ConfigError
from .evaluate import GoldSample
from .graph import PartOfSpeech, SenseGraph, Synset
from .graph import POS_BY_CODE

_GLOSS_POOL = tuple(f"g{i:02d}" for i in range(50))
_SECOND_PARENT_RATE = 0.08

_DEFAULT_RELATIONS = (
    "hypernym",
    "antonym",
    "also_see",
    "similar_to",
    "participle_of",
    "pertains",
    "attribute",
    "derived_from",
)


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for one generated graph pair.

    ``node_count`` sizes a noun-only graph; ``pos_counts`` (codes to
    counts, e.g. ``{"n": 190, "v": 100}``) overrides it for mixed
    graphs.  ``polysemy`` is the chance a word is drawn from the shared
    per-POS pool of ``word_pool`` lemmas instead of being unique.
    """

    seed: int = 0
    node_count: int = 100
    pos_counts: Mapping | None = None
    max_branching: int = 4
    word_pool: int = 40
    polysemy: float = 0.3
    extra_word_rate: float = 0.3
    node_delete: float = 0.0
    node_split: float = 0.0
    word_rename: float = 0.0
    edge_rewire: float = 0.0
    relations: tuple = _DEFAULT_RELATIONS
    gloss_tokens: int = 3
    frame_rate: float = 0.8

    def __post_init__(self):
        if self.node_count < 1:
            raise ConfigError("node_count must be at least 1")
        if self.max_branching < 1:
            raise ConfigError("max_branching must be at least 1")
        if self.word_pool < 1:
            raise ConfigError("word_pool must be at least 1")
        for name in ("polysemy", "extra_word_rate", "node_delete", "node_split",
                     "word_rename", "edge_rewire", "frame_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value}")
        if self.node_delete + self.node_split > 1.0:
            raise ConfigError("node_delete + node_split cannot exceed 1")
        if self.gloss_tokens < 0:
            raise ConfigError("gloss_tokens cannot be negative")
        for rel in self.relations:
            if rel not in _DEFAULT_RELATIONS:
                raise ConfigError(f"unknown relation {rel!r} in generator config")
        if self.pos_counts is not None:
            for code, count in self.pos_counts.items():
                if code not in POS_BY_CODE:
                    raise ConfigError(f"unknown pos code {code!r} in pos_counts")
                if count < 0:
                    raise ConfigError("pos counts cannot be negative")
            if not any(self.pos_counts.values()):
                raise ConfigError("pos_counts names no synsets")

    def resolved_counts(self) -> dict:
        if self.pos_counts is None:
            return {PartOfSpeech.NOUN: self.node_count}
        return {
            POS_BY_CODE[code]: count
            for code, count in sorted(self.pos_counts.items())
            if count > 0
        }


def _pick_words(rng, config, pos_code, index) -> tuple:
    words = []
    if rng.random() < config.polysemy:
        words.append(f"{pos_code}w{rng.randrange(config.word_pool):03d}")
    else:
        words.append(f"{pos_code}u{index:04d}")
    if rng.random() < config.extra_word_rate:
        if rng.random() < config.polysemy:
            extra = f"{pos_code}w{rng.randrange(config.word_pool):03d}"
        else:
            extra = f"{pos_code}x{index:04d}"
        if extra not in words:
            words.append(extra)
    return tuple(words)


def _hierarchy_edges(rng, ids, max_branching) -> list:
    """Random mostly-tree hypernym DAG over ids in index order."""
    edges = []
    children = {sid: 0 for sid in ids}
    for i in range(1, len(ids)):
        eligible = [ids[j] for j in range(i) if children[ids[j]] < max_branching]
        parent = rng.choice(eligible)
        children[parent] += 1
        edges.append((ids[i], parent, "hypernym"))
        if rng.random() < _SECOND_PARENT_RATE:
            others = [sid for sid in eligible if sid != parent and children[sid] < max_branching]
            if others:
                second = rng.choice(others)
                children[second] += 1
                edges.append((ids[i], second, "hypernym"))
    return edges


def _disjoint_pairs(rng, ids, count) -> list:
    pool = list(ids)
    rng.shuffle(pool)
    pairs = []
    for i in range(0, min(2 * count, len(pool) - len(pool) % 2), 2):
        pairs.append((pool[i], pool[i + 1]))
    return pairs


def generate(config: SynthConfig) -> tuple:
    """Build (source_graph, target_graph, gold) from one configuration."""
    rng = random.Random(config.seed)
    counts = config.resolved_counts()
    ids_by_pos = {
        pos: [f"{pos.value}{i:04d}" for i in range(count)] for pos, count in counts.items()
    }
    rels = set(config.relations)

    words: dict = {}
    for pos in sorted(counts, key=lambda p: p.value):
        code = pos.value
        for i, sid in enumerate(ids_by_pos[pos]):
            words[sid] = _pick_words(rng, config, code, i)

    edges: list = []
    parents: dict = {sid: [] for sids in ids_by_pos.values() for sid in sids}
    if "hypernym" in rels:
        for pos in (PartOfSpeech.NOUN, PartOfSpeech.VERB):
            for child, parent, _ in _hierarchy_edges(
                rng, ids_by_pos.get(pos, []), config.max_branching
            ):
                edges.append((child, parent, "hypernym"))
                parents[child].append(parent)

    def emit_pairs(relation, pos, rate):
        ids = ids_by_pos.get(pos, [])
        for a, b in _disjoint_pairs(rng, ids, int(rate * len(ids))):
            edges.append((a, b, relation))

    if "antonym" in rels:
        for pos in sorted(counts, key=lambda p: p.value):
            emit_pairs("antonym", pos, 0.10)
    if "also_see" in rels:
        for pos in (PartOfSpeech.VERB, PartOfSpeech.ADJECTIVE):
            if pos in counts:
                emit_pairs("also_see", pos, 0.08)
    if "similar_to" in rels:
        adj_ids = ids_by_pos.get(PartOfSpeech.ADJECTIVE, [])
        for start in range(0, len(adj_ids) - 1, 3):
            cluster = adj_ids[start : start + 3]
            for other in cluster[1:]:
                edges.append((cluster[0], other, "similar_to"))

    def emit_cross(relation, from_pos, to_pos, rate):
        targets = ids_by_pos.get(to_pos, [])
        if not targets:
            return
        for sid in ids_by_pos.get(from_pos, []):
            if rng.random() < rate:
                edges.append((sid, rng.choice(targets), relation))

    if "participle_of" in rels:
        emit_cross("participle_of", PartOfSpeech.ADJECTIVE, PartOfSpeech.VERB, 0.35)
    if "pertains" in rels:
        emit_cross("pertains", PartOfSpeech.ADJECTIVE, PartOfSpeech.NOUN, 0.20)
    if "attribute" in rels:
        emit_cross("attribute", PartOfSpeech.ADJECTIVE, PartOfSpeech.NOUN, 0.10)
    if "derived_from" in rels:
        emit_cross("derived_from", PartOfSpeech.ADVERB, PartOfSpeech.ADJECTIVE, 0.50)

    neighbor: dict = {}
    for a, b, rel in edges:
        if rel != "hypernym":
            neighbor.setdefault(a, []).append(b)
            neighbor.setdefault(b, []).append(a)

    glosses: dict = {}
    frames: dict = {}
    for pos in sorted(counts, key=lambda p: p.value):
        for sid in ids_by_pos[pos]:
            tokens = [words[sid][0]]
            if parents[sid]:
                tokens.append(words[sorted(parents[sid])[0]][0])
            elif sid in neighbor:
                tokens.append(words[sorted(neighbor[sid])[0]][0])
            tokens.extend(
                rng.choice(_GLOSS_POOL) for _ in range(config.gloss_tokens)
            )
            glosses[sid] = " ".join(tokens)
            if pos is PartOfSpeech.VERB and rng.random() < config.frame_rate:
                frames[sid] = frozenset(rng.sample(range(1, 31), rng.randint(1, 3)))

    def build(ids_words, edge_triples):
        synsets = [
            Synset(
                sid,
                POS_BY_CODE[sid[0]],
                tuple(ws),
                glosses.get(sid, ""),
                frames.get(sid, frozenset()) if sid[0] == "v" else frozenset(),
            )
            for sid, ws in sorted(ids_words.items())
        ]
        return SenseGraph(synsets, edge_triples)

    source = build(words, edges)

    # Perturb the copy.  Fates are drawn per synset in id order; a node
    # is deleted, split, renamed, or left alone.
    all_ids = sorted(words)
    fates: dict = {}
    for sid in all_ids:
        draw = rng.random()
        if draw < config.node_delete:
            fates[sid] = "delete"
        elif draw < config.node_delete + config.node_split:
            fates[sid] = "split"
        elif rng.random() < config.word_rename:
            fates[sid] = "rename"
        else:
            fates[sid] = "keep"

    target_words = dict(words)
    target_frames = dict(frames)
    target_glosses = dict(glosses)
    target_edges = set(edges)
    gold_entries: dict = {}

    for sid in all_ids:
        if fates[sid] != "delete":
            continue
        gold_entries[sid] = None
        kept_parents = [b for a, b, rel in target_edges if a == sid and rel == "hypernym"]
        kept_children = [a for a, b, rel in target_edges if b == sid and rel == "hypernym"]
        target_edges = {e for e in target_edges if sid not in (e[0], e[1])}
        for child in sorted(kept_children):
            for parent in sorted(kept_parents):
                target_edges.add((child, parent, "hypernym"))
        del target_words[sid]
        target_frames.pop(sid, None)
        target_glosses.pop(sid, None)

    for index, sid in enumerate(all_ids):
        fate = fates[sid]
        if fate == "split":
            twin = sid + "b"
            while twin in target_words:
                twin += "b"
            pos_code = sid[0]
            target_words[twin] = (words[sid][0], f"{pos_code}s{index:04d}")
            target_glosses[twin] = glosses[sid]
            if sid in target_frames:
                target_frames[twin] = target_frames[sid]
            for parent in sorted(
                {b for a, b, rel in target_edges if a == sid and rel == "hypernym"}
            ):
                target_edges.add((twin, parent, "hypernym"))
            gold_entries[sid] = frozenset({sid, twin})
        elif fate == "rename":
            target_words[sid] = (f"{sid[0]}r{index:04d}",)
            gold_entries[sid] = frozenset({sid})
        elif fate == "keep":
            gold_entries[sid] = frozenset({sid})

    if config.edge_rewire > 0:
        same_pos_ids: dict = {}
        for sid in target_words:
            same_pos_ids.setdefault(sid[0], []).append(sid)
        for edge in sorted(e for e in target_edges if e[2] == "hypernym"):
            if rng.random() >= config.edge_rewire:
                continue
            child, parent, _ = edge
            below = _descendants(target_edges, child)
            current = {b for a, b, rel in target_edges if a == child and rel == "hypernym"}
            options = [
                sid
                for sid in sorted(same_pos_ids[child[0]])
                if sid != child and sid not in below and sid not in current
            ]
            if not options:
                continue
            target_edges.discard(edge)
            target_edges.add((child, rng.choice(options), "hypernym"))

    target_synsets = [
        Synset(
            sid,
            POS_BY_CODE[sid[0]],
            tuple(ws),
            target_glosses.get(sid, ""),
            target_frames.get(sid, frozenset()) if sid[0] == "v" else frozenset(),
        )
        for sid, ws in sorted(target_words.items())
    ]
    target = SenseGraph(target_synsets, sorted(target_edges))
    return source, target, GoldSample(gold_entries)


def _descendants(edge_set, root) -> set:
    """Nodes below root along hypernym edges (children direction)."""
    children: dict = {}
    for a, b, rel in edge_set:
        if rel == "hypernym":
            children.setdefault(b, []).append(a)
    seen: set = set()
    queue = [root]
    while queue:
        node = queue.pop()
        for child in children.get(node, ()):
            if child not in seen:
                seen.add(child)
                queue.append(child)
    return seen
