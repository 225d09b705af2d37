"""Phase orchestration: noun and verb problems first, then adjectives,
then adverbs, each later phase reading the frozen weights of earlier ones.

The default constraint presets per part of speech:

* nouns: transitive hypernym/hyponym structure (aa, both sides) plus
  word and gloss overlap;
* verbs: the same structure plus also_see and antonym context and word,
  gloss and frame overlap;
* adjectives: antonym, similar_to and also_see context plus the
  cross-POS participle_of, pertains and attribute links, with word and
  gloss overlap;
* adverbs: antonym and derived_from context plus word and gloss overlap.

Verb-to-adjective links are deliberately absent from the verb preset so
the first phase has no forward dependencies.  All preset weights are 1.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .constraints import (
    DEFAULT_STOPLIST,
    ConstraintSet,
    GeneralizedConstraint,
    HeuristicConstraint,
    Scope,
    Side,
    SimilarityKind,
    StructuralConstraint,
    candidate_labels,
)
from .errors import ConfigError, DependencyError, ParseError
from .graph import RELATIONS, PartOfSpeech, SenseGraph, _records
from .relax import Assignment, FrozenWeights, Mapping, MappingProblem, RunStats, Settings
from .relax import extract_mapping, run

_AA_BOTH = StructuralConstraint(Side.BOTH, Scope.TRANSITIVE, Scope.TRANSITIVE)
_W = HeuristicConstraint(SimilarityKind.WORDS)
_G = HeuristicConstraint(SimilarityKind.GLOSS)
_F = HeuristicConstraint(SimilarityKind.FRAMES)

PRESETS: dict = {
    PartOfSpeech.NOUN: ConstraintSet(structural=(_AA_BOTH,), heuristic=(_W, _G)),
    PartOfSpeech.VERB: ConstraintSet(
        structural=(_AA_BOTH,),
        generalized=(GeneralizedConstraint("also_see"), GeneralizedConstraint("antonym")),
        heuristic=(_W, _G, _F),
    ),
    PartOfSpeech.ADJECTIVE: ConstraintSet(
        generalized=(
            GeneralizedConstraint("antonym"),
            GeneralizedConstraint("similar_to"),
            GeneralizedConstraint("also_see"),
            GeneralizedConstraint("participle_of"),
            GeneralizedConstraint("pertains"),
            GeneralizedConstraint("attribute"),
        ),
        heuristic=(_W, _G),
    ),
    PartOfSpeech.ADVERB: ConstraintSet(
        generalized=(
            GeneralizedConstraint("antonym"),
            GeneralizedConstraint("derived_from"),
        ),
        heuristic=(_W, _G),
    ),
}

# Used where only candidate structure matters (evaluation, inspection
# listings); the single constraint is never consulted.
_CANDIDATES_ONLY = ConstraintSet(heuristic=(_W,))


@dataclass(frozen=True)
class Phase:
    """One pipeline stage: the parts of speech solved together."""

    pos: tuple
    constraint_sets: Mapping | None = None

    def set_for(self, pos: PartOfSpeech) -> ConstraintSet:
        if self.constraint_sets is not None and pos in self.constraint_sets:
            return self.constraint_sets[pos]
        return PRESETS[pos]


@dataclass(frozen=True)
class PhasePlan:
    phases: tuple

    def all_pos(self) -> tuple:
        return tuple(p for phase in self.phases for p in phase.pos)


DEFAULT_PLAN = PhasePlan(
    (
        Phase((PartOfSpeech.NOUN, PartOfSpeech.VERB)),
        Phase((PartOfSpeech.ADJECTIVE,)),
        Phase((PartOfSpeech.ADVERB,)),
    )
)


def plan_from_spec(spec: str, constraint_sets: Mapping | None = None) -> PhasePlan:
    """Build a plan from a spec like ``nv>a>r``: phases separated by ``>``."""
    phases = []
    seen = set()
    for chunk in spec.split(">"):
        chunk = chunk.strip()
        if not chunk:
            raise ConfigError(f"empty phase in plan {spec!r}")
        pos_list = []
        for ch in chunk:
            pos = {p.value: p for p in PartOfSpeech}.get(ch)
            if pos is None:
                raise ConfigError(f"unknown pos letter {ch!r} in plan {spec!r}")
            if pos in seen:
                raise ConfigError(f"pos '{ch}' appears twice in plan {spec!r}")
            seen.add(pos)
            pos_list.append(pos)
        phases.append(Phase(tuple(pos_list), constraint_sets))
    return PhasePlan(tuple(phases))


@dataclass
class PhaseResult:
    """Everything one solved problem leaves behind for later phases."""

    pos: PartOfSpeech
    problem: MappingProblem
    mapping: Mapping
    stats: RunStats
    assignment: Assignment
    _frozen: FrozenWeights | None = field(default=None, repr=False)

    def weights(self) -> FrozenWeights:
        if self._frozen is None:
            self._frozen = FrozenWeights.from_assignment(self.assignment)
        return self._frozen


def _freeze(results: Mapping) -> dict:
    frozen = {}
    for pos, result in results.items():
        frozen[pos] = result.weights() if isinstance(result, PhaseResult) else result
    return frozen


def build_problem(
    source: SenseGraph,
    target: SenseGraph,
    pos: PartOfSpeech,
    constraints: ConstraintSet,
    frozen: Mapping | None = None,
    stoplist=DEFAULT_STOPLIST,
) -> MappingProblem:
    """Assemble the problem for one part of speech.

    Variables are all source synsets of that POS in sorted order, with
    candidates generated by shared words.  Raises
    :class:`DependencyError` when a cross-POS constraint lacks its
    frozen mapping, and :class:`ConfigError` when a relation cannot
    start from this POS at all.
    """
    frozen_map = _freeze(frozen or {})
    for g in constraints.generalized:
        rel = RELATIONS[g.relation]
        from_here = [sig for sig in rel.signatures if sig[0] is pos]
        if not from_here:
            raise ConfigError(
                f"relation {g.relation!r} cannot start from pos '{pos.value}'"
            )
        for _, tpos in from_here:
            if tpos is not pos and tpos not in frozen_map:
                raise DependencyError(
                    f"constraint on {g.relation!r} for pos '{pos.value}' needs a frozen "
                    f"'{tpos.value}' result from an earlier phase"
                )
    variables = source.pos_ids(pos)
    labels = [candidate_labels(source.synsets[v], target) for v in variables]
    return MappingProblem(
        pos, source, target, variables, labels, constraints, frozen_map, stoplist
    )


def candidate_problem(source: SenseGraph, target: SenseGraph, pos: PartOfSpeech) -> MappingProblem:
    """A problem shell carrying only variables and candidates.

    Used by evaluation and inspection listings, which never consult the
    constraint set.
    """
    variables = source.pos_ids(pos)
    labels = [candidate_labels(source.synsets[v], target) for v in variables]
    return MappingProblem(pos, source, target, variables, labels, _CANDIDATES_ONLY)


def run_phase(
    problem: MappingProblem,
    settings: Settings = Settings(),
    observer: Callable | None = None,
) -> PhaseResult:
    """Solve one problem and package the result for later phases."""
    assignment, stats = run(problem, settings, observer=observer)
    mapping = extract_mapping(
        problem,
        assignment,
        settings.output_threshold,
        iterations=stats.iterations,
        converged=stats.converged,
    )
    return PhaseResult(problem.pos, problem, mapping, stats, assignment)


def run_all(
    source: SenseGraph,
    target: SenseGraph,
    plan: PhasePlan = DEFAULT_PLAN,
    settings: Settings = Settings(),
    stoplist=DEFAULT_STOPLIST,
    observer_for: Callable | None = None,
) -> dict:
    """Run every phase of a plan; returns {pos: PhaseResult}.

    All problems of a phase are built against the results of strictly
    earlier phases before any of them runs, so siblings in a phase
    cannot see each other.  With ``settings.threads > 1`` sibling
    problems run concurrently; results are identical either way.
    """
    results: dict = {}
    for phase in plan.phases:
        problems = {}
        for pos in phase.pos:
            problems[pos] = build_problem(
                source, target, pos, phase.set_for(pos), frozen=results, stoplist=stoplist
            )
        observers = {
            pos: (observer_for(pos, problems[pos]) if observer_for else None)
            for pos in phase.pos
        }
        if settings.threads > 1 and len(problems) > 1:
            with ThreadPoolExecutor(max_workers=min(settings.threads, len(problems))) as pool:
                futures = {
                    pos: pool.submit(run_phase, problems[pos], settings, observers[pos])
                    for pos in phase.pos
                }
                phase_results = {pos: futures[pos].result() for pos in phase.pos}
        else:
            phase_results = {
                pos: run_phase(problems[pos], settings, observers[pos]) for pos in phase.pos
            }
        results.update(phase_results)
    return results


# -- mapping files ----------------------------------------------------------


def format_mapping(mapping: Mapping) -> str:
    """Render mapping entries as delimited text, sorted by source id.

    Each line is ``source_id<TAB>t1:w1,t2:w2`` with weights printed to
    six decimal places; uncovered synsets keep an empty second field.
    """
    lines = []
    for sid in sorted(mapping.entries):
        pairs = ",".join(f"{t}:{w:.6f}" for t, w in mapping.entries[sid])
        lines.append(f"{sid}\t{pairs}")
    return "\n".join(lines) + ("\n" if lines else "")


def write_mapping_file(mapping: Mapping, path) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(format_mapping(mapping))
    os.replace(tmp, path)


def parse_mapping_file(source, *, path: str | None = None) -> dict:
    """Parse mapping lines back into {source_id: ((target, weight), ...)}."""
    entries: dict = {}
    for lineno, line in _records(source):
        fields = line.split("\t")
        if len(fields) != 2:
            raise ParseError(
                f"expected 2 tab-separated fields, got {len(fields)}", line=lineno, path=path
            )
        sid, pairs_field = fields
        if sid in entries:
            raise ParseError(f"duplicate source id {sid!r}", line=lineno, path=path)
        pairs = []
        if pairs_field:
            for chunk in pairs_field.split(","):
                target, sep, weight = chunk.rpartition(":")
                if not sep or not target:
                    raise ParseError(f"bad target:weight pair {chunk!r}", line=lineno, path=path)
                try:
                    pairs.append((target, float(weight)))
                except ValueError:
                    raise ParseError(
                        f"bad weight in pair {chunk!r}", line=lineno, path=path
                    ) from None
        entries[sid] = tuple(pairs)
    return entries


def load_mapping_file(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_mapping_file(fh.read(), path=str(path))
