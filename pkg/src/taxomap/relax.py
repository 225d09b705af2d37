"""Relaxation solver: state initialization, synchronous updates, extraction.

Each variable is one source synset; its labels are the candidate target
synsets.  A state assigns every variable a weight vector over its
labels, nonnegative and summing to one.  One update step rescales each
weight by (1 + support) and renormalizes:

    w'(l) = w(l) * (1 + S(l)) / sum_k w(k) * (1 + S(k))

Updates are synchronous: every support in a step is computed from the
incoming state, so the processing order of variables cannot matter.
The denominator is at least one because supports are nonnegative and
the incoming vector sums to one.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .constraints import DEFAULT_STOPLIST, CompiledSupport, ConstraintSet
from .errors import RelaxationInvariantError
from .graph import PartOfSpeech, SenseGraph

_SUM_TOLERANCE = 1e-9


class MappingProblem:
    """One relaxation problem: variables, candidate labels, constraints.

    ``variables`` and ``labels`` are aligned; label lists are stored
    deduplicated and sorted.  Variables without candidates are carried
    (they appear in the output as uncovered) but get no state slots.
    """

    def __init__(
        self,
        pos: PartOfSpeech,
        source: SenseGraph,
        target: SenseGraph,
        variables: Iterable,
        labels: Iterable,
        constraints: ConstraintSet,
        frozen: Mapping | None = None,
        stoplist=DEFAULT_STOPLIST,
    ):
        self.pos = pos
        self.source = source
        self.target = target
        self.constraints = constraints
        self.frozen = dict(frozen or {})
        self.stoplist = frozenset(stoplist)
        self.variables = list(variables)
        label_lists = [sorted(set(ls)) for ls in labels]
        if len(label_lists) != len(self.variables):
            raise ValueError("variables and labels are not aligned")
        self.labels = label_lists

        self.var_index: dict = {}
        for i, var in enumerate(self.variables):
            if var in self.var_index:
                raise ValueError(f"duplicate variable {var!r}")
            self.var_index[var] = i

        counts = [len(ls) for ls in self.labels]
        self.offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.intp)
        self.n_slots = int(self.offsets[-1])
        self.label_slots = []
        for i, ls in enumerate(self.labels):
            base = int(self.offsets[i])
            self.label_slots.append({t: base + j for j, t in enumerate(ls)})
        self.unmappable = frozenset(v for v, ls in zip(self.variables, self.labels) if not ls)
        self._compiled = None

    def slot(self, source_id: str, target_id: str):
        vi = self.var_index.get(source_id)
        if vi is None:
            return None
        return self.label_slots[vi].get(target_id)

    def segment(self, vi: int) -> tuple:
        return int(self.offsets[vi]), int(self.offsets[vi + 1])

    def connections(self):
        """Yield (variable, label, slot) for every connection."""
        for vi, var in enumerate(self.variables):
            base = int(self.offsets[vi])
            for j, t in enumerate(self.labels[vi]):
                yield var, t, base + j

    def compiled_support(self) -> CompiledSupport:
        if self._compiled is None:
            self._compiled = CompiledSupport(self)
        return self._compiled


class Assignment:
    """Per-variable label weight vectors for one problem, stored flat."""

    __slots__ = ("problem", "flat")

    def __init__(self, problem: MappingProblem, flat):
        self.problem = problem
        self.flat = np.asarray(flat, dtype=float)

    def weight(self, source_id: str, target_id: str) -> float:
        """Current weight of one connection; 0.0 if it does not exist."""
        slot = self.problem.slot(source_id, target_id)
        return float(self.flat[slot]) if slot is not None else 0.0

    def vector(self, var_id: str) -> np.ndarray:
        vi = self.problem.var_index[var_id]
        a, b = self.problem.segment(vi)
        return self.flat[a:b].copy()

    def copy(self) -> "Assignment":
        return Assignment(self.problem, self.flat.copy())

    def items(self):
        for vi, var in enumerate(self.problem.variables):
            a, b = self.problem.segment(vi)
            yield var, self.problem.labels[vi], self.flat[a:b]


class FrozenWeights:
    """Read-only (source, target) -> weight view of a finished assignment."""

    __slots__ = ("_weights",)

    def __init__(self, weights: dict):
        self._weights = weights

    @classmethod
    def from_assignment(cls, assignment: Assignment) -> "FrozenWeights":
        weights = {}
        for var, labels, vector in assignment.items():
            for t, w in zip(labels, vector):
                weights[(var, t)] = float(w)
        return cls(weights)

    def weight(self, source_id: str, target_id: str) -> float:
        return self._weights.get((source_id, target_id), 0.0)


@dataclass(frozen=True)
class Settings:
    """Solver settings with the package defaults."""

    init_mode: str = "uniform"
    seed: int = 0
    epsilon: float = 1e-4
    max_iterations: int = 500
    output_threshold: float = 0.5
    threads: int = 1

    def __post_init__(self):
        if self.init_mode not in ("uniform", "random"):
            raise ValueError(f"unknown init mode {self.init_mode!r}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not 0 < self.output_threshold <= 1:
            raise ValueError("output_threshold must be in (0, 1]")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")


@dataclass(frozen=True)
class RunStats:
    iterations: int
    converged: bool
    final_delta: float
    deltas: tuple
    wall_time: float
    variables: int
    connections: int


@dataclass
class Mapping:
    """Extracted mapping: per source synset, the surviving targets.

    ``entries`` maps every variable to a tuple of (target, weight)
    pairs sorted by descending weight then id; an empty tuple means the
    synset is uncovered.
    """

    entries: dict
    iterations: int = 0
    converged: bool = True

    def covered(self) -> int:
        return sum(1 for pairs in self.entries.values() if pairs)

    def coverage(self) -> float:
        return self.covered() / len(self.entries) if self.entries else 0.0


def initialize(problem: MappingProblem, mode: str = "uniform", seed: int = 0) -> Assignment:
    """Starting state: uniform 1/k vectors, or seeded positive random ones."""
    flat = np.empty(problem.n_slots)
    if mode == "uniform":
        for vi in range(len(problem.variables)):
            a, b = problem.segment(vi)
            if a < b:
                flat[a:b] = 1.0 / (b - a)
    elif mode == "random":
        rng = np.random.default_rng(seed)
        for vi in range(len(problem.variables)):
            a, b = problem.segment(vi)
            if a == b:
                continue
            seg = 1.0 - rng.random(b - a)  # in (0, 1], never zero
            seg = seg / math.fsum(seg)
            total = math.fsum(seg)
            if total != 1.0:
                seg = seg / total
            flat[a:b] = seg
    else:
        raise ValueError(f"unknown init mode {mode!r}")
    return Assignment(problem, flat)


def _step(problem: MappingProblem, flat: np.ndarray, model: CompiledSupport):
    """One synchronous update; returns (new_flat, supports, max_delta)."""
    supports = model.supports(flat)
    numerators = flat * (1.0 + supports)
    # Guards are written so NaN fails them too.
    if problem.n_slots and not float(numerators.min()) >= 0.0:
        raise RelaxationInvariantError("negative update numerator; support below -1")
    new = np.empty_like(flat)
    for vi in range(len(problem.variables)):
        a, b = problem.segment(vi)
        if a == b:
            continue
        if b - a == 1:
            new[a] = 1.0
            continue
        seg = numerators[a:b]
        seg = seg / math.fsum(seg)
        total = math.fsum(seg)
        if not abs(total - 1.0) <= _SUM_TOLERANCE:
            raise RelaxationInvariantError(
                f"weights of {problem.variables[vi]} sum to {total!r} after update"
            )
        if total != 1.0:
            seg = seg / total
        new[a:b] = seg
    if problem.n_slots and not float(new.min()) >= 0.0:
        raise RelaxationInvariantError("negative weight after update")
    delta = float(np.max(np.abs(new - flat))) if problem.n_slots else 0.0
    return new, supports, delta


def update_step(problem: MappingProblem, state: Assignment) -> tuple:
    """One synchronous update; returns (new_state, supports, max_delta).

    ``supports`` is the flat per-connection support array the update was
    computed from, indexed like the state (see ``MappingProblem.slot``).
    """
    new, supports, delta = _step(problem, state.flat, problem.compiled_support())
    return Assignment(problem, new), supports, delta


def run(
    problem: MappingProblem,
    settings: Settings = Settings(),
    observer: Callable | None = None,
) -> tuple:
    """Iterate updates until max_delta < epsilon or the iteration cap.

    ``observer``, if given, is called after every iteration as
    ``observer(iteration, before, supports, after, max_delta)`` with
    Assignment views of the incoming and outgoing state.
    """
    started = time.perf_counter()
    state = initialize(problem, settings.init_mode, settings.seed)
    if problem.n_slots == 0:
        stats = RunStats(0, True, 0.0, (), time.perf_counter() - started, len(problem.variables), 0)
        return state, stats
    model = problem.compiled_support()
    flat = state.flat
    deltas = []
    converged = False
    for iteration in range(1, settings.max_iterations + 1):
        new, supports, delta = _step(problem, flat, model)
        if observer is not None:
            observer(iteration, Assignment(problem, flat), supports, Assignment(problem, new), delta)
        flat = new
        deltas.append(delta)
        if delta < settings.epsilon:
            converged = True
            break
    stats = RunStats(
        iterations=len(deltas),
        converged=converged,
        final_delta=deltas[-1],
        deltas=tuple(deltas),
        wall_time=time.perf_counter() - started,
        variables=len(problem.variables),
        connections=problem.n_slots,
    )
    return Assignment(problem, flat), stats


def extract_mapping(
    problem: MappingProblem,
    final: Assignment,
    threshold: float = 0.5,
    *,
    iterations: int = 0,
    converged: bool = True,
) -> Mapping:
    """Keep labels whose weight reaches the threshold.

    Survivors are sorted by descending weight, ties broken by id, and
    equal-weight survivors are all kept; variables with no survivor or
    no candidates get an empty entry.
    """
    entries = {}
    for vi, var in enumerate(problem.variables):
        a, b = problem.segment(vi)
        pairs = [
            (t, float(w))
            for t, w in zip(problem.labels[vi], final.flat[a:b])
            if w >= threshold
        ]
        pairs.sort(key=lambda tw: (-tw[1], tw[0]))
        entries[var] = tuple(pairs)
    return Mapping(entries, iterations=iterations, converged=converged)
