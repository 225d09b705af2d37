"""Scoring extracted mappings against gold data.

Because the output may keep several targets per synset, correctness is
scored as an interval.  The optimistic bound counts an answer as
correct when it overlaps the gold set at all; the pessimistic bound
requires every proposed target to be in the gold set.  A gold entry may
also assert that a synset has no counterpart: answering anything for it
is a precision error under both bounds, leaving it unanswered is
correct, and such entries never enter recall denominators.

Precision divides by answered items, recall by scoreable items (those
with a nonempty gold set).  Scores are reported for three populations:
variables with several candidates, variables with at most one, and
everything together.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import EvalInputError, ParseError
from .graph import PartOfSpeech, _records
from .relax import Mapping as ExtractedMapping
from .relax import MappingProblem


@dataclass(frozen=True)
class GoldSample:
    """Gold targets per source synset; ``None`` means no counterpart exists."""

    entries: Mapping

    def __len__(self) -> int:
        return len(self.entries)

    def ids(self) -> tuple:
        return tuple(sorted(self.entries))

    def targets(self, sid: str):
        return self.entries[sid]

    def is_no_correspondence(self, sid: str) -> bool:
        return self.entries[sid] is None


def parse_gold_file(source, *, path: str | None = None) -> GoldSample:
    """Parse gold lines: ``source_id<TAB>t1,t2`` or ``source_id<TAB>-``."""
    entries: dict = {}
    for lineno, line in _records(source):
        fields = line.split("\t")
        if len(fields) != 2:
            raise ParseError(
                f"expected 2 tab-separated fields, got {len(fields)}", line=lineno, path=path
            )
        sid, targets_field = fields
        if not sid:
            raise ParseError("empty source id", line=lineno, path=path)
        if sid in entries:
            raise ParseError(f"duplicate source id {sid!r}", line=lineno, path=path)
        if targets_field == "-":
            entries[sid] = None
        else:
            parts = targets_field.split(",")
            if not all(parts):
                raise ParseError(f"empty target id for {sid}", line=lineno, path=path)
            entries[sid] = frozenset(parts)
    return GoldSample(entries)


def format_gold(gold: GoldSample) -> str:
    lines = []
    for sid in sorted(gold.entries):
        targets = gold.entries[sid]
        lines.append(f"{sid}\t-" if targets is None else f"{sid}\t{','.join(sorted(targets))}")
    return "\n".join(lines) + ("\n" if lines else "")


def load_gold_file(path) -> GoldSample:
    with open(path, encoding="utf-8") as fh:
        return parse_gold_file(fh.read(), path=str(path))


@dataclass(frozen=True)
class PopulationScore:
    """Counts and bounds for one slice of the sample.

    Ratio fields are ``None`` when their denominator is empty.
    """

    items: int
    answered: int
    scoreable: int
    correct_low: int
    correct_high: int
    coverage: float | None
    precision_low: float | None
    precision_high: float | None
    recall_low: float | None
    recall_high: float | None


@dataclass(frozen=True)
class EvalReport:
    pos: PartOfSpeech
    ambiguous: PopulationScore
    non_ambiguous: PopulationScore
    overall: PopulationScore

    def populations(self):
        yield "ambiguous", self.ambiguous
        yield "non_ambiguous", self.non_ambiguous
        yield "overall", self.overall


def partition_ambiguity(problem: MappingProblem) -> tuple:
    """Split variables into (more than one candidate, at most one)."""
    ambiguous = []
    non_ambiguous = []
    for var, labels in zip(problem.variables, problem.labels):
        (ambiguous if len(labels) > 1 else non_ambiguous).append(var)
    return tuple(ambiguous), tuple(non_ambiguous)


def _score(ids: Iterable, mapping: ExtractedMapping, gold: GoldSample) -> PopulationScore:
    items = answered = scoreable = correct_low = correct_high = 0
    for sid in ids:
        items += 1
        predicted = frozenset(t for t, _ in mapping.entries[sid])
        targets = gold.entries[sid]
        if predicted:
            answered += 1
        if targets is None:
            continue
        scoreable += 1
        if predicted and predicted & targets:
            correct_high += 1
            if predicted <= targets:
                correct_low += 1
    def ratio(num, den):
        return num / den if den else None
    return PopulationScore(
        items=items,
        answered=answered,
        scoreable=scoreable,
        correct_low=correct_low,
        correct_high=correct_high,
        coverage=ratio(answered, items),
        precision_low=ratio(correct_low, answered),
        precision_high=ratio(correct_high, answered),
        recall_low=ratio(correct_low, scoreable),
        recall_high=ratio(correct_high, scoreable),
    )


def evaluate(mapping: ExtractedMapping, gold: GoldSample, problem: MappingProblem) -> EvalReport:
    """Score one extracted mapping against gold data.

    Every gold id must be a variable of the problem with an entry in
    the mapping; anything else raises :class:`EvalInputError`.
    """
    for sid in gold.entries:
        if sid not in problem.var_index:
            raise EvalInputError(f"gold id {sid!r} is not a variable of the problem")
        if sid not in mapping.entries:
            raise EvalInputError(f"gold id {sid!r} has no entry in the mapping")
    ambiguous, non_ambiguous = partition_ambiguity(problem)
    in_gold = set(gold.entries)
    return EvalReport(
        pos=problem.pos,
        ambiguous=_score([v for v in ambiguous if v in in_gold], mapping, gold),
        non_ambiguous=_score([v for v in non_ambiguous if v in in_gold], mapping, gold),
        overall=_score([v for v in gold.ids()], mapping, gold),
    )


# -- rendering --------------------------------------------------------------


def _interval(score: PopulationScore) -> str:
    if score.precision_low is None:
        return "--"
    return f"{100 * score.precision_low:.1f}%-{100 * score.precision_high:.1f}%"


def _percent(value) -> str:
    return "--" if value is None else f"{100 * value:.1f}%"


def render_table(reports: Iterable) -> str:
    """Aligned text table: one row per POS, precision intervals per column."""
    rows = [("", "Cover.", "ambiguous", "overall")]
    for report in reports:
        rows.append(
            (
                report.pos.value.upper(),
                _percent(report.overall.coverage),
                _interval(report.ambiguous),
                _interval(report.overall),
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


def render_kv(reports: Iterable) -> str:
    """Machine-readable dump: ``pos.population.metric<TAB>value`` lines."""
    lines = []
    for report in reports:
        prefix = report.pos.value
        for name, score in report.populations():
            for metric in (
                "items",
                "answered",
                "scoreable",
                "correct_low",
                "correct_high",
            ):
                lines.append(f"{prefix}.{name}.{metric}\t{getattr(score, metric)}")
            for metric in (
                "coverage",
                "precision_low",
                "precision_high",
                "recall_low",
                "recall_high",
            ):
                value = getattr(score, metric)
                rendered = "-" if value is None else f"{value:.6f}"
                lines.append(f"{prefix}.{name}.{metric}\t{rendered}")
    return "\n".join(lines) + ("\n" if lines else "")
