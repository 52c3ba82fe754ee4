"""Scoring of assignment lists against gold keys, and comparison tables.

Coverage is answered/total, precision correct/answered, recall
correct/total; recall == precision * coverage holds exactly on the
underlying integer counts.  Partial answers count as unanswered (the
strict reading used throughout), unless lenient mode is requested, where
a Partial counts as answered-and-correct when the gold sense is inside
the surviving set.

Gold keys that do not resolve through the (lemma, lexfile, lex_id) index
are never silently dropped: if the system answered such an occurrence the
answer counts as wrong, otherwise the occurrence leaves the scored
population; either way the report carries the count.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .corpus import SenseKey
from .disambiguator import Assignment, Outcome
from .taxonomy import Taxonomy


class Level(enum.Enum):
    SENSE = "sense"
    FILE = "file"


class Population(enum.Enum):
    ALL = "all"
    POLYSEMOUS = "polysemous"


@dataclass(frozen=True)
class EvalReport:
    level: Level
    population: Population
    total: int
    answered: int
    correct: int
    gold_unresolvable: int = 0
    system: str = ""

    def __post_init__(self):
        if not 0 <= self.correct <= self.answered <= self.total:
            raise ValueError("counts must satisfy correct <= answered <= total")

    @property
    def coverage(self) -> Fraction | None:
        return Fraction(self.answered, self.total) if self.total else None

    @property
    def precision(self) -> Fraction | None:
        return Fraction(self.correct, self.answered) if self.answered else None

    @property
    def recall(self) -> Fraction | None:
        return Fraction(self.correct, self.total) if self.total else None


def format_pct(value: Fraction | None) -> str:
    """Percentage with one decimal, rounded half-up; '-' when undefined."""
    if value is None:
        return "-"
    tenths_num = value.numerator * 1000
    q, r = divmod(tenths_num, value.denominator)
    tenths = q + (1 if 2 * r >= value.denominator else 0)
    return f"{tenths // 10}.{tenths % 10}"


def _file_of(t: Taxonomy, synset: str) -> str:
    return t.synsets[synset].lexfile


def score(
    t: Taxonomy,
    assignments: Sequence[Assignment],
    gold: Sequence[SenseKey | None],
    level: Level = Level.SENSE,
    population: Population = Population.ALL,
    lenient: bool = False,
    system: str = "",
) -> EvalReport:
    """Score one assignment list against its parallel gold keys."""
    if len(assignments) != len(gold):
        raise ValueError(
            f"{len(assignments)} assignments vs {len(gold)} gold keys"
        )
    total = answered = correct = unresolvable = 0
    for a, key in zip(assignments, gold):
        lemma = a.occurrence.lemma
        if population is Population.POLYSEMOUS and len(t.senses_of(lemma)) <= 1:
            continue
        if a.category is not None and level is not Level.FILE:
            raise ValueError("category answers can only be scored at file level")

        gold_synset = (
            t.resolve_sense_key(lemma, key.lexfile, key.lex_id)
            if key is not None
            else None
        )
        is_answered = a.outcome is Outcome.FULL or (
            lenient and a.outcome is Outcome.PARTIAL
        )
        if gold_synset is None:
            unresolvable += 1
            if is_answered:
                total += 1
                answered += 1
            continue

        total += 1
        if not is_answered:
            continue
        answered += 1
        if a.category is not None:
            hit = a.category == key.lexfile
        elif level is Level.SENSE:
            hit = gold_synset in a.senses
        else:
            hit = key.lexfile in {_file_of(t, s) for s in a.senses}
        correct += int(hit)
    return EvalReport(
        level=level,
        population=population,
        total=total,
        answered=answered,
        correct=correct,
        gold_unresolvable=unresolvable,
        system=system,
    )


def merge_reports(reports: Sequence[EvalReport]) -> EvalReport:
    """Add up per-document reports (counts are additive across shards)."""
    if not reports:
        raise ValueError("nothing to merge")
    first = reports[0]
    for r in reports[1:]:
        if r.level is not first.level or r.population is not first.population:
            raise ValueError("reports disagree on level/population")
    return EvalReport(
        level=first.level,
        population=first.population,
        total=sum(r.total for r in reports),
        answered=sum(r.answered for r in reports),
        correct=sum(r.correct for r in reports),
        gold_unresolvable=sum(r.gold_unresolvable for r in reports),
        system=first.system,
    )


COMPARE_HEADER = "system\tcoverage\tprecision\trecall"


def compare(reports: Sequence[EvalReport]) -> str:
    """Tab-separated comparison table, one row per system.

    All reports must share level and population.  Percentages carry one
    decimal, rounded half-up.
    """
    lines = [COMPARE_HEADER]
    if reports:
        first = reports[0]
        for r in reports:
            if r.level is not first.level or r.population is not first.population:
                raise ValueError("reports disagree on level/population")
    for r in reports:
        lines.append(
            f"{r.system}\t{format_pct(r.coverage)}"
            f"\t{format_pct(r.precision)}\t{format_pct(r.recall)}"
        )
    return "\n".join(lines) + "\n"


def report_block(report: EvalReport) -> str:
    """Structured key/value rendering of one report."""
    lines = [
        f"system: {report.system}" if report.system else "system: -",
        f"level: {report.level.value}",
        f"population: {report.population.value}",
        f"total: {report.total}",
        f"answered: {report.answered}",
        f"correct: {report.correct}",
        f"gold_unresolvable: {report.gold_unresolvable}",
        f"coverage: {format_pct(report.coverage)}",
        f"precision: {format_pct(report.precision)}",
        f"recall: {format_pct(report.recall)}",
    ]
    return "\n".join(lines) + "\n"


REPORT_TSV_HEADER = (
    "system\tlevel\tpopulation\ttotal\tanswered\tcorrect"
    "\tgold_unresolvable\tcoverage\tprecision\trecall"
)


def report_tsv(report: EvalReport) -> str:
    """One-row tab-separated rendering (with header) of one report."""
    row = (
        f"{report.system or '-'}\t{report.level.value}\t{report.population.value}"
        f"\t{report.total}\t{report.answered}\t{report.correct}"
        f"\t{report.gold_unresolvable}\t{format_pct(report.coverage)}"
        f"\t{format_pct(report.precision)}\t{format_pct(report.recall)}"
    )
    return REPORT_TSV_HEADER + "\n" + row + "\n"
