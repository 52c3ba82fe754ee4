"""Sliding-window noun disambiguation driven by conceptual density.

For each noun occurrence a window of the nearest W nouns is assembled and
an elimination loop runs over it: score all candidate concepts, pick the
densest one that qualifies, keep only the senses under it for every word
it covers, repeat until no concept qualifies, then read off the middle
noun's surviving senses.  A concept qualifies when it covers senses of at
least two distinct lemmas and strictly narrows at least one still-open
occurrence; without such a rule every leaf sense would win with density 1
and selection would be vacuous.

Window results apply only to the middle noun: freezing is window-local
and nothing propagates across windows, so each occurrence is decided
independently and documents can be processed in any order.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import IO, Sequence

from .density import DensityParams, DensityScore, Lattice, score_candidates
from .taxonomy import Taxonomy


class Outcome(enum.Enum):
    FULL = "full"
    PARTIAL = "partial"
    NONE = "none"


class Method(enum.Enum):
    """How an assignment was produced.

    The disambiguation path only emits DENSITY, FALLBACK and MONOSEMOUS;
    the remaining tags let the comparison systems share one output format.
    """

    DENSITY = "density"
    FALLBACK = "fallback"
    MONOSEMOUS = "monosemous"
    RANDOM = "random"
    MOST_FREQUENT = "mfs"
    YAROWSKY = "yarowsky"
    SUSSNA = "sussna"


@dataclass(frozen=True)
class NounOccurrence:
    """One noun token kept for disambiguation (lemma known to the taxonomy)."""

    doc_position: int
    lemma: str
    sentence_id: int = 0


@dataclass(frozen=True)
class Window:
    """Up to ``size_param`` noun occurrences centred on ``target``."""

    target: int
    members: tuple[NounOccurrence, ...]
    size_param: int


@dataclass(frozen=True)
class Assignment:
    occurrence: NounOccurrence
    outcome: Outcome
    senses: tuple[str, ...]
    method: Method
    winning_cd: float | None = None
    category: str | None = None  # file-level answer, used by the salience baseline

    def is_answered(self) -> bool:
        return self.outcome is Outcome.FULL


@dataclass
class WindowTrace:
    """Diagnostics from one window run: the winner of every loop iteration."""

    winners: list[DensityScore]
    remaining: dict[int, tuple[str, ...]]


def build_window(
    nouns: Sequence[NounOccurrence], target: int, size_param: int
) -> Window:
    """Select the ``size_param`` nouns nearest ``target`` in document order.

    Near a document edge the window extends toward the populated side so it
    keeps min(size_param, len(nouns)) members instead of shrinking.
    """
    if not nouns:
        raise ValueError("empty noun list")
    if size_param < 1 or size_param % 2 == 0:
        raise ValueError("window size must be odd and >= 1")
    if not 0 <= target < len(nouns):
        raise ValueError(f"target {target} out of range")
    half = size_param // 2
    lo = target - half
    hi = target + half
    if lo < 0:
        hi += -lo
        lo = 0
    if hi > len(nouns) - 1:
        lo -= hi - (len(nouns) - 1)
        hi = len(nouns) - 1
        lo = max(lo, 0)
    return Window(
        target=target - lo,
        members=tuple(nouns[lo : hi + 1]),
        size_param=size_param,
    )


def _qualifies(score: DensityScore, lattice: Lattice) -> bool:
    if not score.resolvable:
        return False
    lemmas_covered = {
        lattice.lemmas[i] for i, senses in score.covered.items() if senses
    }
    return len(lemmas_covered) >= 2


def disambiguate_window(
    t: Taxonomy,
    window: Window,
    params: DensityParams,
    dedup_marks: bool = True,
) -> tuple[Assignment, WindowTrace]:
    """Run the elimination loop and decide the window's middle noun.

    Loop per iteration: rescore all candidate concepts over the remaining
    senses (frozen occurrences keep contributing their kept senses as
    marks), take the best qualifying concept, and freeze every occurrence
    it covers to exactly the covered senses.  Exits when nothing qualifies.
    The target ends Full if one sense survives, Partial if several-but-
    fewer survive, None if its sense set was never touched.
    """
    target_occ = window.members[window.target]
    target_senses = t.senses_of(target_occ.lemma)
    if not target_senses:
        raise ValueError(f"lemma {target_occ.lemma!r} is not in the taxonomy")
    if len(target_senses) == 1:
        assignment = Assignment(
            occurrence=target_occ,
            outcome=Outcome.FULL,
            senses=(target_senses[0],),
            method=Method.MONOSEMOUS,
        )
        return assignment, WindowTrace(winners=[], remaining={})

    lattice = Lattice.for_window(t, [occ.lemma for occ in window.members])
    winners: list[DensityScore] = []
    winning_cd: float | None = None

    for _ in range(sum(len(r) for r in lattice.remaining)):
        scores = score_candidates(t, lattice, params, dedup_by_lemma=dedup_marks)
        winner = next((s for s in scores if _qualifies(s, lattice)), None)
        if winner is None:
            break
        winners.append(winner)
        for idx, senses in winner.covered.items():
            if senses and not lattice.frozen[idx]:
                lattice.remaining[idx] = set(senses)
                lattice.frozen[idx] = True
                if idx == window.target and winning_cd is None:
                    winning_cd = winner.cd
        lattice.refresh_candidates(t)

    left = sorted(lattice.remaining[window.target])
    if len(left) == 1:
        outcome, senses = Outcome.FULL, tuple(left)
    elif len(left) < len(target_senses):
        outcome, senses = Outcome.PARTIAL, tuple(left)
    else:
        outcome, senses, winning_cd = Outcome.NONE, (), None
    assignment = Assignment(
        occurrence=target_occ,
        outcome=outcome,
        senses=senses,
        method=Method.DENSITY,
        winning_cd=winning_cd,
    )
    trace = WindowTrace(
        winners=winners,
        remaining={i: tuple(sorted(r)) for i, r in enumerate(lattice.remaining)},
    )
    return assignment, trace


def apply_random_fallback(
    t: Taxonomy, assignments: Sequence[Assignment], seed: int
) -> list[Assignment]:
    """Replace every Partial/None outcome with a uniformly drawn Full one.

    Partial draws from the surviving set, None from all of the lemma's
    senses.  One generator, consumed in document order, so a fixed seed
    reproduces byte-identical output.
    """
    rng = random.Random(seed)
    out = []
    for a in assignments:
        if a.outcome is Outcome.FULL:
            out.append(a)
            continue
        pool = a.senses if a.outcome is Outcome.PARTIAL else t.senses_of(a.occurrence.lemma)
        choice = rng.choice(sorted(pool))
        out.append(
            Assignment(
                occurrence=a.occurrence,
                outcome=Outcome.FULL,
                senses=(choice,),
                method=Method.FALLBACK,
                winning_cd=a.winning_cd,
            )
        )
    return out


def disambiguate_document(
    t: Taxonomy,
    nouns: Sequence[NounOccurrence],
    params: DensityParams,
    window_size: int = 31,
    fallback: str = "none",
    seed: int = 0,
    dedup_marks: bool = True,
) -> list[Assignment]:
    """One assignment per noun occurrence, in document order.

    Every occurrence is the middle of its own window; window results are
    not shared.  ``window_size`` must be odd (it counts the target too);
    the command line accepts even context-sized values and widens them
    before calling in here.
    """
    if fallback not in ("none", "random"):
        raise ValueError(f"unknown fallback {fallback!r}")
    assignments = []
    for i in range(len(nouns)):
        window = build_window(nouns, i, window_size)
        assignment, _ = disambiguate_window(t, window, params, dedup_marks)
        assignments.append(assignment)
    if fallback == "random":
        assignments = apply_random_fallback(t, assignments, seed)
    return assignments


# -- assignment output format ------------------------------------------------

ASSIGNMENT_HEADER = "position\tlemma\toutcome\tsense_keys\tmethod\tcd"


def format_assignment(t: Taxonomy, a: Assignment) -> str:
    """One tab-separated line: position, lemma, outcome, keys, method, cd.

    Sense keys use the ``lexfile.lex_id`` notation of the gold annotations;
    the salience baseline's category answers print the bare category.
    """
    if a.category is not None:
        keys = a.category
    elif a.senses:
        keys = ",".join(
            t.sense_key_of(a.occurrence.lemma, s) or s for s in a.senses
        )
    else:
        keys = "-"
    cd = f"{a.winning_cd:.6f}" if a.winning_cd is not None else "-"
    return (
        f"{a.occurrence.doc_position}\t{a.occurrence.lemma}\t{a.outcome.value}"
        f"\t{keys}\t{a.method.value}\t{cd}"
    )


def write_assignments(t: Taxonomy, assignments: Sequence[Assignment], out: IO) -> None:
    out.write(ASSIGNMENT_HEADER + "\n")
    for a in assignments:
        out.write(format_assignment(t, a) + "\n")
