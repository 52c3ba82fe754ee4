"""Comparison systems: random, most-frequent, category salience, distance.

All four produce the same Assignment records the density disambiguator
emits, so one output writer and one scorer serve every system.  The
salience system answers at lexicographer-file granularity only; its
assignments carry a category instead of a synset.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Sequence

from .corpus import ExtractedNouns, SenseKey
from .disambiguator import Assignment, Method, NounOccurrence, Outcome, build_window
from .evaluation import Level, Population
from .taxonomy import Taxonomy


# -- random guessing ---------------------------------------------------------


def random_baseline(
    nouns: Sequence[NounOccurrence], t: Taxonomy, seed: int = 0
) -> list[Assignment]:
    """Pick a uniformly random sense for every noun, in document order."""
    rng = random.Random(seed)
    out = []
    for occ in nouns:
        senses = t.senses_of(occ.lemma)
        if not senses:
            raise ValueError(f"lemma {occ.lemma!r} is not in the taxonomy")
        out.append(
            Assignment(
                occurrence=occ,
                outcome=Outcome.FULL,
                senses=(rng.choice(senses),),
                method=Method.RANDOM,
            )
        )
    return out


def analytic_random_expectation(
    t: Taxonomy,
    nouns: Sequence[NounOccurrence],
    gold: Sequence[SenseKey | None],
) -> dict[tuple[Level, Population], float | None]:
    """Expected precision of uniform guessing, per level and population.

    Sense level: mean of 1/polysemy.  File level: mean of the fraction of
    the lemma's senses sharing the gold lexicographer file.  The mean runs
    over occurrences whose gold key resolves in the taxonomy (the same
    population the scorer counts); unresolvable keys fall outside it.
    """
    if len(nouns) != len(gold):
        raise ValueError("nouns and gold have different lengths")
    rows = []
    for occ, key in zip(nouns, gold):
        if key is None:
            continue
        if t.resolve_sense_key(occ.lemma, key.lexfile, key.lex_id) is None:
            continue
        senses = t.senses_of(occ.lemma)
        same_file = sum(1 for s in senses if t.synsets[s].lexfile == key.lexfile)
        rows.append((len(senses), same_file))
    if not rows:
        raise ValueError("no resolvable gold keys in the input")

    def mean(values: list[float]) -> float | None:
        return sum(values) / len(values) if values else None

    result: dict[tuple[Level, Population], float | None] = {}
    for population in Population:
        subset = [r for r in rows if population is Population.ALL or r[0] > 1]
        result[(Level.SENSE, population)] = mean([1.0 / p for p, _ in subset])
        result[(Level.FILE, population)] = mean([f / p for p, f in subset])
    return result


# -- most frequent sense -----------------------------------------------------


@dataclass
class FrequencyTable:
    """Gold sense counts per (lemma, synset id) from a training corpus."""

    counts: dict[tuple[str, str], int] = field(default_factory=dict)

    def lemmas(self) -> set[str]:
        return {lemma for lemma, _ in self.counts}

    def best_sense(self, t: Taxonomy, lemma: str) -> str | None:
        """Most counted sense of ``lemma``; ties go to the ascending id."""
        candidates = [
            (-self.counts[(lemma, s)], s)
            for s in t.senses_of(lemma)
            if (lemma, s) in self.counts
        ]
        if not candidates:
            return None
        return min(candidates)[1]


def build_frequency(
    t: Taxonomy, train: Sequence[ExtractedNouns]
) -> FrequencyTable:
    table = FrequencyTable()
    for doc in train:
        for occ, key in zip(doc.occurrences, doc.gold):
            if key is None:
                continue
            synset = t.resolve_sense_key(occ.lemma, key.lexfile, key.lex_id)
            if synset is None:
                continue
            pair = (occ.lemma, synset)
            table.counts[pair] = table.counts.get(pair, 0) + 1
    return table


def most_frequent_baseline(
    nouns: Sequence[NounOccurrence], t: Taxonomy, freq: FrequencyTable
) -> list[Assignment]:
    """Answer with the training-most-frequent sense; no counts, no answer."""
    out = []
    for occ in nouns:
        best = freq.best_sense(t, occ.lemma)
        if best is None:
            out.append(
                Assignment(occ, Outcome.NONE, (), Method.MOST_FREQUENT)
            )
        else:
            out.append(
                Assignment(occ, Outcome.FULL, (best,), Method.MOST_FREQUENT)
            )
    return out


# -- category salience -------------------------------------------------------


@dataclass
class SalienceTable:
    """Association ratios between context lemmas and lexicographer files."""

    salience: dict[tuple[str, str], float] = field(default_factory=dict)
    priors: dict[str, float] = field(default_factory=dict)

    def categories(self) -> list[str]:
        return sorted(self.priors)


def build_salience(
    train: Sequence[ExtractedNouns], t: Taxonomy, window_size: int = 51
) -> SalienceTable:
    """Train salience(w, cat) = P(w|cat) * log2(P(w|cat) / P(w)).

    Co-occurrence counts pair each gold-tagged target's category with every
    other noun token in its window.  P(w|cat) carries add-one smoothing
    over the context vocabulary, so every (seen word, seen category) cell
    gets a finite value; P(w) is unsmoothed (w was seen).
    """
    pair_counts: Counter[tuple[str, str]] = Counter()
    word_counts: Counter[str] = Counter()
    cat_counts: Counter[str] = Counter()
    target_cats: Counter[str] = Counter()
    targets = 0
    for doc in train:
        nouns = doc.occurrences
        for i, (occ, key) in enumerate(zip(nouns, doc.gold)):
            if key is None:
                continue
            cat = key.lexfile
            targets += 1
            target_cats[cat] += 1
            window = build_window(nouns, i, window_size)
            for j, member in enumerate(window.members):
                if j == window.target:
                    continue
                pair_counts[(member.lemma, cat)] += 1
                word_counts[member.lemma] += 1
                cat_counts[cat] += 1
    if targets == 0:
        raise ValueError("training corpus has no gold-tagged nouns")

    table = SalienceTable()
    table.priors = {cat: target_cats[cat] / targets for cat in target_cats}
    vocab = sorted(word_counts)
    total = sum(word_counts.values())
    if total == 0:
        return table
    for w in vocab:
        p_w = word_counts[w] / total
        for cat in target_cats:
            p_w_cat = (pair_counts[(w, cat)] + 1) / (cat_counts[cat] + len(vocab))
            table.salience[(w, cat)] = p_w_cat * math.log2(p_w_cat / p_w)
    return table


def yarowsky_baseline(
    t: Taxonomy,
    nouns: Sequence[NounOccurrence],
    table: SalienceTable,
    window_size: int = 51,
) -> list[Assignment]:
    """File-level answers: best salience-sum category among the senses' files.

    Always answers; ties and context-free targets fall to the ascending
    category name.  The answer is a category, so these assignments score at
    file level only.
    """
    out = []
    for i, occ in enumerate(nouns):
        candidates = sorted({t.synsets[s].lexfile for s in t.senses_of(occ.lemma)})
        if not candidates:
            raise ValueError(f"lemma {occ.lemma!r} is not in the taxonomy")
        window = build_window(nouns, i, window_size)
        scores = {cat: 0.0 for cat in candidates}
        for j, member in enumerate(window.members):
            if j == window.target:
                continue
            for cat in candidates:
                scores[cat] += table.salience.get((member.lemma, cat), 0.0)
        best = min(candidates, key=lambda cat: (-scores[cat], cat))
        out.append(
            Assignment(
                occurrence=occ,
                outcome=Outcome.FULL,
                senses=(),
                method=Method.YAROWSKY,
                category=best,
            )
        )
    return out


# -- conceptual distance -----------------------------------------------------


def conceptual_distance(t: Taxonomy, a: str, b: str) -> float:
    """Shortest-path length between two synsets, edges undirected, weight 1.

    Uses whatever relations the taxonomy was loaded with.  Synsets in
    different components are at ``math.inf``.
    """
    t._require(a)
    t._require(b)
    if a == b:
        return 0
    frontier = [a]
    seen = {a}
    dist = 0
    while frontier:
        dist += 1
        nxt = []
        for node in frontier:
            for neigh in t._down[node] + t._up[node]:
                if neigh == b:
                    return dist
                if neigh not in seen:
                    seen.add(neigh)
                    nxt.append(neigh)
        frontier = nxt
    return math.inf


class _DistanceCache:
    """Pairwise capped distances via targeted BFS with a pair-level memo.

    Only the pairs actually queried are kept, so long documents over a
    large taxonomy stay within memory.
    """

    def __init__(self, t: Taxonomy):
        self.t = t
        self.cap = len(t)  # disconnected pairs contribute the node count

        self._pairs: dict[tuple[str, str], int] = {}

    def distances(self, source: str, targets: set[str]) -> dict[str, int]:
        result: dict[str, int] = {}
        missing: set[str] = set()
        for b in targets:
            if b == source:
                result[b] = 0
                continue
            key = (source, b) if source <= b else (b, source)
            d = self._pairs.get(key)
            if d is None:
                missing.add(b)
            else:
                result[b] = d
        if missing:
            found: dict[str, int] = {}
            remaining = set(missing)
            seen = {source}
            frontier = [source]
            d = 0
            t = self.t
            while frontier and remaining:
                d += 1
                nxt = []
                for node in frontier:
                    for neigh in t._down[node] + t._up[node]:
                        if neigh not in seen:
                            seen.add(neigh)
                            nxt.append(neigh)
                            if neigh in remaining:
                                found[neigh] = d
                                remaining.discard(neigh)
                frontier = nxt
            for b in missing:
                dist = found.get(b, self.cap)
                key = (source, b) if source <= b else (b, source)
                self._pairs[key] = dist
                result[b] = dist
        return result

    def capped(self, a: str, b: str) -> int:
        return self.distances(a, {b})[b]

    def capped_sum(self, sense: str, context: Sequence[str]) -> int:
        dists = self.distances(sense, set(context))
        return sum(dists[c] for c in context)


def mutual_constraint_assignment(
    t: Taxonomy,
    lemmas: Sequence[str],
    rng: random.Random,
    cache: _DistanceCache | None = None,
) -> tuple[str, ...]:
    """Jointly pick one sense per lemma minimising the pairwise distance sum.

    Branch-and-bound over the sense combinations (distances are
    non-negative, so a partial sum already above the best bound prunes).
    All minimising combinations are kept, in lexicographic sense order, and
    one is drawn from ``rng`` (a single draw even without a tie).
    """
    if cache is None:
        cache = _DistanceCache(t)
    pools = []
    for lemma in lemmas:
        senses = t.senses_of(lemma)
        if not senses:
            raise ValueError(f"lemma {lemma!r} is not in the taxonomy")
        pools.append(senses)
    if not pools:
        return ()

    # One BFS per distinct sense fills the whole pairwise memo up front.
    pool_senses = sorted({s for pool in pools for s in pool})
    for s in pool_senses:
        cache.distances(s, set(pool_senses))

    best = math.inf
    optima: list[tuple[str, ...]] = []
    chosen: list[str] = []

    def extend(i: int, partial: float) -> None:
        nonlocal best, optima
        if i == len(pools):
            if partial < best:
                best = partial
                optima = [tuple(chosen)]
            elif partial == best:
                optima.append(tuple(chosen))
            return
        for sense in pools[i]:
            add = sum(cache.capped(prev, sense) for prev in chosen)
            if partial + add > best:
                continue
            chosen.append(sense)
            extend(i + 1, partial + add)
            chosen.pop()

    extend(0, 0.0)
    return rng.choice(optima)


def sussna_baseline(
    nouns: Sequence[NounOccurrence],
    t: Taxonomy,
    window_size: int = 41,
    mutual_size: int = 10,
    seed: int = 0,
) -> list[Assignment]:
    """Distance-minimising disambiguation with an initial mutual constraint.

    The first min(mutual_size, n) nouns are assigned jointly by exhaustive
    minimisation of their summed pairwise distances; every later noun takes
    the sense closest (summed distance) to the frozen senses of the
    preceding min(window_size - 1, available) nouns.  Ties are drawn
    uniformly from the seeded generator.  Disconnected pairs contribute a
    flat penalty of the taxonomy size so connected evidence dominates.
    """
    rng = random.Random(seed)
    cache = _DistanceCache(t)
    n = len(nouns)
    k = min(mutual_size, n)
    chosen: list[str] = []
    if k:
        chosen.extend(
            mutual_constraint_assignment(t, [o.lemma for o in nouns[:k]], rng, cache)
        )
    for i in range(k, n):
        context = chosen[max(0, i - (window_size - 1)) : i]
        senses = t.senses_of(nouns[i].lemma)
        if not senses:
            raise ValueError(f"lemma {nouns[i].lemma!r} is not in the taxonomy")
        best_cost = math.inf
        ties: list[str] = []
        for s in senses:
            cost = cache.capped_sum(s, context) if context else 0
            if cost < best_cost:
                best_cost, ties = cost, [s]
            elif cost == best_cost:
                ties.append(s)
        chosen.append(rng.choice(ties))
    return [
        Assignment(occ, Outcome.FULL, (sense,), Method.SUSSNA)
        for occ, sense in zip(nouns, chosen)
    ]


# -- table (de)serialisation -------------------------------------------------

_PRIOR_MARKER = "__prior__"


def save_frequency_table(table: FrequencyTable, out: IO) -> None:
    """``lemma<TAB>synset_id<TAB>count`` rows, sorted."""
    for (lemma, synset), count in sorted(table.counts.items()):
        out.write(f"{lemma}\t{synset}\t{count}\n")


def load_frequency_table(stream: IO) -> FrequencyTable:
    table = FrequencyTable()
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(f"line {lineno}: expected 3 tab-separated fields")
        table.counts[(fields[0], fields[1])] = int(fields[2])
    return table


def save_salience_table(table: SalienceTable, out: IO) -> None:
    """``lemma<TAB>category<TAB>value`` rows; priors use a reserved lemma."""
    for cat, prior in sorted(table.priors.items()):
        out.write(f"{_PRIOR_MARKER}\t{cat}\t{prior!r}\n")
    for (lemma, cat), value in sorted(table.salience.items()):
        out.write(f"{lemma}\t{cat}\t{value!r}\n")


def load_salience_table(stream: IO) -> SalienceTable:
    table = SalienceTable()
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(f"line {lineno}: expected 3 tab-separated fields")
        lemma, cat, value = fields
        if lemma == _PRIOR_MARKER:
            table.priors[cat] = float(value)
        else:
            table.salience[(lemma, cat)] = float(value)
    return table
