"""Shared fixtures and independent brute-force oracles.

The oracles deliberately avoid the library's precomputed indexes and
memoized traversals: adjacency is rebuilt from the raw Synset records and
reachability/height/nhyp are recomputed from scratch, so agreement with
the optimized code is meaningful.
"""

from __future__ import annotations

import io
import random
from pathlib import Path

from cdwsd.density import DensityParams, NhypMode
from cdwsd.taxonomy import RelationMode, Taxonomy, load_taxonomy

DATA = Path(__file__).parent / "data"

LEXFILES = ["noun.animal", "noun.artifact", "noun.group", "noun.act", "noun.state"]


def build_taxonomy(text: str, mode: RelationMode = RelationMode.HYPERNYMY) -> Taxonomy:
    return load_taxonomy(io.StringIO(text), mode)


def load_data_taxonomy(name: str, mode: RelationMode = RelationMode.HYPERNYMY) -> Taxonomy:
    with open(DATA / name, "r", encoding="utf-8") as fh:
        return load_taxonomy(fh, mode)


def random_tif(
    rng: random.Random,
    max_synsets: int = 200,
    meronymy: bool = False,
    min_synsets: int = 1,
) -> str:
    """Random TIF text: acyclic hypernym DAG, forward-only meronym edges.

    Forward-only meronyms keep the combined downward graph acyclic, which
    the fast height path and the recursive brute-force oracle both rely on;
    cyclic graphs get their own hand-built tests.
    """
    n = rng.randint(min_synsets, max_synsets)
    lines = []
    lemma_pool = max(2, n // 2)
    used_keys: set[tuple[str, str, int]] = set()
    for i in range(n):
        lexfile = rng.choice(LEXFILES)
        entries = []
        for _ in range(rng.choice([1, 1, 1, 2])):
            lemma = f"lemma{rng.randrange(lemma_pool)}"
            lex_id = 0
            while (lemma, lexfile, lex_id) in used_keys:
                lex_id += 1
            used_keys.add((lemma, lexfile, lex_id))
            entries.append(f"{lemma}:{lex_id}")
        lines.append(f"S\ts{i:03d}\t{lexfile}\t{','.join(entries)}")
    for i in range(1, n):
        for _ in range(rng.choice([0, 1, 1, 1, 2])):
            parent = rng.randrange(i)
            lines.append(f"H\ts{i:03d}\ts{parent:03d}")
    if meronymy and n > 1:
        for _ in range(rng.randint(0, max(1, n // 5))):
            whole = rng.randrange(n - 1)
            part = rng.randrange(whole + 1, n)
            lines.append(f"M\ts{whole:03d}\ts{part:03d}")
    return "\n".join(lines) + "\n"


def random_taxonomy(
    rng: random.Random,
    max_synsets: int = 200,
    meronymy: bool = False,
    min_synsets: int = 1,
) -> Taxonomy:
    mode = RelationMode.HYPERNYMY_MERONYMY if meronymy else RelationMode.HYPERNYMY
    return build_taxonomy(random_tif(rng, max_synsets, meronymy, min_synsets), mode)


# -- brute-force oracles -----------------------------------------------------


def brute_children(t: Taxonomy) -> dict[str, set[str]]:
    down: dict[str, set[str]] = {sid: set() for sid in t.synsets}
    for syn in t.synsets.values():
        for parent in syn.hypernym_ids:
            down[parent].add(syn.id)
        if t.relation_mode is RelationMode.HYPERNYMY_MERONYMY:
            for part in syn.meronym_ids:
                down[syn.id].add(part)
    return down


def brute_reachable(t: Taxonomy, concept: str) -> set[str]:
    down = brute_children(t)
    seen = {concept}
    frontier = [concept]
    while frontier:
        node = frontier.pop()
        for child in down[node]:
            if child not in seen:
                seen.add(child)
                frontier.append(child)
    return seen


def brute_height(t: Taxonomy, concept: str) -> int:
    """Longest downward path by memoized recursion; inputs must be acyclic."""
    down = brute_children(t)
    memo: dict[str, int] = {}

    def depth(node: str) -> int:
        if node not in memo:
            memo[node] = max((depth(c) + 1 for c in down[node]), default=0)
        return memo[node]

    return depth(concept)


def brute_nhyp(descendants: int, height: int) -> float:
    """Independent root solve: halve the interval until it collapses."""
    if height == 0:
        return 0.0

    def f(x: float) -> float:
        return sum(x**i for i in range(height + 1)) - descendants

    lo, hi = 0.0, float(descendants)
    while True:
        mid = (lo + hi) / 2
        if mid == lo or mid == hi:
            return mid
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid


def brute_cd(nhyp: float, m: int, descendants: int, exponent: float = 0.20) -> float:
    total = 0.0
    for i in range(m):
        total += 1.0 if i == 0 else nhyp ** (i**exponent)
    return total / descendants


def brute_score_all(
    t: Taxonomy,
    window: list[tuple[str, set[str]]],
    params: DensityParams,
    dedup: bool = True,
) -> dict[str, tuple[int, float]]:
    """(marks, cd) for EVERY synset, by downward reachability + membership.

    Synsets holding no marks map to (0, 0.0).
    """
    global_nhyp = 0.0
    if params.nhyp_mode is NhypMode.GLOBAL:
        roots = [sid for sid, syn in t.synsets.items() if not syn.hypernym_ids]
        big_h = max((brute_height(t, r) for r in roots), default=0)
        global_nhyp = brute_nhyp(len(t.synsets), big_h)
    scores: dict[str, tuple[int, float]] = {}
    for concept in t.synsets:
        reach = brute_reachable(t, concept)
        pairs = set()
        for idx, (lemma, senses) in enumerate(window):
            key = lemma if dedup else idx
            for s in senses:
                if s in reach:
                    pairs.add((key, s))
        m = len(pairs)
        if m == 0:
            scores[concept] = (0, 0.0)
            continue
        descendants = len(reach)
        height = brute_height(t, concept)
        nhyp = (
            brute_nhyp(descendants, height)
            if params.nhyp_mode is NhypMode.LOCAL
            else global_nhyp
        )
        scores[concept] = (m, brute_cd(nhyp, m, descendants, params.smoothing_exponent))
    return scores


def random_window(
    rng: random.Random, t: Taxonomy, max_words: int = 5
) -> list[tuple[str, set[str]]]:
    """Random window sense sets: lemmas may repeat, subsets are non-empty."""
    lemmas = sorted(t.lemma_index)
    window = []
    for _ in range(rng.randint(1, max_words)):
        lemma = rng.choice(lemmas)
        senses = list(t.senses_of(lemma))
        k = rng.randint(1, len(senses))
        window.append((lemma, set(rng.sample(senses, k))))
    return window
