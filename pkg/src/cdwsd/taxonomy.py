"""Noun taxonomy: loading, validation, and subhierarchy metrics.

The taxonomy is a DAG of synsets connected by hypernym (is-a) edges and,
optionally, meronym (whole-part) edges.  Hypernym edges must be acyclic;
once meronym edges are folded in as additional parent->child links the
combined graph may contain cycles, so every traversal here uses a visited
set.  A loaded Taxonomy is immutable; metric queries are memoized with
single-assignment semantics and are safe to share across threads.

Input format (TIF, "taxonomy interchange format"): line-oriented UTF-8,
tab-separated, ``#`` starts a comment line.

    S<TAB>id<TAB>lexfile<TAB>lemma:lex_id[,lemma:lex_id...]
    H<TAB>child_id<TAB>parent_id      hypernym edge (parent is the hypernym)
    M<TAB>whole_id<TAB>part_id        meronym edge, whole -> part

Records may appear in any order; edges may forward-reference synsets that
appear later in the stream but must resolve by end of input.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import IO, Iterable, Iterator


class RelationMode(enum.Enum):
    """Which edge sets participate in downward/upward traversals."""

    HYPERNYMY = "hyper"
    HYPERNYMY_MERONYMY = "hyper+mero"

    @property
    def includes_meronymy(self) -> bool:
        return self is RelationMode.HYPERNYMY_MERONYMY


class TaxonomyError(ValueError):
    """Malformed TIF input or a violated taxonomy invariant."""

    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


@dataclass(frozen=True)
class Synset:
    """One concept: a set of (lemma, lex_id) pairs under a lexicographer file."""

    id: str
    lexfile: str
    lemmas: tuple[tuple[str, int], ...]
    hypernym_ids: tuple[str, ...] = ()
    meronym_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class SubhierarchyMetrics:
    """Size, height and mean branching of the subhierarchy rooted at a concept.

    ``descendants`` counts distinct synsets reachable downward, including the
    concept itself.  ``height`` is the longest downward path in edges.
    ``local_nhyp`` is the non-negative root of sum(x**i for i in 0..height)
    == descendants, i.e. the branching factor a uniform tree of this height
    and size would have; by convention it is 0 for leaves.
    """

    concept: str
    descendants: int
    height: int
    local_nhyp: float


#: Residual tolerance the nhyp root solve must meet.
NHYP_TOLERANCE = 1e-9


def geometric_power_sum(x: float, h: int) -> float:
    """sum(x**i for i in 0..h), summed termwise (robust near x == 1)."""
    total = 1.0
    term = 1.0
    for _ in range(h):
        term *= x
        total += term
    return total


def solve_nhyp(descendants: int, height: int) -> float:
    """Root of sum(x**i for i in 0..height) == descendants, by bisection.

    The sum is strictly increasing in x >= 0, equals 1 at x=0 and exceeds
    descendants at x=descendants, so a unique non-negative root exists for
    height >= 1.  Leaves (height 0) return 0 by convention.  Bisection runs
    to float convergence (at most 200 iterations), which leaves a residual
    far below NHYP_TOLERANCE at the scales a noun taxonomy reaches.
    """
    if height == 0:
        return 0.0
    lo, hi = 0.0, float(descendants)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if geometric_power_sum(mid, height) < descendants:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class Taxonomy:
    """Immutable, validated noun taxonomy with memoized metric queries."""

    def __init__(self, synsets: Iterable[Synset], relation_mode: RelationMode):
        self.relation_mode = relation_mode
        self.synsets: dict[str, Synset] = {}
        for syn in synsets:
            if syn.id in self.synsets:
                raise TaxonomyError(f"duplicate synset id {syn.id!r}")
            self.synsets[syn.id] = syn

        self._validate_structure()
        self._build_indexes()

        # Memo caches; written at most once per key (identical values if racy).
        self._metrics: dict[str, SubhierarchyMetrics] = {}
        self._ancestors: dict[str, frozenset[str]] = {}
        self._heights: dict[str, int] = {}
        self._reach_cycle_memo: dict[str, bool] = {}
        self._global_nhyp: float | None = None

    # -- construction ------------------------------------------------------

    def _validate_structure(self) -> None:
        for syn in self.synsets.values():
            if not syn.lexfile:
                raise TaxonomyError(f"synset {syn.id!r} has empty lexfile")
            if not syn.lemmas:
                raise TaxonomyError(f"synset {syn.id!r} has no lemmas")
            for other in syn.hypernym_ids:
                if other not in self.synsets:
                    raise TaxonomyError(
                        f"synset {syn.id!r} references unknown hypernym {other!r}"
                    )
            for other in syn.meronym_ids:
                if other not in self.synsets:
                    raise TaxonomyError(
                        f"synset {syn.id!r} references unknown meronym {other!r}"
                    )

        # Hypernym edges must be acyclic (iterative three-color DFS).
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {sid: WHITE for sid in self.synsets}
        for start in self.synsets:
            if color[start] != WHITE:
                continue
            stack: list[tuple[str, Iterator[str]]] = [
                (start, iter(self.synsets[start].hypernym_ids))
            ]
            color[start] = GRAY
            while stack:
                node, it = stack[-1]
                advanced = False
                for nxt in it:
                    if color[nxt] == GRAY:
                        raise TaxonomyError(f"hypernym cycle through {nxt!r}")
                    if color[nxt] == WHITE:
                        color[nxt] = GRAY
                        stack.append((nxt, iter(self.synsets[nxt].hypernym_ids)))
                        advanced = True
                        break
                if not advanced:
                    color[node] = BLACK
                    stack.pop()

    def _build_indexes(self) -> None:
        self.lemma_index: dict[str, tuple[str, ...]] = {}
        self._sense_keys: dict[tuple[str, str, int], str] = {}
        lemma_acc: dict[str, list[str]] = {}
        for syn in self.synsets.values():
            for lemma, lex_id in syn.lemmas:
                key = (lemma, syn.lexfile, lex_id)
                if key in self._sense_keys:
                    raise TaxonomyError(
                        f"duplicate sense key {lemma}%{syn.lexfile}.{lex_id} "
                        f"in {self._sense_keys[key]!r} and {syn.id!r}"
                    )
                self._sense_keys[key] = syn.id
                lemma_acc.setdefault(lemma, []).append(syn.id)
        for lemma, ids in lemma_acc.items():
            self.lemma_index[lemma] = tuple(sorted(set(ids)))

        self.roots: tuple[str, ...] = tuple(
            sorted(sid for sid, syn in self.synsets.items() if not syn.hypernym_ids)
        )

        # Downward (parent -> child) and upward adjacency under the mode.
        down: dict[str, set[str]] = {sid: set() for sid in self.synsets}
        up: dict[str, set[str]] = {sid: set() for sid in self.synsets}
        for syn in self.synsets.values():
            for parent in syn.hypernym_ids:
                down[parent].add(syn.id)
                up[syn.id].add(parent)
            if self.relation_mode.includes_meronymy:
                for part in syn.meronym_ids:
                    down[syn.id].add(part)
                    up[part].add(syn.id)
        self._down = {sid: tuple(sorted(kids)) for sid, kids in down.items()}
        self._up = {sid: tuple(sorted(parents)) for sid, parents in up.items()}

        # Nodes on a downward cycle (only possible once meronymy is folded
        # in); height computation needs to know whether the fast acyclic
        # path is safe.
        self._cyclic_nodes = self._find_cyclic_nodes()

    def _find_cyclic_nodes(self) -> frozenset[str]:
        # Tarjan SCC, iterative; nodes in a multi-node SCC or with a self-loop.
        index: dict[str, int] = {}
        lowlink: dict[str, int] = {}
        on_stack: set[str] = set()
        scc_stack: list[str] = []
        cyclic: set[str] = set()
        counter = 0
        for root in self.synsets:
            if root in index:
                continue
            work: list[tuple[str, int]] = [(root, 0)]
            while work:
                node, child_i = work[-1]
                if child_i == 0:
                    index[node] = lowlink[node] = counter
                    counter += 1
                    scc_stack.append(node)
                    on_stack.add(node)
                kids = self._down[node]
                if child_i < len(kids):
                    work[-1] = (node, child_i + 1)
                    nxt = kids[child_i]
                    if nxt not in index:
                        work.append((nxt, 0))
                    elif nxt in on_stack:
                        lowlink[node] = min(lowlink[node], index[nxt])
                else:
                    work.pop()
                    if work:
                        parent = work[-1][0]
                        lowlink[parent] = min(lowlink[parent], lowlink[node])
                    if lowlink[node] == index[node]:
                        comp = []
                        while True:
                            member = scc_stack.pop()
                            on_stack.discard(member)
                            comp.append(member)
                            if member == node:
                                break
                        if len(comp) > 1:
                            cyclic.update(comp)
                        elif comp[0] in self._down[comp[0]]:
                            cyclic.add(comp[0])
        return frozenset(cyclic)

    # -- queries -----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.synsets)

    def __contains__(self, concept: str) -> bool:
        return concept in self.synsets

    def _require(self, concept: str) -> Synset:
        try:
            return self.synsets[concept]
        except KeyError:
            raise TaxonomyError(f"unknown synset id {concept!r}") from None

    def senses_of(self, lemma: str) -> tuple[str, ...]:
        """Synset ids carrying ``lemma`` (case-insensitive), ascending; () if none."""
        return self.lemma_index.get(lemma.lower(), ())

    def resolve_sense_key(self, lemma: str, lexfile: str, lex_id: int) -> str | None:
        """Synset id joined through (lemma, lexfile, lex_id), or None."""
        return self._sense_keys.get((lemma.lower(), lexfile, lex_id))

    def sense_key_of(self, lemma: str, concept: str) -> str | None:
        """Render the ``lexfile.lex_id`` key that names ``concept`` for ``lemma``."""
        syn = self._require(concept)
        lex_ids = sorted(lid for lem, lid in syn.lemmas if lem == lemma.lower())
        if not lex_ids:
            return None
        return f"{syn.lexfile}.{lex_ids[0]}"

    def children_of(self, concept: str) -> tuple[str, ...]:
        self._require(concept)
        return self._down[concept]

    def ancestors_of(self, sense: str) -> frozenset[str]:
        """All synsets reachable upward from ``sense``, including itself.

        Upward means hypernym edges, plus part->whole once meronymy is in
        the relation mode.  Cycle-safe.
        """
        self._require(sense)
        cached = self._ancestors.get(sense)
        if cached is not None:
            return cached
        seen = {sense}
        frontier = [sense]
        while frontier:
            node = frontier.pop()
            for parent in self._up[node]:
                if parent not in seen:
                    seen.add(parent)
                    frontier.append(parent)
        result = frozenset(seen)
        self._ancestors[sense] = result
        return result

    def descendant_set(self, concept: str) -> frozenset[str]:
        """Distinct synsets reachable downward from ``concept``, including it."""
        self._require(concept)
        seen = {concept}
        frontier = [concept]
        while frontier:
            node = frontier.pop()
            for child in self._down[node]:
                if child not in seen:
                    seen.add(child)
                    frontier.append(child)
        return frozenset(seen)

    def _reaches_cycle(self, concept: str) -> bool:
        if not self._cyclic_nodes:
            return False
        memo = self._reach_cycle_memo
        cached = memo.get(concept)
        if cached is not None:
            return cached
        # Restricted to nodes that are not themselves on a cycle, the
        # downward graph is acyclic, so a memoized post-order DFS is sound;
        # cyclic nodes act as True leaves.
        stack: list[tuple[str, Iterator[str]]] = [(concept, iter(self._down[concept]))]
        while stack:
            node, it = stack[-1]
            if node in self._cyclic_nodes:
                memo[node] = True
                stack.pop()
                continue
            advanced = False
            for child in it:
                if child not in memo:
                    stack.append((child, iter(self._down[child])))
                    advanced = True
                    break
            if not advanced:
                memo[node] = any(memo[c] for c in self._down[node])
                stack.pop()
        return memo[concept]

    def _height_of(self, concept: str) -> int:
        """Longest simple downward path, in edges.

        On the acyclic fast path (always taken in hypernymy-only mode) this
        memoizes across concepts in one post-order pass.  Concepts that can
        reach a relation cycle fall back to exhaustive simple-path search,
        exponential only in the size of the cyclic region.
        """
        cached = self._heights.get(concept)
        if cached is not None:
            return cached

        if not self._reaches_cycle(concept):
            stack: list[tuple[str, Iterator[str]]] = [(concept, iter(self._down[concept]))]
            while stack:
                node, it = stack[-1]
                advanced = False
                for child in it:
                    if child not in self._heights:
                        stack.append((child, iter(self._down[child])))
                        advanced = True
                        break
                if not advanced:
                    self._heights[node] = max(
                        (self._heights[c] + 1 for c in self._down[node]), default=0
                    )
                    stack.pop()
            return self._heights[concept]

        best = 0
        path: list[str] = [concept]
        path_set = {concept}
        iters = [iter(self._down[concept])]
        while iters:
            advanced = False
            for child in iters[-1]:
                if child not in path_set:
                    path.append(child)
                    path_set.add(child)
                    iters.append(iter(self._down[child]))
                    best = max(best, len(path) - 1)
                    advanced = True
                    break
            if not advanced:
                iters.pop()
                path_set.discard(path.pop())
        self._heights[concept] = best
        return best

    def subhierarchy_metrics(self, concept: str) -> SubhierarchyMetrics:
        """Descendant count, height and local nhyp for ``concept`` (memoized)."""
        self._require(concept)
        cached = self._metrics.get(concept)
        if cached is not None:
            return cached
        descendants = len(self.descendant_set(concept))
        height = self._height_of(concept)
        metrics = SubhierarchyMetrics(
            concept=concept,
            descendants=descendants,
            height=height,
            local_nhyp=solve_nhyp(descendants, height),
        )
        self._metrics[concept] = metrics
        return metrics

    def global_nhyp(self) -> float:
        """One nhyp estimated from the whole hierarchy.

        Solves sum(x**i for i in 0..H) == N where N is the synset count and
        H the maximum height over the roots.
        """
        if self._global_nhyp is None:
            if not self.synsets:
                raise TaxonomyError("empty taxonomy")
            max_height = max((self._height_of(r) for r in self.roots), default=0)
            self._global_nhyp = solve_nhyp(len(self.synsets), max_height)
        return self._global_nhyp


# -- TIF parsing -----------------------------------------------------------


def _parse_lemma_field(text: str, lineno: int) -> tuple[tuple[str, int], ...]:
    lemmas = []
    for chunk in text.split(","):
        lemma, sep, lex = chunk.rpartition(":")
        if not sep or not lemma:
            raise TaxonomyError(f"bad lemma entry {chunk!r}", lineno)
        if not lex.isdigit():
            raise TaxonomyError(f"lex_id must be a non-negative integer in {chunk!r}", lineno)
        lemmas.append((lemma.lower(), int(lex)))
    return tuple(lemmas)


def load_taxonomy(stream: IO, relation_mode: RelationMode = RelationMode.HYPERNYMY) -> Taxonomy:
    """Parse a TIF stream (bytes or text) into a validated Taxonomy.

    Raises TaxonomyError for syntax problems (with a line number), dangling
    edge references, hypernym cycles, duplicate synset ids, and duplicate
    (lemma, lexfile, lex_id) sense keys.
    """
    records: dict[str, tuple[int, str, tuple[tuple[str, int], ...]]] = {}
    hyper: dict[str, list[str]] = {}
    mero: dict[str, list[str]] = {}
    edges: list[tuple[str, str, str, int]] = []

    for lineno, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        kind = fields[0]
        if kind == "S":
            if len(fields) != 4:
                raise TaxonomyError(f"S record needs 4 fields, got {len(fields)}", lineno)
            _, sid, lexfile, lemma_field = fields
            if sid in records:
                raise TaxonomyError(f"duplicate synset id {sid!r}", lineno)
            records[sid] = (lineno, lexfile, _parse_lemma_field(lemma_field, lineno))
        elif kind in ("H", "M"):
            if len(fields) != 3:
                raise TaxonomyError(f"{kind} record needs 3 fields, got {len(fields)}", lineno)
            edges.append((kind, fields[1], fields[2], lineno))
        else:
            raise TaxonomyError(f"unknown record type {kind!r}", lineno)

    for kind, a, b, lineno in edges:
        for sid in (a, b):
            if sid not in records:
                raise TaxonomyError(f"edge references unknown synset {sid!r}", lineno)
        if kind == "H":
            hyper.setdefault(a, []).append(b)
        else:
            mero.setdefault(a, []).append(b)

    synsets = [
        Synset(
            id=sid,
            lexfile=lexfile,
            lemmas=lemmas,
            hypernym_ids=tuple(sorted(set(hyper.get(sid, ())))),
            meronym_ids=tuple(sorted(set(mero.get(sid, ())))),
        )
        for sid, (_, lexfile, lemmas) in records.items()
    ]
    return Taxonomy(synsets, relation_mode)
