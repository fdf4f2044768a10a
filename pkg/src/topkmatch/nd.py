"""Top-k perfect matching on graphs of bounded neighborhood diversity.

The vertex set splits into twin classes.  A top-k solution is found by guessing
how many of its 2k top-edge endpoints land in each class, solving a
type-constrained maximum weight matching for every guess, and keeping the best
guess that extends to a perfect matching.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .graph import Matching, WeightedColoredGraph, induced_subgraph
from .matching import max_cardinality_mate, max_weight_perfect_mate


@dataclass
class SolveStats:
    """Work counters reported next to solver results."""

    tuples_visited: int = 0
    mwpm_calls: int = 0
    recursion_nodes: int = 0
    edge_sets: int = 0
    budgets: int = 0
    tight_sets: int = 0
    base_cases: int = 0

    def as_dict(self) -> dict[str, int]:
        return dict(self.__dict__)


@dataclass(frozen=True)
class TypePartition:
    classes: tuple[tuple[int, ...], ...]
    class_of: tuple[int, ...]
    adjacent: tuple[tuple[bool, ...], ...]
    clique: tuple[bool, ...]

    @property
    def gamma(self) -> int:
        return len(self.classes)

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    def class_pairs(self) -> list[tuple[int, int]]:
        """Index set for band counts: adjacent class pairs and clique classes."""
        pairs = []
        for i in range(self.gamma):
            for j in range(i, self.gamma):
                if i == j:
                    if self.clique[i]:
                        pairs.append((i, i))
                elif self.adjacent[i][j]:
                    pairs.append((i, j))
        return pairs


def _are_twins(nbrs: Sequence[frozenset[int]], u: int, v: int) -> bool:
    return nbrs[u] - {v} == nbrs[v] - {u}


def compute_type_partition(graph: WeightedColoredGraph) -> TypePartition:
    """Partition into twin classes: ``u ~ v`` iff ``N(u) - {v} == N(v) - {u}``.

    The relation is an equivalence, so comparing against one representative
    per class is enough and the result is the minimum partition.
    """
    nbrs = [frozenset(graph.neighbors(v)) for v in range(graph.vertex_count)]
    reps: list[int] = []
    members: list[list[int]] = []
    class_of = [0] * graph.vertex_count
    for v in range(graph.vertex_count):
        for ci, r in enumerate(reps):
            if _are_twins(nbrs, r, v):
                members[ci].append(v)
                class_of[v] = ci
                break
        else:
            class_of[v] = len(reps)
            reps.append(v)
            members.append([v])
    g = len(reps)
    adjacent = [[False] * g for _ in range(g)]
    for i in range(g):
        for j in range(g):
            if i != j:
                adjacent[i][j] = reps[j] in nbrs[reps[i]]
    clique = [len(m) >= 2 and m[1] in nbrs[m[0]] for m in members]
    return TypePartition(
        classes=tuple(tuple(m) for m in members),
        class_of=tuple(class_of),
        adjacent=tuple(tuple(r) for r in adjacent),
        clique=tuple(clique),
    )


def check_type_partition(graph: WeightedColoredGraph, partition: TypePartition) -> None:
    """Raise ``ValueError`` unless every class is a set of pairwise twins covering V."""
    seen = sorted(v for c in partition.classes for v in c)
    if seen != list(range(graph.vertex_count)):
        raise ValueError("classes do not partition the vertex set")
    nbrs = [frozenset(graph.neighbors(v)) for v in range(graph.vertex_count)]
    for c in partition.classes:
        for u, v in itertools.combinations(c, 2):
            if not _are_twins(nbrs, u, v):
                raise ValueError(f"vertices {u} and {v} share a class but are not twins")


def tc_mwm(
    graph: WeightedColoredGraph,
    partition: TypePartition,
    counts: Sequence[int],
    stats: SolveStats | None = None,
) -> Matching | None:
    """Max-weight matching covering exactly ``counts[i]`` vertices of class ``i``.

    Adds ``|V_i| - counts[i]`` killer vertices joined to all of class ``i`` by
    weight-0 edges, solves MWPM on the result and drops the killer edges.
    """
    if len(counts) != partition.gamma:
        raise ValueError("need one count per class")
    if sum(counts) % 2:
        raise ValueError("class counts must sum to an even number")
    sizes = partition.sizes()
    for c, s in zip(counts, sizes):
        if not 0 <= c <= s:
            raise ValueError(f"class count {c} outside [0, {s}]")

    nv = graph.vertex_count
    edges = [(e.u, e.v, e.w) for e in graph.edges]
    nxt = nv
    for members, c in zip(partition.classes, counts):
        for _ in range(len(members) - c):
            edges.extend((nxt, v, 0) for v in members)
            nxt += 1
    if stats is not None:
        stats.mwpm_calls += 1
    mate = max_weight_perfect_mate(nxt, edges)
    if mate is None:
        return None
    ids = [graph.edge_id(v, mate[v]) for v in range(nv) if v < mate[v] < nv]
    return Matching(graph, frozenset(ids))


def perfect_completion(graph: WeightedColoredGraph, partial: Matching) -> Matching | None:
    """Extend ``partial`` by a perfect matching of the uncovered vertices, if any."""
    used = partial.vertices
    rest = [v for v in range(graph.vertex_count) if v not in used]
    sub = induced_subgraph(graph, rest)
    adj = [sub.graph.neighbors(v) for v in range(sub.graph.vertex_count)]
    mate = max_cardinality_mate(sub.graph.vertex_count, adj)
    if any(m == -1 for m in mate):
        return None
    extra = [
        graph.edge_id(sub.to_parent[v], sub.to_parent[m]) for v, m in enumerate(mate) if v < m
    ]
    return Matching(graph, partial.edges | frozenset(extra))


def bounded_compositions(total: int, caps: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All tuples ``c`` with ``0 <= c[i] <= caps[i]`` and ``sum(c) == total``, lexicographic."""
    g = len(caps)
    if g == 0:
        if total == 0:
            yield ()
        return
    suffix = [0] * (g + 1)
    for i in range(g - 1, -1, -1):
        suffix[i] = suffix[i + 1] + caps[i]
    cur = [0] * g

    def rec(i, left):
        if i == g - 1:
            if left <= caps[i]:
                cur[i] = left
                yield tuple(cur)
            return
        lo = max(0, left - suffix[i + 1])
        for c in range(lo, min(caps[i], left) + 1):
            cur[i] = c
            yield from rec(i + 1, left - c)

    if total <= suffix[0]:
        yield from rec(0, total)


def better(candidate: Matching, incumbent: Matching | None, k: int) -> bool:
    """Objective first, then the lexicographically smaller sorted edge-id tuple."""
    if incumbent is None:
        return True
    a, b = candidate.topk(k), incumbent.topk(k)
    if a != b:
        return a > b
    return sorted(candidate.edges) < sorted(incumbent.edges)


def _check_k(graph: WeightedColoredGraph, k: int) -> None:
    if k < 0 or k > graph.n:
        raise ValueError(f"k={k} must lie in [0, n={graph.n}]")


def tkpm_exact_nd(
    graph: WeightedColoredGraph,
    k: int,
    partition: TypePartition | None = None,
    stats: SolveStats | None = None,
) -> Matching | None:
    """Perfect matching maximizing the sum of its k heaviest edges, or ``None``.

    Class counts range over ``[0, min(2k, |V_i|)]`` with total ``2k``; a clique
    class can host both endpoints of every top edge.
    """
    _check_k(graph, k)
    if partition is None:
        partition = compute_type_partition(graph)
    caps = [min(2 * k, s) for s in partition.sizes()]
    best = None
    for counts in bounded_compositions(2 * k, caps):
        if stats is not None:
            stats.tuples_visited += 1
        top = tc_mwm(graph, partition, counts, stats)
        if top is None:
            continue
        full = perfect_completion(graph, top)
        if full is None:
            continue
        if better(full, best, k):
            best = full
    return best


def geometric_levels(k: int, epsilon: float) -> list[int]:
    """``{0, 1, ceil(a), ceil(a^2), ...} | {k}`` for ``a = 1 / (1 - epsilon)``, capped at k."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if k < 0:
        raise ValueError("k must be nonnegative")
    # exact rationals: float powers can push a ceiling up by one
    alpha = 1 / (1 - Fraction(str(epsilon)))
    levels = {0, k}
    if k >= 1:
        levels.add(1)
    j = 1
    while True:
        value = math.ceil(alpha**j)
        if value > k:
            break
        levels.add(value)
        j += 1
    return sorted(levels)


def band_counts_to_type_counts(
    band_counts: dict[tuple[int, int], int], gamma: int
) -> tuple[int, ...]:
    """Vertices covered per class by the given number of edges per class pair."""
    c = [0] * gamma
    for (i, j), b in band_counts.items():
        if i == j:
            c[i] += 2 * b
        else:
            c[i] += b
            c[j] += b
    return tuple(c)


def band_count_tuples(levels: Sequence[int], slots: int, k: int) -> Iterator[tuple[int, ...]]:
    """Tuples in ``levels ** slots`` whose sum is at most k."""
    cur = [0] * slots

    def rec(i, left):
        if i == slots:
            yield tuple(cur)
            return
        for a in levels:
            if a > left:
                break
            cur[i] = a
            yield from rec(i + 1, left - a)

    yield from rec(0, k)


def tkpm_approx_nd(
    graph: WeightedColoredGraph,
    k: int,
    epsilon: float,
    partition: TypePartition | None = None,
    stats: SolveStats | None = None,
) -> Matching | None:
    """Perfect matching whose top-k value is at least ``(1 - epsilon)`` of the optimum."""
    _check_k(graph, k)
    levels = geometric_levels(k, epsilon)
    if partition is None:
        partition = compute_type_partition(graph)
    pairs = partition.class_pairs()
    sizes = partition.sizes()
    best = None
    for b in band_count_tuples(levels, len(pairs), k):
        if stats is not None:
            stats.tuples_visited += 1
        counts = band_counts_to_type_counts(dict(zip(pairs, b)), partition.gamma)
        if any(c > s for c, s in zip(counts, sizes)):
            continue
        top = tc_mwm(graph, partition, counts, stats)
        if top is None:
            continue
        full = perfect_completion(graph, top)
        if full is None:
            continue
        if better(full, best, k):
            best = full
    return best


def exact_iteration_count(k: int, gamma: int) -> int:
    """Closed-form outer-loop count when no class cap binds."""
    return math.comb(2 * k + gamma - 1, gamma - 1)
