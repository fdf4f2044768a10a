"""Separator recursion for blowups of bounded-bandwidth prototypes.

A node of the recursion is a run of consecutive blobs of the bandwidth
ordering together with the vertices still unmatched in them.  The node picks a
window of at most ``phi`` blobs touched by no tight band, guesses the matching
edges that leave the window (at most ``threshold`` per band), and recurses on
the blobs before and after the window.  Vertices of the window left untouched
by the guess are matched inside their own blobs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .graph import Color, Matching, WeightedColoredGraph, induced_subgraph
from .matching import max_cardinality_mate
from .nd import SolveStats, better, tkpm_exact_nd
from .oracle import brute_force_em
from .prototype import (
    Prototype,
    bandwidth_of_ordering,
    consecutive_blob_of,
    find_loose_separator,
    is_blowup_of,
    guaranteed_window_count,
    sub_prototype,
)

DEFAULT_BASE_BLOBS = 16
TKPM_THRESHOLD_ALPHA = 0.5
EM_THRESHOLD_ALPHA = 12 / 13

EMSolver = Callable[[WeightedColoredGraph, int], "Matching | None"]


@dataclass(frozen=True)
class RecursionBudget:
    k_edges: int
    k_blobs: int
    k_1: int
    k_2: int

    @property
    def total(self) -> int:
        return self.k_edges + self.k_blobs + self.k_1 + self.k_2


def budgets(k: int) -> Iterator[RecursionBudget]:
    """All ``(k', k_blobs, k_1, k_2)`` in ``[0, k]^4`` summing to k."""
    for kb in range(k + 1):
        for k1 in range(k + 1 - kb):
            for k2 in range(k + 1 - kb - k1):
                yield RecursionBudget(k - kb - k1 - k2, kb, k1, k2)


def default_threshold(n: int, alpha: float) -> int:
    return max(1, math.ceil(n**alpha))


@dataclass
class _Context:
    graph: WeightedColoredGraph
    proto: Prototype
    blob_of: tuple[int, ...]
    phi: int
    threshold: int
    base_blobs: int
    stats: SolveStats
    cache: dict | None
    members: list[list[int]]


def _has_pm(graph: WeightedColoredGraph, vertices: frozenset[int]) -> bool:
    if len(vertices) % 2:
        return False
    sub = induced_subgraph(graph, vertices)
    adj = [sub.graph.neighbors(v) for v in range(sub.graph.vertex_count)]
    return all(m != -1 for m in max_cardinality_mate(sub.graph.vertex_count, adj))


def _local_view(ctx: _Context, blobs: tuple[int, ...], tight: frozenset):
    sub, to_root = sub_prototype(ctx.proto, blobs)
    local = {b: i for i, b in enumerate(to_root)}
    tight_local = [(local[i], local[j]) for i, j in tight if i in local and j in local]
    return sub, to_root, tight_local


def _crossing_edge_sets(
    ctx: _Context, vertices: frozenset[int], window_vertices: list[int]
) -> Iterator[tuple[int, ...]]:
    """Matchings of edges leaving window blobs, capped at ``threshold`` per band.

    Edges inside a single blob are excluded; they belong to the blob subproblem.
    """
    graph, blob_of, cap = ctx.graph, ctx.blob_of, ctx.threshold
    window_set = set(window_vertices)
    options: dict[int, list[tuple[int, int, tuple[int, int]]]] = {}
    for u in window_vertices:
        opts = []
        for eid in graph.adjacency[u]:
            e = graph.edges[eid]
            v = e.v if e.u == u else e.u
            if v not in vertices or blob_of[u] == blob_of[v]:
                continue
            if v in window_set and v < u:
                continue  # offered once, from the smaller window endpoint
            band = (min(blob_of[u], blob_of[v]), max(blob_of[u], blob_of[v]))
            opts.append((eid, v, band))
        options[u] = opts

    chosen: list[int] = []
    covered: set[int] = set()
    per_band: dict[tuple[int, int], int] = {}

    def rec(i):
        if i == len(window_vertices):
            assert all(c <= cap for c in per_band.values())
            yield tuple(chosen)
            return
        u = window_vertices[i]
        yield from rec(i + 1)
        if u in covered:
            return
        covered.add(u)
        for eid, v, band in options[u]:
            if v in covered or per_band.get(band, 0) >= cap:
                continue
            covered.add(v)
            per_band[band] = per_band.get(band, 0) + 1
            chosen.append(eid)
            yield from rec(i + 1)
            chosen.pop()
            per_band[band] -= 1
            covered.discard(v)
        covered.discard(u)

    yield from rec(0)


def _split(ctx: _Context, vertices: frozenset[int], sep_blobs, before, after, taken: frozenset[int]):
    def gather(blobs):
        return frozenset(v for b in blobs for v in ctx.members[b] if v in vertices and v not in taken)

    return gather(before), gather(after), gather(sep_blobs)


def _blob_graph_vertices(ctx: _Context, verts: frozenset[int]) -> WeightedColoredGraph:
    """Induced graph on window leftovers keeping only edges inside one blob."""
    sub = induced_subgraph(ctx.graph, verts)
    keep = [
        (e.u, e.v, e.w, e.color)
        for e in sub.graph.edges
        if ctx.blob_of[sub.to_parent[e.u]] == ctx.blob_of[sub.to_parent[e.v]]
    ]
    return sub, WeightedColoredGraph(sub.graph.vertex_count, keep)


def _base_tkpm(ctx: _Context, vertices: frozenset[int], k: int) -> frozenset[int] | None:
    key = (vertices, k)
    if ctx.cache is not None and key in ctx.cache:
        return ctx.cache[key]
    ctx.stats.base_cases += 1
    sub = induced_subgraph(ctx.graph, vertices)
    m = tkpm_exact_nd(sub.graph, min(k, sub.graph.n), stats=ctx.stats)
    out = None if m is None else frozenset(sub.lift(m).edges)
    if ctx.cache is not None:
        ctx.cache[key] = out
    return out


def _blob_tkpm(ctx: _Context, verts: frozenset[int], k: int) -> frozenset[int] | None:
    sub, blob_graph = _blob_graph_vertices(ctx, verts)
    m = tkpm_exact_nd(blob_graph, min(k, blob_graph.n), stats=ctx.stats)
    if m is None:
        return None
    return frozenset(sub.lift_edge_ids(m.edges))


def _topk(graph: WeightedColoredGraph, edges: frozenset[int], k: int) -> int:
    ws = sorted((graph.edges[e].w for e in edges), reverse=True)
    return sum(ws[:k])


def _bbb_node(
    ctx: _Context,
    k: int,
    blobs: tuple[int, ...],
    vertices: frozenset[int],
    tight: frozenset[tuple[int, int]],
) -> frozenset[int] | None:
    ctx.stats.recursion_nodes += 1
    if not _has_pm(ctx.graph, vertices):
        return None
    sub, to_root, tight_local = _local_view(ctx, blobs, tight)
    if 2 * len(tight_local) >= guaranteed_window_count(len(blobs), ctx.phi) or len(blobs) <= ctx.base_blobs:
        return _base_tkpm(ctx, vertices, k)

    sep = find_loose_separator(sub, range(len(blobs)), tight_local, ctx.phi)
    assert sep is not None, "no loose separator although the window count guarantees one"
    sep_blobs = tuple(to_root[b] for b in sep.blobs)
    before = tuple(to_root[b] for b in sep.before)
    after = tuple(to_root[b] for b in sep.after)
    tight_1 = frozenset(t for t in tight if t[0] in before and t[1] in before)
    tight_2 = frozenset(t for t in tight if t[0] in after and t[1] in after)
    window_vertices = sorted(v for b in sep_blobs for v in ctx.members[b] if v in vertices)

    best: frozenset[int] | None = None
    best_key = None
    for crossing in _crossing_edge_sets(ctx, vertices, window_vertices):
        ctx.stats.edge_sets += 1
        taken = frozenset(x for eid in crossing for x in (ctx.graph.edges[eid].u, ctx.graph.edges[eid].v))
        v1, v2, vb = _split(ctx, vertices, sep_blobs, before, after, taken)
        if len(vb) % 2:
            continue
        n1, n2, nb = len(v1) // 2, len(v2) // 2, len(vb) // 2
        sol1: dict[int, frozenset[int] | None] = {}
        sol2: dict[int, frozenset[int] | None] = {}
        solb: dict[int, frozenset[int] | None] = {}

        def get(store, key, fn):
            if key not in store:
                store[key] = fn(key)
            return store[key]

        f1 = lambda kk: _bbb_node(ctx, kk, before, v1, tight_1)  # noqa: E731
        f2 = lambda kk: _bbb_node(ctx, kk, after, v2, tight_2)  # noqa: E731
        fb = lambda kk: _blob_tkpm(ctx, vb, kk)  # noqa: E731
        # feasibility does not depend on the budget, so probe with budget 0 first
        if get(solb, 0, fb) is None or get(sol1, 0, f1) is None or get(sol2, 0, f2) is None:
            continue
        base_edges = frozenset(crossing)
        for budget in budgets(k):
            ctx.stats.budgets += 1
            m1 = get(sol1, min(budget.k_1, n1), f1)
            m2 = get(sol2, min(budget.k_2, n2), f2)
            mb = get(solb, min(budget.k_blobs, nb), fb)
            if m1 is None or m2 is None or mb is None:
                continue
            combined = base_edges | m1 | m2 | mb
            assert 2 * len(combined) == len(vertices), "combined matching is not perfect"
            key = (_topk(ctx.graph, combined, k), [-e for e in sorted(combined)])
            if best is None or key > best_key:
                best, best_key = combined, key
    return best


def _context(
    graph: WeightedColoredGraph,
    proto: Prototype,
    ordering: Sequence[int],
    blob_of: Sequence[int] | None,
    threshold: int,
    base_blobs: int,
    stats: SolveStats | None,
    cache: dict | None,
) -> _Context:
    if blob_of is None:
        blob_of = consecutive_blob_of(proto)
    blob_of = tuple(blob_of)
    if not is_blowup_of(graph, proto, blob_of):
        raise ValueError("graph is not the blowup of the prototype under the given blob map")
    phi = max(1, bandwidth_of_ordering(proto, ordering))
    members = [[] for _ in range(proto.blob_count)]
    for v, b in enumerate(blob_of):
        members[b].append(v)
    return _Context(
        graph=graph,
        proto=proto,
        blob_of=blob_of,
        phi=phi,
        threshold=threshold,
        base_blobs=base_blobs,
        stats=stats if stats is not None else SolveStats(),
        cache=cache,
        members=members,
    )


def bbb(
    k: int,
    proto: Prototype,
    phi: int,
    graph: WeightedColoredGraph,
    tight: Sequence[tuple[int, int]],
    n: int | None = None,
    threshold: int | None = None,
    *,
    blob_of: Sequence[int] | None = None,
    base_blobs: int = DEFAULT_BASE_BLOBS,
    stats: SolveStats | None = None,
) -> Matching | None:
    """Best perfect matching among those with fewer than ``threshold`` edges on every non-tight band.

    ``proto.ordering`` (identity if absent) must have bandwidth at most ``phi``.
    """
    if k < 0 or k > graph.n:
        raise ValueError(f"k={k} must lie in [0, n={graph.n}]")
    ordering = proto.ordering if proto.ordering is not None else tuple(range(proto.blob_count))
    if bandwidth_of_ordering(proto, ordering) > phi:
        raise ValueError("ordering bandwidth exceeds phi")
    n = graph.n if n is None else n
    if threshold is None:
        threshold = default_threshold(n, TKPM_THRESHOLD_ALPHA)
    ctx = _context(graph, proto, ordering, blob_of, threshold, base_blobs, stats, None)
    ctx.phi = max(1, phi)
    tight_set = frozenset((min(i, j), max(i, j)) for i, j in tight)
    out = _bbb_node(ctx, k, tuple(ordering), frozenset(range(graph.vertex_count)), tight_set)
    return None if out is None else Matching(graph, out)


def tight_set_candidates(proto: Prototype, limit: int) -> Iterator[frozenset[tuple[int, int]]]:
    for size in range(min(limit, len(proto.bands)) + 1):
        for combo in itertools.combinations(proto.bands, size):
            yield frozenset(combo)


def tkpm_recursive(
    graph: WeightedColoredGraph,
    proto: Prototype,
    ordering: Sequence[int] | None,
    k: int,
    *,
    blob_of: Sequence[int] | None = None,
    threshold: int | None = None,
    threshold_alpha: float = TKPM_THRESHOLD_ALPHA,
    base_blobs: int = DEFAULT_BASE_BLOBS,
    stats: SolveStats | None = None,
) -> Matching | None:
    """Top-k perfect matching by trying every tight-band set of admissible size.

    Base-case answers depend only on (vertex set, k), so they are shared
    between tight-set guesses.
    """
    if k < 0 or k > graph.n:
        raise ValueError(f"k={k} must lie in [0, n={graph.n}]")
    if ordering is None:
        ordering = proto.ordering if proto.ordering is not None else tuple(range(proto.blob_count))
    n = graph.n
    if threshold is None:
        threshold = default_threshold(n, threshold_alpha)
    ctx = _context(graph, proto, ordering, blob_of, threshold, base_blobs, stats, {})
    everything = frozenset(range(graph.vertex_count))
    if not _has_pm(graph, everything):
        return None
    best = None
    for tight in tight_set_candidates(proto, n // threshold):
        ctx.stats.tight_sets += 1
        found = _bbb_node(ctx, k, tuple(ordering), everything, tight)
        if found is None:
            continue
        m = Matching(graph, found)
        if better(m, best, k):
            best = m
    return best


def _red_count(graph: WeightedColoredGraph, edges) -> int:
    return sum(1 for e in edges if graph.edges[e].color is Color.RED)


def _em_node(
    ctx: _Context,
    base: EMSolver,
    k: int,
    blobs: tuple[int, ...],
    vertices: frozenset[int],
    tight: frozenset[tuple[int, int]],
) -> frozenset[int] | None:
    ctx.stats.recursion_nodes += 1
    if k < 0 or 2 * k > len(vertices) or not _has_pm(ctx.graph, vertices):
        return None
    sub, to_root, tight_local = _local_view(ctx, blobs, tight)
    if 2 * len(tight_local) >= guaranteed_window_count(len(blobs), ctx.phi) or len(blobs) <= ctx.base_blobs:
        key = ("em", vertices, k)
        if ctx.cache is not None and key in ctx.cache:
            return ctx.cache[key]
        ctx.stats.base_cases += 1
        s = induced_subgraph(ctx.graph, vertices)
        m = base(s.graph, k)
        out = None if m is None else frozenset(s.lift(m).edges)
        if ctx.cache is not None:
            ctx.cache[key] = out
        return out

    sep = find_loose_separator(sub, range(len(blobs)), tight_local, ctx.phi)
    assert sep is not None, "no loose separator although the window count guarantees one"
    sep_blobs = tuple(to_root[b] for b in sep.blobs)
    before = tuple(to_root[b] for b in sep.before)
    after = tuple(to_root[b] for b in sep.after)
    tight_1 = frozenset(t for t in tight if t[0] in before and t[1] in before)
    tight_2 = frozenset(t for t in tight if t[0] in after and t[1] in after)
    window_vertices = sorted(v for b in sep_blobs for v in ctx.members[b] if v in vertices)

    for crossing in _crossing_edge_sets(ctx, vertices, window_vertices):
        ctx.stats.edge_sets += 1
        red_here = _red_count(ctx.graph, crossing)
        if red_here > k:
            continue
        taken = frozenset(x for eid in crossing for x in (ctx.graph.edges[eid].u, ctx.graph.edges[eid].v))
        v1, v2, vb = _split(ctx, vertices, sep_blobs, before, after, taken)
        if len(vb) % 2:
            continue
        rest = k - red_here
        sol1: dict[int, frozenset[int] | None] = {}
        sol2: dict[int, frozenset[int] | None] = {}
        solb: dict[int, frozenset[int] | None] = {}
        blob_sub = None

        def blob_em(kk):
            nonlocal blob_sub
            if blob_sub is None:
                blob_sub = _blob_graph_vertices(ctx, vb)
            s, g = blob_sub
            m = base(g, kk)
            return None if m is None else frozenset(s.lift_edge_ids(m.edges))

        for kb in range(rest + 1):
            for k1 in range(rest + 1 - kb):
                k2 = rest - kb - k1
                ctx.stats.budgets += 1
                if 2 * kb > len(vb) or 2 * k1 > len(v1) or 2 * k2 > len(v2):
                    continue
                if kb not in solb:
                    solb[kb] = blob_em(kb)
                if solb[kb] is None:
                    continue
                if k1 not in sol1:
                    sol1[k1] = _em_node(ctx, base, k1, before, v1, tight_1)
                if sol1[k1] is None:
                    continue
                if k2 not in sol2:
                    sol2[k2] = _em_node(ctx, base, k2, after, v2, tight_2)
                if sol2[k2] is None:
                    continue
                combined = frozenset(crossing) | sol1[k1] | sol2[k2] | solb[kb]
                assert 2 * len(combined) == len(vertices), "combined matching is not perfect"
                assert _red_count(ctx.graph, combined) == k
                return combined
    return None


def em_recursive(
    graph: WeightedColoredGraph,
    proto: Prototype,
    ordering: Sequence[int] | None,
    k: int,
    base: EMSolver = brute_force_em,
    *,
    blob_of: Sequence[int] | None = None,
    threshold: int | None = None,
    threshold_alpha: float = EM_THRESHOLD_ALPHA,
    base_blobs: int = DEFAULT_BASE_BLOBS,
    stats: SolveStats | None = None,
) -> Matching | None:
    """A perfect matching with exactly k red edges, or ``None``.

    ``base`` answers EM exactly on the small graphs left at the leaves.
    """
    graph.require_colored()
    if ordering is None:
        ordering = proto.ordering if proto.ordering is not None else tuple(range(proto.blob_count))
    n = graph.n
    if threshold is None:
        threshold = default_threshold(n, threshold_alpha)
    ctx = _context(graph, proto, ordering, blob_of, threshold, base_blobs, stats, {})
    everything = frozenset(range(graph.vertex_count))
    if k < 0 or k > n or not _has_pm(graph, everything):
        return None
    for tight in tight_set_candidates(proto, n // threshold):
        ctx.stats.tight_sets += 1
        found = _em_node(ctx, base, k, tuple(ordering), everything, tight)
        if found is not None:
            m = Matching(graph, found)
            assert m.is_perfect and m.red_count == k
            return m
    return None
