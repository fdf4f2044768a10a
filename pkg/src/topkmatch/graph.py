"""Weighted, optionally red/blue colored simple graphs and matchings on them."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

INT64_MAX = 2**63 - 1


class Color(enum.Enum):
    RED = "r"
    BLUE = "b"
    NONE = "-"


class Edge(NamedTuple):
    u: int
    v: int
    w: int
    color: Color = Color.NONE


class GraphError(ValueError):
    pass


class WeightedColoredGraph:
    """Immutable simple undirected graph on vertices ``0..vertex_count-1``.

    Edge ids are positions in ``edges``.  Each edge is stored with ``u < v``.
    """

    __slots__ = ("vertex_count", "edges", "adjacency", "_index")

    def __init__(self, vertex_count: int, edges: Iterable[Sequence] = ()):
        if vertex_count < 0:
            raise GraphError("vertex_count must be nonnegative")
        normalized = []
        index = {}
        for raw in edges:
            u, v, w = int(raw[0]), int(raw[1]), int(raw[2])
            color = _as_color(raw[3]) if len(raw) > 3 else Color.NONE
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise GraphError(f"edge ({u}, {v}) out of range")
            if w < 0:
                raise GraphError(f"negative weight on edge ({u}, {v})")
            if u > v:
                u, v = v, u
            if (u, v) in index:
                raise GraphError(f"duplicate edge ({u}, {v})")
            index[(u, v)] = len(normalized)
            normalized.append(Edge(u, v, w, color))
        adjacency = [[] for _ in range(vertex_count)]
        for eid, e in enumerate(normalized):
            adjacency[e.u].append(eid)
            adjacency[e.v].append(eid)
        heaviest = max((e.w for e in normalized), default=0)
        if heaviest * max(1, vertex_count // 2) > INT64_MAX:
            raise GraphError("weights too large: a perfect matching weight would overflow 64 bits")
        self.vertex_count = vertex_count
        self.edges = tuple(normalized)
        self.adjacency = tuple(tuple(a) for a in adjacency)
        self._index = index

    @property
    def n(self) -> int:
        """Size of a perfect matching (half the vertex count)."""
        return self.vertex_count // 2

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge_id(self, u: int, v: int) -> int | None:
        return self._index.get((u, v) if u < v else (v, u))

    def has_edge(self, u: int, v: int) -> bool:
        return self.edge_id(u, v) is not None

    def neighbors(self, v: int) -> list[int]:
        out = []
        for eid in self.adjacency[v]:
            e = self.edges[eid]
            out.append(e.v if e.u == v else e.u)
        return out

    def max_weight(self) -> int:
        return max((e.w for e in self.edges), default=0)

    def is_colored(self) -> bool:
        return all(e.color is not Color.NONE for e in self.edges)

    def require_colored(self) -> None:
        for eid, e in enumerate(self.edges):
            if e.color is Color.NONE:
                raise GraphError(f"edge {eid} ({e.u}, {e.v}) has no red/blue color")

    def __eq__(self, other):
        if not isinstance(other, WeightedColoredGraph):
            return NotImplemented
        return self.vertex_count == other.vertex_count and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertex_count, self.edges))

    def __repr__(self):
        return f"WeightedColoredGraph(vertex_count={self.vertex_count}, edges={len(self.edges)})"


def _as_color(c) -> Color:
    if isinstance(c, Color):
        return c
    if c is None:
        return Color.NONE
    try:
        return Color(c)
    except ValueError:
        raise GraphError(f"unknown edge color {c!r}") from None


@dataclass(frozen=True)
class Matching:
    """A set of pairwise disjoint edges of ``graph``, referenced by edge id."""

    graph: WeightedColoredGraph = field(repr=False, compare=False)
    edges: frozenset[int]

    def __post_init__(self):
        if not isinstance(self.edges, frozenset):
            object.__setattr__(self, "edges", frozenset(self.edges))
        if not is_matching(self.graph, self.edges):
            raise GraphError("edge set is not a matching")

    @classmethod
    def from_pairs(cls, graph: WeightedColoredGraph, pairs: Iterable[tuple[int, int]]) -> "Matching":
        ids = []
        for u, v in pairs:
            eid = graph.edge_id(u, v)
            if eid is None:
                raise GraphError(f"({u}, {v}) is not an edge")
            ids.append(eid)
        return cls(graph, frozenset(ids))

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(sorted(self.edges))

    @property
    def vertices(self) -> frozenset[int]:
        es = self.graph.edges
        return frozenset(x for eid in self.edges for x in (es[eid].u, es[eid].v))

    @property
    def weight(self) -> int:
        return sum(self.graph.edges[eid].w for eid in self.edges)

    @property
    def red_count(self) -> int:
        return sum(1 for eid in self.edges if self.graph.edges[eid].color is Color.RED)

    @property
    def is_perfect(self) -> bool:
        return 2 * len(self.edges) == self.graph.vertex_count

    def topk(self, k: int) -> int:
        return topk_value(self, k)

    def pairs(self) -> list[tuple[int, int]]:
        return [(self.graph.edges[eid].u, self.graph.edges[eid].v) for eid in sorted(self.edges)]

    def union(self, other: "Matching") -> "Matching":
        return Matching(self.graph, self.edges | other.edges)


def topk_value(matching: Matching | Iterable[int], k: int, graph: WeightedColoredGraph | None = None) -> int:
    """Sum of the ``min(k, |M|)`` largest edge weights of the matching."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if isinstance(matching, Matching):
        graph, ids = matching.graph, matching.edges
    else:
        ids = matching
    weights = sorted((graph.edges[eid].w for eid in ids), reverse=True)
    return sum(weights[:k])


def is_matching(graph: WeightedColoredGraph, edge_ids: Iterable[int]) -> bool:
    seen = set()
    for eid in edge_ids:
        e = graph.edges[eid]
        if e.u in seen or e.v in seen:
            return False
        seen.add(e.u)
        seen.add(e.v)
    return True


@dataclass(frozen=True)
class Subgraph:
    """An induced subgraph with the vertex maps needed to lift matchings back."""

    graph: WeightedColoredGraph
    to_parent: tuple[int, ...]
    to_child: dict[int, int] = field(compare=False)
    parent: WeightedColoredGraph = field(repr=False, compare=False)

    def lift(self, matching: Matching) -> Matching:
        ids = []
        for eid in matching.edges:
            e = self.graph.edges[eid]
            ids.append(self.parent.edge_id(self.to_parent[e.u], self.to_parent[e.v]))
        return Matching(self.parent, frozenset(ids))

    def lift_edge_ids(self, edge_ids: Iterable[int]) -> list[int]:
        out = []
        for eid in edge_ids:
            e = self.graph.edges[eid]
            out.append(self.parent.edge_id(self.to_parent[e.u], self.to_parent[e.v]))
        return out


def induced_subgraph(graph: WeightedColoredGraph, keep: Iterable[int]) -> Subgraph:
    """Subgraph on ``keep`` (relabelled in increasing id order) with all internal edges."""
    to_parent = tuple(sorted(set(keep)))
    to_child = {v: i for i, v in enumerate(to_parent)}
    edges = []
    for e in graph.edges:
        a = to_child.get(e.u)
        if a is None:
            continue
        b = to_child.get(e.v)
        if b is None:
            continue
        edges.append((a, b, e.w, e.color))
    return Subgraph(WeightedColoredGraph(len(to_parent), edges), to_parent, to_child, graph)
