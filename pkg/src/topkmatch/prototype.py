"""Prototype graphs, their blowups, bandwidth orderings and loose separators."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import Color, WeightedColoredGraph

CLIQUE = "c"
INDEPENDENT = "i"

EXACT_BANDWIDTH_LIMIT = 12


class OrderingRequired(ValueError):
    """Prototype too large for exact bandwidth search and no ordering supplied."""


@dataclass(frozen=True)
class Blob:
    size: int
    kind: str = INDEPENDENT

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("blob sizes must be positive")
        if self.kind not in (CLIQUE, INDEPENDENT):
            raise ValueError(f"blob kind must be 'c' or 'i', got {self.kind!r}")


@dataclass(frozen=True)
class Prototype:
    blobs: tuple[Blob, ...]
    bands: tuple[tuple[int, int], ...]
    ordering: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "blobs", tuple(self.blobs))
        norm = []
        for i, j in self.bands:
            if i == j:
                raise ValueError(f"band ({i}, {j}) is a loop")
            if not (0 <= i < len(self.blobs) and 0 <= j < len(self.blobs)):
                raise ValueError(f"band ({i}, {j}) out of range")
            norm.append((min(i, j), max(i, j)))
        if len(set(norm)) != len(norm):
            raise ValueError("duplicate band")
        object.__setattr__(self, "bands", tuple(norm))
        if self.ordering is not None:
            order = tuple(self.ordering)
            if sorted(order) != list(range(len(self.blobs))):
                raise ValueError("ordering is not a permutation of the blobs")
            object.__setattr__(self, "ordering", order)

    @property
    def blob_count(self) -> int:
        return len(self.blobs)

    @property
    def vertex_total(self) -> int:
        return sum(b.size for b in self.blobs)

    def neighbors(self) -> list[set[int]]:
        nb = [set() for _ in self.blobs]
        for i, j in self.bands:
            nb[i].add(j)
            nb[j].add(i)
        return nb

    def with_ordering(self, ordering: Sequence[int]) -> "Prototype":
        return Prototype(self.blobs, self.bands, tuple(ordering))


@dataclass(frozen=True)
class BlowupMap:
    """``blob_of[v]`` per blown-up vertex; ``group_of[e]`` is the blob pair an edge came from.

    ``group_of[e] == (b, b)`` marks an edge inside clique blob ``b``.
    """

    blob_of: tuple[int, ...]
    group_of: tuple[tuple[int, int], ...]

    def blob_members(self, blob_count: int) -> list[list[int]]:
        out = [[] for _ in range(blob_count)]
        for v, b in enumerate(self.blob_of):
            out[b].append(v)
        return out


@dataclass(frozen=True)
class UniformWeights:
    """Weights drawn uniformly from ``[low, high]`` with the blow-up seed."""

    high: int
    low: int = 1


@dataclass(frozen=True)
class RandomColors:
    red_probability: float = 0.5


def consecutive_blob_of(proto: Prototype) -> tuple[int, ...]:
    return tuple(b for b, blob in enumerate(proto.blobs) for _ in range(blob.size))


def blowup_structure(proto: Prototype, blob_of: Sequence[int] | None = None) -> list[tuple[int, int, tuple[int, int]]]:
    """Edge list ``(u, v, (blob_u, blob_v))`` of the blowup, in lexicographic order."""
    if blob_of is None:
        blob_of = consecutive_blob_of(proto)
    band_set = set(proto.bands)
    out = []
    nv = len(blob_of)
    for u in range(nv):
        a = blob_of[u]
        for v in range(u + 1, nv):
            b = blob_of[v]
            if a == b:
                if proto.blobs[a].kind == CLIQUE:
                    out.append((u, v, (a, a)))
            elif (min(a, b), max(a, b)) in band_set:
                out.append((u, v, (min(a, b), max(a, b))))
    return out


def blow_up(
    proto: Prototype,
    weights: int | Sequence[int] | UniformWeights = 1,
    colors: str | Sequence[str] | RandomColors | None = None,
    seed: int = 0,
) -> tuple[WeightedColoredGraph, BlowupMap]:
    """Replace blobs by cliques/independent sets and bands by complete bipartite graphs.

    Blob ``b`` gets consecutive vertex ids.  ``weights`` is a constant, an
    explicit per-edge list, or :class:`UniformWeights`; ``colors`` is ``None``
    (uncolored), ``'r'``/``'b'``, an explicit list, or :class:`RandomColors`.
    """
    blob_of = consecutive_blob_of(proto)
    structure = blowup_structure(proto, blob_of)
    m = len(structure)
    rng = random.Random(seed)

    if isinstance(weights, int):
        ws = [weights] * m
    elif isinstance(weights, UniformWeights):
        ws = [rng.randint(weights.low, weights.high) for _ in range(m)]
    else:
        ws = [int(w) for w in weights]
        if len(ws) != m:
            raise ValueError(f"expected {m} weights, got {len(ws)}")

    if colors is None:
        cs = [Color.NONE] * m
    elif isinstance(colors, str):
        cs = [Color(colors)] * m
    elif isinstance(colors, RandomColors):
        cs = [Color.RED if rng.random() < colors.red_probability else Color.BLUE for _ in range(m)]
    else:
        cs = [Color(c) if not isinstance(c, Color) else c for c in colors]
        if len(cs) != m:
            raise ValueError(f"expected {m} colors, got {len(cs)}")

    graph = WeightedColoredGraph(
        len(blob_of), [(u, v, w, c) for (u, v, _g), w, c in zip(structure, ws, cs)]
    )
    return graph, BlowupMap(blob_of, tuple(g for _u, _v, g in structure))


def is_blowup_of(graph: WeightedColoredGraph, proto: Prototype, blob_of: Sequence[int]) -> bool:
    """True iff the edge set of ``graph`` is exactly the blowup of ``proto`` under ``blob_of``."""
    if len(blob_of) != graph.vertex_count:
        return False
    counts = [0] * proto.blob_count
    for b in blob_of:
        if not 0 <= b < proto.blob_count:
            return False
        counts[b] += 1
    if counts != [b.size for b in proto.blobs]:
        return False
    want = {(u, v) for u, v, _g in blowup_structure(proto, blob_of)}
    have = {(e.u, e.v) for e in graph.edges}
    return want == have


def group_map(graph: WeightedColoredGraph, blob_of: Sequence[int]) -> BlowupMap:
    return BlowupMap(
        tuple(blob_of),
        tuple(
            (min(blob_of[e.u], blob_of[e.v]), max(blob_of[e.u], blob_of[e.v])) for e in graph.edges
        ),
    )


def bandwidth_of_ordering(proto: Prototype, ordering: Sequence[int]) -> int:
    pos = {b: i for i, b in enumerate(ordering)}
    if sorted(pos) != list(range(proto.blob_count)) or len(ordering) != proto.blob_count:
        raise ValueError("ordering is not a permutation of the blobs")
    return max((abs(pos[i] - pos[j]) for i, j in proto.bands), default=0)


def brute_force_bandwidth(proto: Prototype) -> int:
    """Minimum bandwidth over all orderings (factorial time)."""
    return min(
        bandwidth_of_ordering(proto, perm)
        for perm in itertools.permutations(range(proto.blob_count))
    )


def _ordering_within(nb: list[set[int]], phi: int) -> list[int] | None:
    """Depth-first layout search for an ordering of bandwidth at most ``phi``."""
    count = len(nb)
    order: list[int] = []
    pos: dict[int, int] = {}
    dead: set[tuple[frozenset[int], tuple[int, ...]]] = set()

    def rec():
        p = len(order)
        if p == count:
            return True
        # the vertex phi + 1 places back can no longer reach an unplaced neighbor
        if p > phi:
            old = order[p - phi - 1]
            if any(x not in pos for x in nb[old]):
                return False
        # each active vertex at q needs its unplaced neighbors within positions p..q+phi
        need = set()
        for q in range(max(0, p - phi), p):
            need |= {x for x in nb[order[q]] if x not in pos}
            if len(need) > q + phi - p + 1:
                return False
        key = (frozenset(pos), tuple(order[max(0, p - phi):]))
        if key in dead:
            return False
        for v in range(count):
            if v in pos:
                continue
            if any(x in pos and p - pos[x] > phi for x in nb[v]):
                continue
            order.append(v)
            pos[v] = p
            if rec():
                return True
            order.pop()
            del pos[v]
        dead.add(key)
        return False

    return list(order) if rec() else None


def find_bandwidth_ordering(proto: Prototype) -> tuple[int, ...]:
    """Optimal-bandwidth ordering for up to 12 blobs; larger prototypes must carry one."""
    count = proto.blob_count
    if count > EXACT_BANDWIDTH_LIMIT:
        if proto.ordering is None:
            raise OrderingRequired(
                f"prototype has {count} blobs; supply a bandwidth ordering"
            )
        return proto.ordering
    if count == 0:
        return ()
    nb = proto.neighbors()
    lower = max((math.ceil(len(s) / 2) for s in nb), default=0)
    for phi in range(max(lower, 0), count):
        found = _ordering_within(nb, phi)
        if found is not None:
            return tuple(found)
    raise AssertionError("unreachable: every ordering has bandwidth below blob count")


@dataclass(frozen=True)
class Separator:
    """A window of consecutive blobs in an ordering and the blobs on either side."""

    blobs: tuple[int, ...]
    before: tuple[int, ...]
    after: tuple[int, ...]


def separator_windows(blob_count: int, phi: int) -> list[tuple[int, int]]:
    """Disjoint candidate windows as 0-based ``(start, end)`` positions, inclusive.

    Positions (1-based) ``ceil(n'/4) + 1 .. floor(3n'/4) - 1`` are cut into
    consecutive runs of ``phi`` blobs.
    """
    if phi < 1:
        return []
    s = math.ceil(blob_count / 4) + 1
    e = (3 * blob_count) // 4 - 1
    out = []
    start = s
    while start + phi - 1 <= e:
        out.append((start - 1, start + phi - 2))
        start += phi
    return out


def guaranteed_window_count(blob_count: int, phi: int) -> int:
    """``floor((n'/2 - 3) / phi)``, the guaranteed number of disjoint windows."""
    return math.floor((blob_count / 2 - 3) / phi)


def find_loose_separator(
    proto: Prototype,
    ordering: Sequence[int],
    tight: Iterable[tuple[int, int]],
    phi: int,
) -> Separator | None:
    """First candidate window not touched by a tight band, or ``None``."""
    ordering = tuple(ordering)
    touched = set()
    for i, j in tight:
        touched.add(i)
        touched.add(j)
    for start, end in separator_windows(len(ordering), phi):
        window = ordering[start : end + 1]
        if touched.isdisjoint(window):
            return Separator(window, ordering[:start], ordering[end + 1 :])
    return None


def check_separator(
    proto: Prototype,
    ordering: Sequence[int],
    tight: Iterable[tuple[int, int]],
    phi: int,
    sep: Separator,
) -> list[str]:
    """Violated loose-separator conditions (empty when ``sep`` is valid)."""
    problems = []
    n_blobs = proto.blob_count
    if len(sep.blobs) > phi:
        problems.append(f"separator has {len(sep.blobs)} > {phi} blobs")
    for side, name in ((sep.before, "P1"), (sep.after, "P2")):
        if not (n_blobs / 4 <= len(side) <= 3 * n_blobs / 4):
            problems.append(f"{name} has {len(side)} blobs, outside [{n_blobs / 4}, {3 * n_blobs / 4}]")
    s_set = set(sep.blobs)
    for i, j in tight:
        if i in s_set or j in s_set:
            problems.append(f"tight band ({i}, {j}) touches the separator")
    if sorted(sep.blobs + sep.before + sep.after) != list(range(n_blobs)):
        problems.append("separator and sides do not partition the blobs")
    pos = {b: p for p, b in enumerate(ordering)}
    if sep.blobs:
        lo = min(pos[b] for b in sep.blobs)
        hi = max(pos[b] for b in sep.blobs)
        if hi - lo + 1 != len(sep.blobs):
            problems.append("separator blobs are not consecutive")
    before, after = set(sep.before), set(sep.after)
    for i, j in proto.bands:
        if (i in before and j in after) or (i in after and j in before):
            problems.append(f"band ({i}, {j}) crosses the separator")
    return problems


def sub_prototype(proto: Prototype, blobs: Sequence[int]) -> tuple[Prototype, tuple[int, ...]]:
    """Prototype induced on ``blobs`` (kept in the given order, which becomes the ordering).

    Returns the sub-prototype and the map from its blob ids to the parent's.
    """
    blobs = tuple(blobs)
    local = {b: i for i, b in enumerate(blobs)}
    bands = [(local[i], local[j]) for i, j in proto.bands if i in local and j in local]
    sub = Prototype(tuple(proto.blobs[b] for b in blobs), tuple(bands), tuple(range(len(blobs))))
    return sub, blobs


def path_prototype(sizes: Sequence[int], kinds: str | Sequence[str] = INDEPENDENT) -> Prototype:
    kinds = [kinds] * len(sizes) if isinstance(kinds, str) else list(kinds)
    blobs = tuple(Blob(s, k) for s, k in zip(sizes, kinds))
    return Prototype(blobs, tuple((i, i + 1) for i in range(len(sizes) - 1)), tuple(range(len(sizes))))


def cycle_ordering(count: int) -> tuple[int, ...]:
    """Ordering ``0, 1, n-1, 2, n-2, ...`` of bandwidth 2 for a cycle."""
    if count <= 2:
        return tuple(range(count))
    order = [0]
    lo, hi = 1, count - 1
    while lo <= hi:
        order.append(lo)
        if lo != hi:
            order.append(hi)
        lo += 1
        hi -= 1
    return tuple(order)


def cycle_prototype(sizes: Sequence[int], kinds: str | Sequence[str] = INDEPENDENT) -> Prototype:
    count = len(sizes)
    kinds = [kinds] * count if isinstance(kinds, str) else list(kinds)
    blobs = tuple(Blob(s, k) for s, k in zip(sizes, kinds))
    if count < 3:
        bands = tuple((i, i + 1) for i in range(count - 1))
    else:
        bands = tuple((i, (i + 1) % count) for i in range(count))
    return Prototype(blobs, bands, cycle_ordering(count))


def complete_prototype(sizes: Sequence[int], kinds: str | Sequence[str] = INDEPENDENT) -> Prototype:
    count = len(sizes)
    kinds = [kinds] * count if isinstance(kinds, str) else list(kinds)
    blobs = tuple(Blob(s, k) for s, k in zip(sizes, kinds))
    return Prototype(blobs, tuple(itertools.combinations(range(count), 2)), tuple(range(count)))


def random_prototype(
    rng: random.Random,
    blob_count: int,
    density: float,
    sizes: Sequence[int],
    kinds: Sequence[str],
) -> Prototype:
    blobs = tuple(Blob(s, k) for s, k in zip(sizes, kinds))
    bands = tuple(
        (i, j) for i, j in itertools.combinations(range(blob_count), 2) if rng.random() < density
    )
    return Prototype(blobs, bands)


def random_banded_prototype(
    rng: random.Random,
    blob_count: int,
    phi: int,
    density: float,
    sizes: Sequence[int],
    kinds: Sequence[str],
) -> Prototype:
    """Random prototype whose identity ordering has bandwidth at most ``phi``."""
    blobs = tuple(Blob(s, k) for s, k in zip(sizes, kinds))
    bands = tuple(
        (i, j)
        for i in range(blob_count)
        for j in range(i + 1, min(blob_count, i + phi + 1))
        if rng.random() < density
    )
    return Prototype(blobs, bands, tuple(range(blob_count)))
