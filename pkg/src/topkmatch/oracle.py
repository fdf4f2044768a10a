"""Ground-truth solvers for TkPM and EM, plus the randomized algebraic EM test.

The brute-force solvers pair the lowest unmatched vertex with each neighbor in
turn.  ``enumerate_perfect_matchings`` walks every perfect matching; the
``brute_force_*`` solvers walk the same pairing tree but share subtrees that
leave the same vertex set uncovered, which keeps 16-vertex cliques tractable.
"""

from __future__ import annotations

import math
import random
from functools import lru_cache
from typing import Iterator

from .graph import Color, GraphError, Matching, WeightedColoredGraph

MAX_ORACLE_VERTICES = 20


class OracleSizeError(ValueError):
    pass


def _guard(graph: WeightedColoredGraph, limit: int) -> None:
    if graph.vertex_count > limit:
        raise OracleSizeError(
            f"brute force limited to {limit} vertices, got {graph.vertex_count}"
        )


def _neighbor_lists(graph: WeightedColoredGraph) -> list[list[tuple[int, int]]]:
    """Per vertex: (neighbor, edge id) pairs with neighbor > vertex."""
    out = [[] for _ in range(graph.vertex_count)]
    for eid, e in enumerate(graph.edges):
        out[e.u].append((e.v, eid))
    return out


def enumerate_perfect_matchings(
    graph: WeightedColoredGraph, limit: int = MAX_ORACLE_VERTICES
) -> Iterator[frozenset[int]]:
    """Yield every perfect matching as a frozenset of edge ids."""
    _guard(graph, limit)
    if graph.vertex_count % 2:
        return
    up = _neighbor_lists(graph)
    chosen: list[int] = []

    def rec(mask):
        if mask == 0:
            yield frozenset(chosen)
            return
        u = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << u)
        for v, eid in up[u]:
            if rest >> v & 1:
                chosen.append(eid)
                yield from rec(rest & ~(1 << v))
                chosen.pop()

    yield from rec((1 << graph.vertex_count) - 1)


def brute_force_tkpm(
    graph: WeightedColoredGraph, k: int, limit: int = MAX_ORACLE_VERTICES
) -> tuple[int, Matching] | None:
    """Best top-k value over all perfect matchings with a witness, or ``None``.

    The top-k sum of a matching is its best k-subset sum, so the search
    tracks how many edges are still to be counted.
    """
    _guard(graph, limit)
    if k < 0:
        raise ValueError("k must be nonnegative")
    nv = graph.vertex_count
    if nv % 2:
        return None
    k = min(k, nv // 2)
    up = _neighbor_lists(graph)
    edges = graph.edges
    neg = -1

    @lru_cache(maxsize=None)
    def best(mask):
        # best(mask)[j]: max weight of j counted edges in a PM of mask, -1 if no PM
        if mask == 0:
            return (0,) + (neg,) * k
        u = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << u)
        pairs_left = bin(mask).count("1") // 2
        out = [neg] * (k + 1)
        for v, eid in up[u]:
            if not rest >> v & 1:
                continue
            sub = best(rest & ~(1 << v))
            if sub[0] == neg:
                continue
            w = edges[eid].w
            for j in range(min(k, pairs_left) + 1):
                if j <= pairs_left - 1 and sub[j] != neg and sub[j] > out[j]:
                    out[j] = sub[j]
                if j >= 1 and sub[j - 1] != neg and sub[j - 1] + w > out[j]:
                    out[j] = sub[j - 1] + w
        return tuple(out)

    full = (1 << nv) - 1
    if best(full)[0] == neg:
        return None
    value = best(full)[k]

    chosen = []
    mask, j = full, k
    while mask:
        u = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << u)
        pairs_left = bin(mask).count("1") // 2
        target = best(mask)[j]
        for v, eid in up[u]:
            if not rest >> v & 1:
                continue
            sub = best(rest & ~(1 << v))
            w = edges[eid].w
            if j >= 1 and sub[j - 1] != neg and sub[j - 1] + w == target:
                j -= 1
                break
            if j <= pairs_left - 1 and sub[j] != neg and sub[j] == target:
                break
        chosen.append(eid)
        mask = rest & ~(1 << v)
    return value, Matching(graph, frozenset(chosen))


def brute_force_em(
    graph: WeightedColoredGraph, k: int, limit: int = MAX_ORACLE_VERTICES
) -> Matching | None:
    """Some perfect matching with exactly k red edges, or ``None``."""
    _guard(graph, limit)
    graph.require_colored()
    nv = graph.vertex_count
    if nv % 2 or k < 0:
        return None
    up = _neighbor_lists(graph)
    red = [e.color is Color.RED for e in graph.edges]

    @lru_cache(maxsize=None)
    def reds(mask):
        # bit r set iff some PM of mask has exactly r red edges
        if mask == 0:
            return 1
        u = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << u)
        out = 0
        for v, eid in up[u]:
            if rest >> v & 1:
                sub = reds(rest & ~(1 << v))
                out |= sub << 1 if red[eid] else sub
        return out

    mask = (1 << nv) - 1
    if not reds(mask) >> k & 1:
        return None
    chosen = []
    need = k
    while mask:
        u = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << u)
        for v, eid in up[u]:
            if not rest >> v & 1:
                continue
            r = need - red[eid]
            if r >= 0 and reds(rest & ~(1 << v)) >> r & 1:
                chosen.append(eid)
                need = r
                mask = rest & ~(1 << v)
                break
    return Matching(graph, frozenset(chosen))


def em_profile(graph: WeightedColoredGraph, limit: int = MAX_ORACLE_VERTICES) -> set[int]:
    """All k for which a perfect matching with exactly k red edges exists."""
    return {k for k in range(graph.n + 1) if brute_force_em(graph, k, limit) is not None}


# --- polynomials in y with integer coefficients, lowest degree first ---


def _trim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _mul(a: list[int], b: list[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _sub(a: list[int], b: list[int]) -> list[int]:
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, y in enumerate(b):
        out[i] -= y
    return _trim(out)


def _exact_div(a: list[int], b: list[int]) -> list[int]:
    """``a / b`` in Z[y]; the caller guarantees divisibility."""
    a = list(a)
    if not a:
        return []
    q = [0] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1]
        if c:
            qi, r = divmod(c, lead)
            if r:
                raise ArithmeticError("inexact polynomial division")
            q[i] = qi
            for j, y in enumerate(b):
                a[i + j] -= qi * y
    if any(a):
        raise ArithmeticError("inexact polynomial division")
    return _trim(q)


def poly_determinant(matrix: list[list[list[int]]]) -> list[int]:
    """Determinant over Z[y] by fraction-free (Bareiss) elimination."""
    m = [[list(p) for p in row] for row in matrix]
    size = len(m)
    if size == 0:
        return [1]
    sign = 1
    prev = [1]
    for k in range(size - 1):
        if not m[k][k]:
            for r in range(k + 1, size):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return []
        pivot = m[k][k]
        for i in range(k + 1, size):
            mik = m[i][k]
            row_i = m[i]
            row_k = m[k]
            for j in range(k + 1, size):
                num = _sub(_mul(pivot, row_i[j]), _mul(mik, row_k[j]))
                row_i[j] = _exact_div(num, prev) if num else []
        prev = pivot
    det = m[size - 1][size - 1]
    return [sign * c for c in det]


def poly_sqrt(p: list[int]) -> list[int]:
    """Integer polynomial q with q*q == p (sign fixed by a positive lowest term)."""
    p = _trim(list(p))
    if not p:
        return []
    low = next(i for i, c in enumerate(p) if c)
    if low % 2:
        raise ArithmeticError("not a perfect square")
    shift = low // 2
    body = p[low:]
    if (len(body) - 1) % 2:
        raise ArithmeticError("not a perfect square")
    deg = (len(body) - 1) // 2
    q0 = math.isqrt(body[0])
    if body[0] < 0 or q0 * q0 != body[0]:
        raise ArithmeticError("not a perfect square")
    q = [q0]
    for r in range(1, deg + 1):
        acc = body[r] - sum(q[i] * q[r - i] for i in range(1, r))
        qr, rem = divmod(acc, 2 * q0)
        if rem:
            raise ArithmeticError("not a perfect square")
        q.append(qr)
    if _mul(q, q) != body:
        raise ArithmeticError("not a perfect square")
    return [0] * shift + q


def pfaffian_polynomial(graph: WeightedColoredGraph, weights: list[int]) -> list[int]:
    """``Pf(T)`` up to sign, with ``T[u][v] = 2^w(e) * y^[e red]`` above the diagonal.

    Computed as the exact square root of ``det(T)`` since ``det = Pf^2``.
    """
    nv = graph.vertex_count
    t = [[[] for _ in range(nv)] for _ in range(nv)]
    for eid, e in enumerate(graph.edges):
        mono = 1 << weights[eid]
        entry = [0, mono] if e.color is Color.RED else [mono]
        t[e.u][e.v] = entry
        t[e.v][e.u] = [-c for c in entry]
    return poly_sqrt(poly_determinant(t))


def randomized_em_profile(graph: WeightedColoredGraph, trials: int, seed: int) -> set[int]:
    """Red counts certified by at least one trial.  Never contains a wrong k."""
    graph.require_colored()
    if graph.vertex_count % 2:
        return set()
    found: set[int] = set()
    rng = random.Random(seed)
    top = max(1, 2 * graph.edge_count)
    for _ in range(trials):
        weights = [rng.randint(1, top) for _ in graph.edges]
        pf = pfaffian_polynomial(graph, weights)
        found.update(i for i, c in enumerate(pf) if c)
    return found


def randomized_em(graph: WeightedColoredGraph, k: int, trials: int = 20, seed: int = 0) -> bool:
    """One-sided Monte Carlo EM decision.

    ``True`` is always correct.  ``False`` is wrong with probability at most
    ``2 ** -trials``: a uniform weight in ``[1, 2|E|]`` isolates a unique
    lightest k-red perfect matching with probability at least 1/2, and its
    power of two then cannot cancel in the ``y^k`` coefficient of the Pfaffian.
    """
    graph.require_colored()
    if graph.vertex_count % 2 or k < 0 or k > graph.n:
        return False
    rng = random.Random(seed)
    top = max(1, 2 * graph.edge_count)
    for _ in range(trials):
        weights = [rng.randint(1, top) for _ in graph.edges]
        pf = pfaffian_polynomial(graph, weights)
        if k < len(pf) and pf[k]:
            return True
    return False


__all__ = [
    "GraphError",
    "MAX_ORACLE_VERTICES",
    "OracleSizeError",
    "brute_force_em",
    "brute_force_tkpm",
    "em_profile",
    "enumerate_perfect_matchings",
    "pfaffian_polynomial",
    "poly_determinant",
    "poly_sqrt",
    "randomized_em",
    "randomized_em_profile",
]
