"""Maximum-cardinality and maximum-weight perfect matching on general graphs.

Both kernels work on plain ``(vertex_count, edge list)`` data and return a
``mate`` array (``mate[v]`` is the partner of ``v`` or ``-1``).  The graph-level
wrappers convert to and from :class:`~topkmatch.graph.Matching`.
"""

from __future__ import annotations

from typing import Sequence

from .graph import INT64_MAX, Matching, WeightedColoredGraph


class InputTooLarge(ValueError):
    """The weight shift used to force perfection would overflow 64 bits."""


def max_cardinality_mate(n: int, adj: Sequence[Sequence[int]]) -> list[int]:
    """Edmonds' blossom algorithm, one BFS per free root, O(V^3)."""
    match = [-1] * n
    for v in range(n):
        if match[v] == -1:
            for u in adj[v]:
                if match[u] == -1:
                    match[u] = v
                    match[v] = u
                    break

    for root in range(n):
        if match[root] != -1 or not adj[root]:
            continue
        parent = [-1] * n
        base = list(range(n))
        used = [False] * n
        used[root] = True
        queue = [root]
        head = 0
        found = False
        while head < len(queue) and not found:
            v = queue[head]
            head += 1
            for to in adj[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] != -1 and parent[match[to]] != -1):
                    # odd cycle: contract it onto its lowest common base
                    seen = [False] * n
                    a = v
                    while True:
                        a = base[a]
                        seen[a] = True
                        if match[a] == -1:
                            break
                        a = parent[match[a]]
                    b = to
                    while True:
                        b = base[b]
                        if seen[b]:
                            break
                        b = parent[match[b]]
                    lca = b
                    in_blossom = [False] * n
                    for x, child in ((v, to), (to, v)):
                        while base[x] != lca:
                            in_blossom[base[x]] = True
                            in_blossom[base[match[x]]] = True
                            parent[x] = child
                            child = match[x]
                            x = parent[match[x]]
                    for i in range(n):
                        if in_blossom[base[i]]:
                            base[i] = lca
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    if match[to] == -1:
                        x = to
                        while x != -1:
                            px = parent[x]
                            nxt = match[px]
                            match[x] = px
                            match[px] = x
                            x = nxt
                        found = True
                        break
                    used[match[to]] = True
                    queue.append(match[to])
    return match


def max_weight_mate(n: int, edges: Sequence[tuple[int, int, int]]) -> list[int]:
    """Maximum-weight (not necessarily maximum-cardinality) matching.

    Primal-dual O(n^3) blossom algorithm with integer duals; vertex duals and
    slacks are kept in doubled units so integer weights never produce fractions.
    """
    nedge = len(edges)
    mate = [-1] * n
    if nedge == 0:
        return mate

    endpoint = [edges[p >> 1][p & 1] for p in range(2 * nedge)]
    neighbend: list[list[int]] = [[] for _ in range(n)]
    for k, (i, j, _w) in enumerate(edges):
        neighbend[i].append(2 * k + 1)
        neighbend[j].append(2 * k)
    maxweight = max(0, max(w for _i, _j, w in edges))

    # mate holds the remote endpoint index (not the vertex) while running
    mate_ep = [-1] * n
    label = [0] * (2 * n)
    labelend = [-1] * (2 * n)
    inblossom = list(range(n))
    blossomparent = [-1] * (2 * n)
    blossomchilds: list = [None] * (2 * n)
    blossombase = list(range(n)) + [-1] * n
    blossomendps: list = [None] * (2 * n)
    bestedge = [-1] * (2 * n)
    blossombestedges: list = [None] * (2 * n)
    unusedblossoms = list(range(n, 2 * n))
    dualvar = [maxweight] * n + [0] * n
    allowedge = [False] * nedge
    queue: list[int] = []

    def slack(k):
        i, j, wt = edges[k]
        return dualvar[i] + dualvar[j] - 2 * wt

    def leaves(b):
        if b < n:
            yield b
        else:
            for t in blossomchilds[b]:
                if t < n:
                    yield t
                else:
                    yield from leaves(t)

    def assign_label(w, t, p):
        b = inblossom[w]
        label[w] = label[b] = t
        labelend[w] = labelend[b] = p
        bestedge[w] = bestedge[b] = -1
        if t == 1:
            queue.extend(leaves(b))
        else:
            base = blossombase[b]
            assign_label(endpoint[mate_ep[base]], 1, mate_ep[base] ^ 1)

    def scan_blossom(v, w):
        path = []
        base = -1
        while v != -1 or w != -1:
            b = inblossom[v]
            if label[b] & 4:
                base = blossombase[b]
                break
            path.append(b)
            label[b] = 5
            if labelend[b] == -1:
                v = -1
            else:
                v = endpoint[labelend[b]]
                b = inblossom[v]
                v = endpoint[labelend[b]]
            if w != -1:
                v, w = w, v
        for b in path:
            label[b] = 1
        return base

    def add_blossom(base, k):
        v, w, _wt = edges[k]
        bb = inblossom[base]
        bv = inblossom[v]
        bw = inblossom[w]
        b = unusedblossoms.pop()
        blossombase[b] = base
        blossomparent[b] = -1
        blossomparent[bb] = b
        path = []
        endps = []
        while bv != bb:
            blossomparent[bv] = b
            path.append(bv)
            endps.append(labelend[bv])
            v = endpoint[labelend[bv]]
            bv = inblossom[v]
        path.append(bb)
        path.reverse()
        endps.reverse()
        endps.append(2 * k)
        while bw != bb:
            blossomparent[bw] = b
            path.append(bw)
            endps.append(labelend[bw] ^ 1)
            w = endpoint[labelend[bw]]
            bw = inblossom[w]
        blossomchilds[b] = path
        blossomendps[b] = endps
        label[b] = 1
        labelend[b] = labelend[bb]
        dualvar[b] = 0
        for v in leaves(b):
            if label[inblossom[v]] == 2:
                queue.append(v)
            inblossom[v] = b
        bestedgeto = [-1] * (2 * n)
        for bv in path:
            if blossombestedges[bv] is None:
                nblists = [[p >> 1 for p in neighbend[v]] for v in leaves(bv)]
            else:
                nblists = [blossombestedges[bv]]
            for nblist in nblists:
                for k2 in nblist:
                    i, j, _ = edges[k2]
                    if inblossom[j] == b:
                        i, j = j, i
                    bj = inblossom[j]
                    if bj != b and label[bj] == 1 and (
                        bestedgeto[bj] == -1 or slack(k2) < slack(bestedgeto[bj])
                    ):
                        bestedgeto[bj] = k2
            blossombestedges[bv] = None
            bestedge[bv] = -1
        blossombestedges[b] = [k2 for k2 in bestedgeto if k2 != -1]
        bestedge[b] = -1
        for k2 in blossombestedges[b]:
            if bestedge[b] == -1 or slack(k2) < slack(bestedge[b]):
                bestedge[b] = k2

    def expand_blossom(b, endstage):
        for s in blossomchilds[b]:
            blossomparent[s] = -1
            if s < n:
                inblossom[s] = s
            elif endstage and dualvar[s] == 0:
                expand_blossom(s, endstage)
            else:
                for v in leaves(s):
                    inblossom[v] = s
        if not endstage and label[b] == 2:
            childs = blossomchilds[b]
            entrychild = inblossom[endpoint[labelend[b] ^ 1]]
            j = childs.index(entrychild)
            if j & 1:
                j -= len(childs)
                jstep, endptrick = 1, 0
            else:
                jstep, endptrick = -1, 1
            p = labelend[b]
            while j != 0:
                label[endpoint[p ^ 1]] = 0
                label[endpoint[blossomendps[b][j - endptrick] ^ endptrick ^ 1]] = 0
                assign_label(endpoint[p ^ 1], 2, p)
                allowedge[blossomendps[b][j - endptrick] >> 1] = True
                j += jstep
                p = blossomendps[b][j - endptrick] ^ endptrick
                allowedge[p >> 1] = True
                j += jstep
            bv = childs[j]
            label[endpoint[p ^ 1]] = label[bv] = 2
            labelend[endpoint[p ^ 1]] = labelend[bv] = p
            bestedge[bv] = -1
            j += jstep
            while childs[j] != entrychild:
                bv = childs[j]
                if label[bv] == 1:
                    j += jstep
                    continue
                hit = -1
                for v in leaves(bv):
                    if label[v] != 0:
                        hit = v
                        break
                if hit != -1:
                    label[hit] = 0
                    label[endpoint[mate_ep[blossombase[bv]]]] = 0
                    assign_label(hit, 2, labelend[hit])
                j += jstep
        label[b] = labelend[b] = -1
        blossomchilds[b] = blossomendps[b] = None
        blossombase[b] = -1
        blossombestedges[b] = None
        bestedge[b] = -1
        unusedblossoms.append(b)

    def augment_blossom(b, v):
        t = v
        while blossomparent[t] != b:
            t = blossomparent[t]
        if t >= n:
            augment_blossom(t, v)
        i = j = blossomchilds[b].index(t)
        if i & 1:
            j -= len(blossomchilds[b])
            jstep, endptrick = 1, 0
        else:
            jstep, endptrick = -1, 1
        while j != 0:
            j += jstep
            t = blossomchilds[b][j]
            p = blossomendps[b][j - endptrick] ^ endptrick
            if t >= n:
                augment_blossom(t, endpoint[p])
            j += jstep
            t = blossomchilds[b][j]
            if t >= n:
                augment_blossom(t, endpoint[p ^ 1])
            mate_ep[endpoint[p]] = p ^ 1
            mate_ep[endpoint[p ^ 1]] = p
        blossomchilds[b] = blossomchilds[b][i:] + blossomchilds[b][:i]
        blossomendps[b] = blossomendps[b][i:] + blossomendps[b][:i]
        blossombase[b] = blossombase[blossomchilds[b][0]]

    def augment_matching(k):
        v, w, _wt = edges[k]
        for s, p in ((v, 2 * k + 1), (w, 2 * k)):
            while True:
                bs = inblossom[s]
                if bs >= n:
                    augment_blossom(bs, s)
                mate_ep[s] = p
                if labelend[bs] == -1:
                    break
                t = endpoint[labelend[bs]]
                bt = inblossom[t]
                s = endpoint[labelend[bt]]
                j = endpoint[labelend[bt] ^ 1]
                if bt >= n:
                    augment_blossom(bt, j)
                mate_ep[j] = labelend[bt]
                p = labelend[bt] ^ 1

    for _stage in range(n):
        label[:] = [0] * (2 * n)
        bestedge[:] = [-1] * (2 * n)
        blossombestedges[n:] = [None] * n
        allowedge[:] = [False] * nedge
        queue[:] = []
        for v in range(n):
            if mate_ep[v] == -1 and label[inblossom[v]] == 0:
                assign_label(v, 1, -1)

        augmented = False
        while True:
            while queue and not augmented:
                v = queue.pop()
                for p in neighbend[v]:
                    k = p >> 1
                    w = endpoint[p]
                    if inblossom[v] == inblossom[w]:
                        continue
                    if not allowedge[k]:
                        kslack = slack(k)
                        if kslack <= 0:
                            allowedge[k] = True
                    if allowedge[k]:
                        if label[inblossom[w]] == 0:
                            assign_label(w, 2, p ^ 1)
                        elif label[inblossom[w]] == 1:
                            base = scan_blossom(v, w)
                            if base >= 0:
                                add_blossom(base, k)
                            else:
                                augment_matching(k)
                                augmented = True
                                break
                        elif label[w] == 0:
                            label[w] = 2
                            labelend[w] = p ^ 1
                    elif label[inblossom[w]] == 1:
                        b = inblossom[v]
                        if bestedge[b] == -1 or kslack < slack(bestedge[b]):
                            bestedge[b] = k
                    elif label[w] == 0:
                        if bestedge[w] == -1 or kslack < slack(bestedge[w]):
                            bestedge[w] = k
            if augmented:
                break

            # no augmenting path under current duals: pick the dual step
            deltatype = 1
            delta = min(dualvar[:n])
            deltaedge = deltablossom = -1
            for v in range(n):
                if label[inblossom[v]] == 0 and bestedge[v] != -1:
                    d = slack(bestedge[v])
                    if d < delta:
                        delta, deltatype, deltaedge = d, 2, bestedge[v]
            for b in range(2 * n):
                if blossomparent[b] == -1 and label[b] == 1 and bestedge[b] != -1:
                    d = slack(bestedge[b]) // 2
                    if d < delta:
                        delta, deltatype, deltaedge = d, 3, bestedge[b]
            for b in range(n, 2 * n):
                if (
                    blossombase[b] >= 0
                    and blossomparent[b] == -1
                    and label[b] == 2
                    and dualvar[b] < delta
                ):
                    delta, deltatype, deltablossom = dualvar[b], 4, b

            for v in range(n):
                lb = label[inblossom[v]]
                if lb == 1:
                    dualvar[v] -= delta
                elif lb == 2:
                    dualvar[v] += delta
            for b in range(n, 2 * n):
                if blossombase[b] >= 0 and blossomparent[b] == -1:
                    if label[b] == 1:
                        dualvar[b] += delta
                    elif label[b] == 2:
                        dualvar[b] -= delta

            if deltatype == 1:
                break
            elif deltatype == 2:
                allowedge[deltaedge] = True
                i, j, _ = edges[deltaedge]
                if label[inblossom[i]] == 0:
                    i, j = j, i
                queue.append(i)
            elif deltatype == 3:
                allowedge[deltaedge] = True
                i, j, _ = edges[deltaedge]
                queue.append(i)
            else:
                expand_blossom(deltablossom, False)

        if not augmented:
            break
        for b in range(n, 2 * n):
            if (
                blossomparent[b] == -1
                and blossombase[b] >= 0
                and label[b] == 1
                and dualvar[b] == 0
            ):
                expand_blossom(b, True)

    for v in range(n):
        if mate_ep[v] >= 0:
            mate[v] = endpoint[mate_ep[v]]
    return mate


def _mate_to_matching(graph: WeightedColoredGraph, mate: Sequence[int]) -> Matching:
    ids = [graph.edge_id(v, u) for v, u in enumerate(mate) if u > v]
    return Matching(graph, frozenset(ids))


def _adjacency_lists(graph: WeightedColoredGraph) -> list[list[int]]:
    return [graph.neighbors(v) for v in range(graph.vertex_count)]


def max_cardinality_matching(graph: WeightedColoredGraph) -> Matching:
    return _mate_to_matching(graph, max_cardinality_mate(graph.vertex_count, _adjacency_lists(graph)))


def has_perfect_matching(graph: WeightedColoredGraph) -> bool:
    if graph.vertex_count % 2:
        return False
    mate = max_cardinality_mate(graph.vertex_count, _adjacency_lists(graph))
    return all(m != -1 for m in mate)


def perfect_matching(graph: WeightedColoredGraph) -> Matching | None:
    """Some perfect matching of ``graph``, or ``None``."""
    if graph.vertex_count % 2:
        return None
    mate = max_cardinality_mate(graph.vertex_count, _adjacency_lists(graph))
    if any(m == -1 for m in mate):
        return None
    return _mate_to_matching(graph, mate)


def shifted_weights(vertex_count: int, edges: Sequence[tuple[int, int, int]]) -> list[tuple[int, int, int]]:
    """Add ``n * maxweight + 1`` to every weight so maximum weight implies perfect.

    Any matching missing an edge loses at least one shift, which outweighs the
    at most ``(n - 1) * maxweight`` gained elsewhere.
    """
    half = vertex_count // 2
    maxw = max((w for _u, _v, w in edges), default=0)
    shift = half * maxw + 1
    if half * (shift + maxw) > INT64_MAX:
        raise InputTooLarge(
            f"shifted perfect matching weight {half * (shift + maxw)} exceeds 64-bit range"
        )
    return [(u, v, w + shift) for u, v, w in edges]


def max_weight_perfect_mate(vertex_count: int, edges: Sequence[tuple[int, int, int]]) -> list[int] | None:
    if vertex_count % 2:
        return None
    if vertex_count == 0:
        return []
    # the cardinality kernel is an order of magnitude cheaper and settles infeasible inputs
    adj: list[list[int]] = [[] for _ in range(vertex_count)]
    for u, v, _w in edges:
        adj[u].append(v)
        adj[v].append(u)
    if any(m == -1 for m in max_cardinality_mate(vertex_count, adj)):
        return None
    mate = max_weight_mate(vertex_count, shifted_weights(vertex_count, edges))
    if any(m == -1 for m in mate):
        return None
    return mate


def max_weight_perfect_matching(graph: WeightedColoredGraph) -> Matching | None:
    """A perfect matching of maximum total weight, or ``None`` if there is none."""
    mate = max_weight_perfect_mate(graph.vertex_count, [(e.u, e.v, e.w) for e in graph.edges])
    if mate is None:
        return None
    return _mate_to_matching(graph, mate)
