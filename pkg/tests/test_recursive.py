import math
import random

import pytest

from _instances import random_blowup
from topkmatch.graph import Color, WeightedColoredGraph
from topkmatch.matching import max_weight_perfect_matching
from topkmatch.nd import SolveStats, tkpm_exact_nd
from topkmatch.oracle import brute_force_tkpm, em_profile, enumerate_perfect_matchings
from topkmatch.prototype import (
    Blob,
    Prototype,
    blow_up,
    find_bandwidth_ordering,
    path_prototype,
)
from topkmatch.recursive import (
    RecursionBudget,
    bbb,
    budgets,
    default_threshold,
    em_recursive,
    tight_set_candidates,
    tkpm_recursive,
)


def test_budgets_sum_to_k():
    for k in range(6):
        got = list(budgets(k))
        assert all(isinstance(b, RecursionBudget) and b.total == k for b in got)
        assert len(set(got)) == len(got) == math.comb(k + 3, 3)


def test_default_thresholds():
    assert default_threshold(16, 0.5) == 4
    assert default_threshold(17, 0.5) == 5
    assert default_threshold(1, 12 / 13) == 1


def test_tight_set_candidates_sizes():
    proto = path_prototype([1] * 5)
    sets = list(tight_set_candidates(proto, 2))
    assert len(sets) == 1 + 4 + 6
    assert all(len(t) <= 2 for t in sets)


def _solve(graph, proto, k, **kw):
    return tkpm_recursive(graph, proto, find_bandwidth_ordering(proto), k, **kw)


def test_base_case_delegates_to_exact():
    rng = random.Random(1)
    for _ in range(20):
        graph, proto, blob_of = random_blowup(rng, max_blobs=5, max_vertices=12, family="path")
        k = rng.randint(0, graph.n)
        stats = SolveStats()
        got = _solve(graph, proto, k, blob_of=blob_of, stats=stats)
        assert stats.edge_sets == 0
        assert got.topk(k) == tkpm_exact_nd(graph, k).topk(k)


def test_heavy_edge_on_path():
    proto = path_prototype([2] * 6)
    plain, _ = blow_up(proto)
    pms = list(enumerate_perfect_matchings(plain))
    seen = set()
    for heavy in range(plain.edge_count):
        weights = [1] * plain.edge_count
        weights[heavy] = 50
        graph, bmap = blow_up(proto, weights)
        got = _solve(graph, proto, 1, blob_of=bmap.blob_of, base_blobs=0)
        usable = any(heavy in pm for pm in pms)
        seen.add(usable)
        assert got.topk(1) == (50 if usable else 1) == brute_force_tkpm(graph, 1)[0]
    assert seen == {True, False}


def test_bandless_prototype():
    proto = Prototype((Blob(2, "c"), Blob(4, "c")), ())
    graph, bmap = blow_up(proto, [3, 1, 2, 3, 4, 5, 6])
    got = _solve(graph, proto, 2, blob_of=bmap.blob_of, base_blobs=0)
    assert got.topk(2) == tkpm_exact_nd(graph, 2).topk(2) == 9


@pytest.mark.parametrize("family, seed", [("path", 1), ("cycle", 2), ("banded", 3)])
def test_deep_recursion_matches_oracle(family, seed):
    rng = random.Random(seed)
    split = 0
    for _ in range(16):
        graph, proto, blob_of = random_blowup(
            rng, max_blobs=14, max_vertices=16, family=family, max_size=2, phi=2
        )
        k = rng.randint(1, min(4, graph.n))
        stats = SolveStats()
        got = _solve(graph, proto, k, blob_of=blob_of, base_blobs=0, stats=stats)
        split += stats.edge_sets > 0
        assert got.is_perfect
        assert got.topk(k) == brute_force_tkpm(graph, k)[0]
    assert split > 0


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.9])
def test_threshold_sweep_stays_exact(alpha):
    rng = random.Random(7)
    for _ in range(6):
        graph, proto, blob_of = random_blowup(rng, max_blobs=10, max_vertices=14, family="path", max_size=2)
        k = rng.randint(1, min(3, graph.n))
        got = _solve(graph, proto, k, blob_of=blob_of, base_blobs=0, threshold_alpha=alpha)
        assert got.topk(k) == tkpm_exact_nd(graph, k).topk(k)


def test_bbb_with_loose_promise_is_exact():
    rng = random.Random(8)
    for _ in range(10):
        graph, proto, blob_of = random_blowup(rng, max_blobs=10, max_vertices=14, family="path", max_size=2)
        k = rng.randint(1, min(3, graph.n))
        got = bbb(k, proto, 1, graph, (), threshold=graph.n + 1, blob_of=blob_of, base_blobs=0)
        assert got.topk(k) == tkpm_exact_nd(graph, k).topk(k)


def test_no_perfect_matching():
    proto = path_prototype([1, 3], "i")
    graph, bmap = blow_up(proto, 1)
    assert _solve(graph, proto, 1, blob_of=bmap.blob_of) is None


def test_em_examples():
    proto = path_prototype([2, 2], "i")
    graph, bmap = blow_up(proto, 1, "b")
    order = find_bandwidth_ordering(proto)
    assert em_recursive(graph, proto, order, 0, blob_of=bmap.blob_of) is not None
    assert em_recursive(graph, proto, order, 1, blob_of=bmap.blob_of) is None
    two = Prototype((Blob(2, "c"), Blob(2, "c")), ())
    graph, bmap = blow_up(two, 1, ["r", "b"])
    m = em_recursive(graph, two, (0, 1), 1, blob_of=bmap.blob_of)
    assert m is not None and m.red_count == 1 and m.is_perfect


def test_em_agrees_with_profile_under_recursion():
    rng = random.Random(9)
    for _ in range(15):
        graph, proto, blob_of = random_blowup(
            rng, max_blobs=12, max_vertices=14, family="banded", colored=True, max_size=2, phi=1
        )
        order = find_bandwidth_ordering(proto)
        profile = em_profile(graph)
        for k in range(graph.n + 1):
            got = em_recursive(graph, proto, order, k, blob_of=blob_of, base_blobs=0, threshold_alpha=0.5)
            assert (got is not None) == (k in profile)


def test_em_sanity_coupling():
    rng = random.Random(10)
    for _ in range(20):
        graph, proto, blob_of = random_blowup(rng, max_blobs=8, max_vertices=14, family="path", colored=True)
        red_weighted = WeightedColoredGraph(
            graph.vertex_count, [(e.u, e.v, int(e.color is Color.RED), e.color) for e in graph.edges]
        )
        k = max_weight_perfect_matching(red_weighted).red_count
        got = em_recursive(graph, proto, find_bandwidth_ordering(proto), k, blob_of=blob_of)
        assert got is not None and got.red_count == k
