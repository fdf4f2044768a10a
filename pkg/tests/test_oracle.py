import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from _instances import random_graph
from conftest import graphs
from topkmatch.graph import Color, GraphError, WeightedColoredGraph
from topkmatch.oracle import (
    OracleSizeError,
    _mul,
    brute_force_em,
    brute_force_tkpm,
    em_profile,
    enumerate_perfect_matchings,
    pfaffian_polynomial,
    poly_determinant,
    poly_sqrt,
    randomized_em,
    randomized_em_profile,
)


def c4():
    return WeightedColoredGraph(4, [(0, 1, 1), (1, 2, 2), (2, 3, 1), (0, 3, 2)])


def test_tkpm_oracle_examples():
    assert brute_force_tkpm(c4(), 2)[0] == 4
    assert brute_force_tkpm(WeightedColoredGraph(2, []), 1) is None
    value, m = brute_force_tkpm(c4(), 1)
    assert value == 2 and m.is_perfect and m.topk(1) == 2
    with pytest.raises(OracleSizeError):
        brute_force_tkpm(WeightedColoredGraph(22, []), 1)


def test_em_oracle_examples():
    two = WeightedColoredGraph(4, [(0, 1, 1, "r"), (2, 3, 1, "b")])
    m = brute_force_em(two, 1)
    assert m is not None and m.is_perfect and m.red_count == 1
    assert brute_force_em(two, 0) is None and brute_force_em(two, 2) is None
    blue = WeightedColoredGraph(4, [(u, v, 1, "b") for u, v in itertools.combinations(range(4), 2)])
    assert brute_force_em(blue, 0).is_perfect
    with pytest.raises(GraphError):
        brute_force_em(c4(), 0)


def test_enumeration_counts():
    k6 = WeightedColoredGraph(6, [(u, v, 1) for u, v in itertools.combinations(range(6), 2)])
    assert sum(1 for _ in enumerate_perfect_matchings(k6)) == 15
    assert list(enumerate_perfect_matchings(WeightedColoredGraph(3, [(0, 1, 1)]))) == []


@given(graphs(max_vertices=10, colored=True), st.integers(0, 5))
def test_dp_oracles_match_plain_enumeration(g, k):
    pms = list(enumerate_perfect_matchings(g))
    found = brute_force_tkpm(g, k)
    if not pms:
        assert found is None
    else:
        best = max(sum(sorted((g.edges[e].w for e in pm), reverse=True)[:k]) for pm in pms)
        assert found[0] == best and found[1].topk(k) == best
    reds = {sum(g.edges[e].color is Color.RED for e in pm) for pm in pms}
    assert em_profile(g) == reds
    for r in reds:
        assert brute_force_em(g, r).red_count == r


@given(graphs(max_vertices=10), st.integers(0, 5), st.randoms(use_true_random=False))
def test_tkpm_oracle_invariant_under_relabeling(g, k, rng):
    perm = list(range(g.vertex_count))
    rng.shuffle(perm)
    relabeled = WeightedColoredGraph(g.vertex_count, [(perm[e.u], perm[e.v], e.w) for e in g.edges])
    a, b = brute_force_tkpm(g, k), brute_force_tkpm(relabeled, k)
    assert (a is None) == (b is None)
    if a is not None:
        assert a[0] == b[0]


def _leibniz(matrix):
    size = len(matrix)
    total = [0]
    for perm in itertools.permutations(range(size)):
        inversions = sum(perm[i] > perm[j] for i in range(size) for j in range(i + 1, size))
        term = [(-1) ** inversions]
        for i, j in enumerate(perm):
            term = _mul(term, matrix[i][j])
        total = [a + b for a, b in itertools.zip_longest(total, term, fillvalue=0)]
    while total and total[-1] == 0:
        total.pop()
    return total


def test_poly_determinant_against_leibniz():
    rng = random.Random(1)
    for _ in range(60):
        size = rng.randint(1, 5)
        matrix = [
            [[rng.randint(-3, 3) for _ in range(rng.randint(0, 2))] for _ in range(size)] for _ in range(size)
        ]
        for row in matrix:
            for p in row:
                while p and p[-1] == 0:
                    p.pop()
        assert poly_determinant(matrix) == _leibniz(matrix)


@given(st.lists(st.integers(-9, 9), max_size=5))
def test_poly_sqrt_roundtrip(q):
    while q and q[-1] == 0:
        q.pop()
    square = _mul(q, q)
    root = poly_sqrt(square)
    assert _mul(root, root) == square


def test_poly_sqrt_rejects_non_squares():
    for p in ([2], [1, 1], [0, 1], [1, 0, 3]):
        with pytest.raises(ArithmeticError):
            poly_sqrt(p)


def test_pfaffian_of_single_edge():
    g = WeightedColoredGraph(2, [(0, 1, 0, "r")])
    assert pfaffian_polynomial(g, [3]) in ([0, 8], [0, -8])


def test_randomized_em_examples():
    two = WeightedColoredGraph(4, [(0, 1, 1, "r"), (2, 3, 1, "b")])
    assert randomized_em(two, 1, trials=20, seed=0)
    assert not randomized_em(two, 0, trials=20, seed=0)
    assert not randomized_em(two, 5, trials=20, seed=0)


def test_randomized_em_one_sided_exhaustive_small():
    rng = random.Random(2)
    for i in range(120):
        g = random_graph(rng, rng.choice([2, 4, 6, 8, 10, 12]), rng.uniform(0.3, 0.9), colored=True)
        truth = em_profile(g)
        found = randomized_em_profile(g, trials=3, seed=i)
        assert found <= truth
        for k in range(g.n + 1):
            if k not in truth:
                assert not randomized_em(g, k, trials=5, seed=i)
