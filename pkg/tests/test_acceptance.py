"""Acceptance criteria 1-9, one PASS/FAIL line each (visible in ``pytest -v`` output)."""

from __future__ import annotations

import itertools
import math
import random
import time
from functools import lru_cache

import pytest

from _instances import random_blowup, random_graph
from topkmatch.graph import WeightedColoredGraph, induced_subgraph
from topkmatch.matching import has_perfect_matching, max_weight_perfect_matching
from topkmatch.nd import SolveStats, compute_type_partition, exact_iteration_count, tkpm_approx_nd, tkpm_exact_nd
from topkmatch.oracle import brute_force_em, brute_force_tkpm, enumerate_perfect_matchings, randomized_em
from topkmatch.prototype import (
    Blob,
    Prototype,
    check_separator,
    find_bandwidth_ordering,
    find_loose_separator,
    guaranteed_window_count,
    random_banded_prototype,
)
from topkmatch.recursive import em_recursive, tkpm_recursive


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")

    return emit


@lru_cache(maxsize=None)
def criterion1_instances():
    rng = random.Random(20240101)
    out = []
    for _ in range(200):
        graph, _proto, _blob_of = random_blowup(rng, max_blobs=5, max_vertices=16, max_gamma=4, wmax=100)
        k = rng.randint(1, min(4, graph.n))
        out.append((graph, k))
    return tuple(out)


@lru_cache(maxsize=None)
def oracle_values():
    return tuple(brute_force_tkpm(g, k)[0] for g, k in criterion1_instances())


def test_criterion_1_exact_matches_oracle(report):
    started = time.perf_counter()
    instances = criterion1_instances()
    expected = oracle_values()
    mismatches = []
    for (graph, k), want in zip(instances, expected):
        got = tkpm_exact_nd(graph, k)
        if got is None or not got.is_perfect or got.topk(k) != want:
            mismatches.append((graph, k, want, got))
    elapsed = time.perf_counter() - started
    ok = not mismatches and elapsed < 60
    report(1, ok, f"{len(instances) - len(mismatches)}/{len(instances)} equal to oracle in {elapsed:.1f}s")
    assert not mismatches
    assert elapsed < 60


def complete_multipartite(gamma: int, part: int) -> WeightedColoredGraph:
    if gamma == 1:
        nv = part
        edges = [(u, v, (u * 7 + v * 3) % 50 + 1) for u, v in itertools.combinations(range(nv), 2)]
        return WeightedColoredGraph(nv, edges)
    nv = gamma * part
    edges = [
        (u, v, (u * 7 + v * 3) % 50 + 1)
        for u, v in itertools.combinations(range(nv), 2)
        if u // part != v // part
    ]
    return WeightedColoredGraph(nv, edges)


def test_criterion_2_iteration_count(report):
    failures = []
    points = 0
    for k in range(1, 5):
        for gamma in range(1, 5):
            graph = complete_multipartite(gamma, max(2 * k, 2))
            part = compute_type_partition(graph)
            assert part.gamma == gamma
            assert all(s >= 2 * k for s in part.sizes())
            stats = SolveStats()
            tkpm_exact_nd(graph, k, part, stats)
            points += 1
            if stats.tuples_visited != exact_iteration_count(k, gamma):
                failures.append((k, gamma, stats.tuples_visited, exact_iteration_count(k, gamma)))
    report(2, not failures, f"{points - len(failures)}/{points} grid points hit C(2k+g-1, g-1) exactly")
    assert not failures


def test_criterion_3_approximation(report):
    instances = criterion1_instances()
    expected = oracle_values()
    violations = []
    checks = 0
    for eps in (0.1, 0.3, 0.5):
        for (graph, k), opt in zip(instances, expected):
            exact = tkpm_exact_nd(graph, k).topk(k)
            got = tkpm_approx_nd(graph, k, eps)
            checks += 1
            if got is None or not got.is_perfect:
                violations.append((eps, k, "no PM"))
                continue
            value = got.topk(k)
            if value < (1 - eps) * opt or value > exact:
                violations.append((eps, k, value, opt, exact))
    report(3, not violations, f"{checks - len(violations)}/{checks} runs within [(1-eps)OPT, exact]")
    assert not violations


def _random_matching(rng: random.Random, graph: WeightedColoredGraph) -> frozenset[int]:
    order = list(range(graph.edge_count))
    rng.shuffle(order)
    used: set[int] = set()
    chosen = []
    stop = rng.random()
    for eid in order:
        e = graph.edges[eid]
        if e.u in used or e.v in used:
            continue
        if rng.random() < stop:
            chosen.append(eid)
            used.update((e.u, e.v))
    return frozenset(chosen)


def _residual_has_pm(graph, ids) -> bool:
    covered = {x for eid in ids for x in (graph.edges[eid].u, graph.edges[eid].v)}
    keep = [v for v in range(graph.vertex_count) if v not in covered]
    return has_perfect_matching(induced_subgraph(graph, keep).graph)


def test_criterion_4_extendibility(report):
    rng = random.Random(4)
    triples = 0
    disagreements = 0
    outcomes = {True: 0, False: 0}
    while triples < 500:
        graph, _proto, _ = random_blowup(rng, max_blobs=5, max_vertices=12, max_size=4)
        part = compute_type_partition(graph)
        by_profile: dict[tuple[int, ...], list[frozenset[int]]] = {}
        for _ in range(40):
            m = _random_matching(rng, graph)
            profile = [0] * part.gamma
            for eid in m:
                e = graph.edges[eid]
                profile[part.class_of[e.u]] += 1
                profile[part.class_of[e.v]] += 1
            by_profile.setdefault(tuple(profile), []).append(m)
        for group in by_profile.values():
            distinct = list(dict.fromkeys(group))
            if len(distinct) < 2:
                continue
            m1, m2 = rng.sample(distinct, 2)
            a, b = _residual_has_pm(graph, m1), _residual_has_pm(graph, m2)
            triples += 1
            outcomes[a] += 1
            disagreements += a != b
            if triples == 500:
                break
    detail = f"{500 - disagreements}/500 agree ({outcomes[True]} extendible, {outcomes[False]} not)"
    report(4, disagreements == 0, detail)
    assert disagreements == 0
    assert outcomes[True] and outcomes[False]


def test_criterion_5_loose_separator(report):
    rng = random.Random(5)
    cases = 0
    failures = []
    while cases < 500:
        count = rng.randint(8, 48)
        phi = rng.randint(1, 3)
        bound = guaranteed_window_count(count, phi)
        if bound < 1:
            continue
        proto = random_banded_prototype(rng, count, phi, rng.uniform(0.3, 1.0), [1] * count, ["i"] * count)
        # relabel blobs so the bandwidth ordering is not the identity
        perm = list(range(count))
        rng.shuffle(perm)
        bands = tuple((perm[i], perm[j]) for i, j in proto.bands)
        relabeled = Prototype(tuple(Blob(1, "i") for _ in range(count)), bands)
        ordering = [0] * count
        for old, new in enumerate(perm):
            ordering[old] = new
        max_tight = (bound - 1) // 2
        tight = rng.sample(list(relabeled.bands), min(len(relabeled.bands), rng.randint(0, max_tight)))
        assert 2 * len(tight) < bound
        sep = find_loose_separator(relabeled, ordering, tight, phi)
        cases += 1
        if sep is None:
            failures.append((count, phi, tight, "none"))
            continue
        problems = check_separator(relabeled, ordering, tight, phi, sep)
        if problems:
            failures.append((count, phi, tight, problems))
    report(5, not failures, f"{cases - len(failures)}/{cases} separators valid")
    assert not failures


@lru_cache(maxsize=None)
def criterion6_instances():
    rng = random.Random(6)
    out = []
    for i in range(100):
        family = "path" if i % 2 == 0 else "cycle"
        graph, proto, blob_of = random_blowup(rng, max_blobs=8, max_vertices=16, family=family, max_size=3)
        k = rng.randint(1, min(4, graph.n))
        out.append((graph, proto, blob_of, k))
    return tuple(out)


@pytest.mark.parametrize("base_blobs", [16, 0], ids=["C16", "C0"])
def test_criterion_6_recursive_equals_exact(report, base_blobs):
    mismatches = 0
    recursed = 0
    for graph, proto, blob_of, k in criterion6_instances():
        ordering = find_bandwidth_ordering(proto)
        stats = SolveStats()
        got = tkpm_recursive(graph, proto, ordering, k, blob_of=blob_of, base_blobs=base_blobs, stats=stats)
        want = tkpm_exact_nd(graph, k)
        recursed += stats.edge_sets > 0
        if got is None or not got.is_perfect or got.topk(k) != want.topk(k):
            mismatches += 1
    detail = f"C={base_blobs}: {100 - mismatches}/100 equal to exact, {recursed} instances took a separator split"
    report(6, mismatches == 0, detail)
    assert mismatches == 0


@pytest.mark.parametrize("base_blobs", [16, 0], ids=["C16", "C0"])
def test_criterion_7_em_recursive(report, base_blobs):
    rng = random.Random(7)
    disagreements = 0
    decisions = 0
    yes = 0
    for i in range(100):
        family = ("path", "cycle", "banded")[i % 3]
        graph, proto, blob_of = random_blowup(
            rng, max_blobs=8, max_vertices=14, family=family, colored=True, max_size=3
        )
        ordering = find_bandwidth_ordering(proto)
        for k in range(graph.n + 1):
            want = brute_force_em(graph, k) is not None
            got = em_recursive(graph, proto, ordering, k, blob_of=blob_of, base_blobs=base_blobs)
            valid = got is None or (got.is_perfect and got.red_count == k)
            decisions += 1
            yes += want
            disagreements += (got is not None) != want or not valid
    detail = f"C={base_blobs}: {decisions - disagreements}/{decisions} decisions agree ({yes} yes)"
    report(7, disagreements == 0, detail)
    assert disagreements == 0


def test_criterion_8_randomized_em(report):
    rng = random.Random(8)
    no_cases: list[tuple[WeightedColoredGraph, int]] = []
    yes_cases: list[tuple[WeightedColoredGraph, int]] = []
    while len(no_cases) < 100 or len(yes_cases) < 100:
        graph, _proto, _ = random_blowup(rng, max_blobs=5, max_vertices=12, colored=True)
        ks = list(range(graph.n + 1))
        rng.shuffle(ks)
        for k in ks:
            if brute_force_em(graph, k) is None:
                if len(no_cases) < 100:
                    no_cases.append((graph, k))
            elif len(yes_cases) < 100:
                yes_cases.append((graph, k))
    false_pos = sum(randomized_em(g, k, trials=20, seed=i) for i, (g, k) in enumerate(no_cases))
    detected = sum(randomized_em(g, k, trials=20, seed=i) for i, (g, k) in enumerate(yes_cases))
    ok = false_pos == 0 and detected >= 99
    report(8, ok, f"{false_pos} false positives on 100 NO, {detected}/100 YES detected")
    assert false_pos == 0
    assert detected >= 99


def test_criterion_9_mwpm_kernel(report):
    rng = random.Random(9)
    mismatches = 0
    feasible = 0
    for _ in range(1000):
        nv = rng.choice([0, 2, 4, 6, 8, 10])
        graph = random_graph(rng, nv, rng.uniform(0.2, 1.0), wmax=rng.choice([1, 5, 100]))
        best = max(
            (sum(graph.edges[e].w for e in pm) for pm in enumerate_perfect_matchings(graph)),
            default=None,
        )
        got = max_weight_perfect_matching(graph)
        value = None if got is None else got.weight
        if got is not None and not got.is_perfect:
            value = math.nan
        feasible += best is not None
        mismatches += value != best
    report(9, mismatches == 0, f"{1000 - mismatches}/1000 equal to brute force ({feasible} with a PM)")
    assert mismatches == 0
