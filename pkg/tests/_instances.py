"""Seeded random instances shared by the test modules."""

from __future__ import annotations

import random

from topkmatch.graph import WeightedColoredGraph
from topkmatch.matching import has_perfect_matching
from topkmatch.nd import compute_type_partition
from topkmatch.prototype import (
    RandomColors,
    UniformWeights,
    blow_up,
    cycle_prototype,
    path_prototype,
    random_banded_prototype,
    random_prototype,
)


def random_graph(rng: random.Random, vertex_count: int, density: float, wmax: int = 20, colored: bool = False):
    edges = []
    for u in range(vertex_count):
        for v in range(u + 1, vertex_count):
            if rng.random() < density:
                color = rng.choice("rb") if colored else None
                edges.append((u, v, rng.randint(0, wmax), color))
    return WeightedColoredGraph(vertex_count, edges)


def _sizes(rng, count, lo, hi, max_vertices):
    sizes = [rng.randint(lo, hi) for _ in range(count)]
    if sum(sizes) % 2:
        sizes[rng.randrange(count)] += 1
    while sum(sizes) > max_vertices:
        i = max(range(count), key=lambda j: sizes[j])
        if sizes[i] <= 2:
            return None
        sizes[i] -= 2
    return sizes


def random_blowup(
    rng: random.Random,
    *,
    max_blobs: int = 5,
    max_vertices: int = 16,
    max_gamma: int | None = None,
    wmax: int = 100,
    colored: bool = False,
    family: str = "random",
    max_size: int = 4,
    phi: int = 2,
):
    """Blow-up with a perfect matching: (graph, prototype, blob_of)."""
    while True:
        count = rng.randint(2 if family != "cycle" else 3, max_blobs)
        sizes = _sizes(rng, count, 1, max_size, max_vertices)
        if sizes is None:
            continue
        kinds = [rng.choice("ci") for _ in range(count)]
        if family == "random":
            proto = random_prototype(rng, count, rng.uniform(0.3, 0.9), sizes, kinds)
        elif family == "path":
            proto = path_prototype(sizes, kinds)
        elif family == "cycle":
            proto = cycle_prototype(sizes, kinds)
        elif family == "banded":
            proto = random_banded_prototype(rng, count, phi, rng.uniform(0.4, 0.9), sizes, kinds)
        else:
            raise ValueError(family)
        colors = RandomColors(rng.uniform(0.2, 0.8)) if colored else None
        graph, bmap = blow_up(proto, UniformWeights(wmax), colors, seed=rng.randrange(1 << 30))
        if not has_perfect_matching(graph):
            continue
        if max_gamma is not None and compute_type_partition(graph).gamma > max_gamma:
            continue
        return graph, proto, bmap.blob_of
