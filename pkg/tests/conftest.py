import itertools

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from topkmatch.graph import WeightedColoredGraph

settings.register_profile(
    "repo", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@st.composite
def graphs(draw, max_vertices=10, even=True, colored=False, max_weight=30):
    nv = draw(st.integers(0, max_vertices))
    if even and nv % 2:
        nv -= 1
    pairs = list(itertools.combinations(range(nv), 2))
    present = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = []
    for (u, v), keep in zip(pairs, present):
        if keep:
            w = draw(st.integers(0, max_weight))
            color = draw(st.sampled_from("rb")) if colored else None
            edges.append((u, v, w, color))
    return WeightedColoredGraph(nv, edges)
