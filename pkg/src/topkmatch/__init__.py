"""Top-k perfect matching and exact matching on structured dense graphs."""

from .graph import Color, Edge, GraphError, Matching, WeightedColoredGraph, topk_value
from .matching import max_weight_perfect_matching, perfect_matching
from .nd import (
    SolveStats,
    TypePartition,
    compute_type_partition,
    tc_mwm,
    tkpm_approx_nd,
    tkpm_exact_nd,
)
from .oracle import brute_force_em, brute_force_tkpm, randomized_em
from .prototype import Blob, Prototype, blow_up, find_bandwidth_ordering, find_loose_separator
from .recursive import bbb, em_recursive, tkpm_recursive

__all__ = [
    "Blob",
    "Color",
    "Edge",
    "GraphError",
    "Matching",
    "Prototype",
    "SolveStats",
    "TypePartition",
    "WeightedColoredGraph",
    "bbb",
    "blow_up",
    "brute_force_em",
    "brute_force_tkpm",
    "compute_type_partition",
    "em_recursive",
    "find_bandwidth_ordering",
    "find_loose_separator",
    "max_weight_perfect_matching",
    "perfect_matching",
    "randomized_em",
    "tc_mwm",
    "tkpm_approx_nd",
    "tkpm_exact_nd",
    "tkpm_recursive",
    "topk_value",
]
