"""Work counters of the separator recursion on growing path and cycle blow-ups.

The trend is recorded, not asserted.  Every row is checked against the
exact neighborhood-diversity solver.

    python scripts/recursive_growth.py --max-blobs 16 --output growth.csv
"""

from __future__ import annotations

import argparse
import csv
import random
import sys
import time
from dataclasses import dataclass

from topkmatch.nd import SolveStats, tkpm_exact_nd
from topkmatch.prototype import UniformWeights, blow_up, cycle_prototype, path_prototype
from topkmatch.recursive import tkpm_recursive


@dataclass
class Config:
    min_blobs: int = 6
    max_blobs: int = 16
    blob_size: int = 2
    k: int = 2
    base_blobs: int = 0
    threshold_alpha: float = 0.5
    seed: int = 0


def sweep(cfg: Config):
    rng = random.Random(cfg.seed)
    for family, build in (("path", path_prototype), ("cycle", cycle_prototype)):
        for count in range(cfg.min_blobs, cfg.max_blobs + 1, 2):
            proto = build([cfg.blob_size] * count, "c")
            graph, bmap = blow_up(proto, UniformWeights(100), seed=rng.randrange(1 << 30))
            stats = SolveStats()
            started = time.perf_counter()
            got = tkpm_recursive(
                graph,
                proto,
                proto.ordering,
                cfg.k,
                blob_of=bmap.blob_of,
                threshold_alpha=cfg.threshold_alpha,
                base_blobs=cfg.base_blobs,
                stats=stats,
            )
            elapsed = time.perf_counter() - started
            exact = tkpm_exact_nd(graph, cfg.k)
            yield {
                "family": family,
                "blobs": count,
                "vertices": graph.vertex_count,
                "k": cfg.k,
                "tight_sets": stats.tight_sets,
                "recursion_nodes": stats.recursion_nodes,
                "edge_sets": stats.edge_sets,
                "base_cases": stats.base_cases,
                "mwpm_calls": stats.mwpm_calls,
                "objective": got.topk(cfg.k),
                "matches_exact": got.topk(cfg.k) == exact.topk(cfg.k),
                "seconds": round(elapsed, 3),
            }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--min-blobs", type=int, default=Config.min_blobs)
    parser.add_argument("--max-blobs", type=int, default=Config.max_blobs)
    parser.add_argument("--blob-size", type=int, default=Config.blob_size)
    parser.add_argument("-k", type=int, default=Config.k)
    parser.add_argument("--base-blobs", type=int, default=Config.base_blobs)
    parser.add_argument("--threshold-alpha", type=float, default=Config.threshold_alpha)
    parser.add_argument("--seed", type=int, default=Config.seed)
    parser.add_argument("--output", default=None)
    args = parser.parse_args()
    cfg = Config(
        args.min_blobs, args.max_blobs, args.blob_size, args.k, args.base_blobs, args.threshold_alpha, args.seed
    )
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    writer = None
    for row in sweep(cfg):
        if writer is None:
            writer = csv.DictWriter(out, fieldnames=list(row))
            writer.writeheader()
        writer.writerow(row)
        out.flush()
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
