"""Command line front end: ``solve``, ``generate``, ``bench`` and ``validate``.

Exit codes: 0 solved (or EM answered yes), 1 infeasible (or EM no), 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
import time
from dataclasses import dataclass
from typing import Any, Sequence

from .graph import GraphError, Matching
from .instance import InstanceError, InstanceFile, generate_instance, parse_instance, write_instance
from .matching import InputTooLarge
from .nd import (
    SolveStats,
    band_count_tuples,
    compute_type_partition,
    exact_iteration_count,
    geometric_levels,
    tkpm_approx_nd,
    tkpm_exact_nd,
)
from .oracle import MAX_ORACLE_VERTICES, OracleSizeError, brute_force_em, brute_force_tkpm, randomized_em
from .prototype import OrderingRequired, bandwidth_of_ordering, find_bandwidth_ordering
from .recursive import (
    DEFAULT_BASE_BLOBS,
    EM_THRESHOLD_ALPHA,
    TKPM_THRESHOLD_ALPHA,
    default_threshold,
    em_recursive,
    tkpm_recursive,
)

ALGORITHMS = ("exact-nd", "approx-nd", "recursive", "em-recursive", "em-random", "oracle")
EM_ALGORITHMS = ("em-recursive", "em-random")

EXIT_SOLVED = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2


class UsageError(ValueError):
    """Instance and algorithm do not fit together."""


@dataclass
class SolveOptions:
    epsilon: float | None = None
    threshold_alpha: float | None = None
    seed: int = 0
    trials: int = 20
    max_oracle_size: int = MAX_ORACLE_VERTICES
    base_blobs: int = DEFAULT_BASE_BLOBS
    k: int | None = None


def _prototype_and_ordering(inst: InstanceFile):
    if inst.prototype is None:
        raise UsageError("this algorithm needs blob/band records in the instance")
    proto = inst.prototype
    try:
        ordering = proto.ordering if proto.ordering is not None else find_bandwidth_ordering(proto)
    except OrderingRequired as exc:
        raise UsageError(str(exc)) from None
    return proto, tuple(ordering)


def solve_instance(inst: InstanceFile, algorithm: str, options: SolveOptions | None = None) -> dict[str, Any]:
    """Run one solver and return a JSON-ready report."""
    options = options or SolveOptions()
    if algorithm not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {algorithm!r}")
    k = inst.k if options.k is None else options.k
    problem = "em" if algorithm in EM_ALGORITHMS else inst.problem
    if algorithm in ("exact-nd", "approx-nd", "recursive") and problem != "tkpm":
        raise UsageError(f"{algorithm} solves tkpm instances")
    graph = inst.graph()
    if graph.vertex_count % 2:
        raise UsageError(f"{graph.vertex_count} vertices: a perfect matching needs an even count")
    if not 0 <= k <= graph.n:
        raise UsageError(f"k={k} must lie in [0, {graph.n}]")
    if problem == "em":
        try:
            graph.require_colored()
        except GraphError as exc:
            raise UsageError(str(exc)) from None

    stats = SolveStats()
    extra: dict[str, Any] = {}
    used: dict[str, Any] = {}
    started = time.perf_counter()
    result: Matching | None = None
    decision = None

    if algorithm == "exact-nd":
        part = compute_type_partition(graph)
        extra["gamma"] = part.gamma
        extra["closed_form_tuples"] = exact_iteration_count(k, part.gamma)
        extra["caps_inactive"] = all(s >= 2 * k for s in part.sizes())
        result = tkpm_exact_nd(graph, k, part, stats)
    elif algorithm == "approx-nd":
        eps = options.epsilon if options.epsilon is not None else inst.epsilon
        if eps is None:
            raise UsageError("approx-nd needs --epsilon or an epsilon in the problem line")
        used["epsilon"] = eps
        part = compute_type_partition(graph)
        levels = geometric_levels(k, eps)
        slots = len(part.class_pairs())
        extra["gamma"] = part.gamma
        extra["levels"] = len(levels)
        extra["band_slots"] = slots
        extra["level_tuple_bound"] = len(levels) ** slots
        extra["band_tuples"] = sum(1 for _ in band_count_tuples(levels, slots, k))
        result = tkpm_approx_nd(graph, k, eps, part, stats)
    elif algorithm in ("recursive", "em-recursive"):
        proto, ordering = _prototype_and_ordering(inst)
        default_alpha = TKPM_THRESHOLD_ALPHA if algorithm == "recursive" else EM_THRESHOLD_ALPHA
        alpha = options.threshold_alpha if options.threshold_alpha is not None else default_alpha
        threshold = default_threshold(graph.n, alpha)
        used.update(threshold_alpha=alpha, base_blobs=options.base_blobs)
        extra["threshold"] = threshold
        extra["bandwidth"] = bandwidth_of_ordering(proto, ordering)
        solver = tkpm_recursive if algorithm == "recursive" else em_recursive
        try:
            result = solver(
                graph,
                proto,
                ordering,
                k,
                blob_of=inst.membership(),
                threshold=threshold,
                base_blobs=options.base_blobs,
                stats=stats,
            )
        except OracleSizeError as exc:
            raise UsageError(f"a base case is too large for brute force: {exc}") from None
    elif algorithm == "em-random":
        used.update(seed=options.seed, trials=options.trials)
        decision = randomized_em(graph, k, options.trials, options.seed)
    else:
        used["max_oracle_size"] = options.max_oracle_size
        try:
            if problem == "tkpm":
                found = brute_force_tkpm(graph, k, options.max_oracle_size)
                result = None if found is None else found[1]
            else:
                result = brute_force_em(graph, k, options.max_oracle_size)
        except OracleSizeError as exc:
            raise UsageError(str(exc)) from None
    elapsed = time.perf_counter() - started

    report: dict[str, Any] = {
        "problem": problem,
        "algorithm": algorithm,
        "k": k,
        "vertices": graph.vertex_count,
        "edges": graph.edge_count,
        "options": used,
        "counters": {**stats.as_dict(), **extra},
        "time_seconds": round(elapsed, 6),
    }
    if algorithm == "em-random":
        report["status"] = "solved" if decision else "infeasible"
        report["decision"] = "yes" if decision else "probably-no"
        report["matching"] = None
        return report
    report["status"] = "solved" if result is not None else "infeasible"
    report["matching"] = None if result is None else [list(p) for p in sorted(result.pairs())]
    if problem == "tkpm":
        report["objective"] = None if result is None else result.topk(k)
    else:
        report["decision"] = "yes" if result is not None else "no"
        report["red_edges"] = None if result is None else result.red_count
    return report


def validate_report(inst: InstanceFile, report: dict[str, Any]) -> list[str]:
    """Problems found when re-checking a solve report against its instance."""
    problems = []
    graph = inst.graph()
    k = report.get("k", inst.k)
    pairs = report.get("matching")
    if report.get("status") != "solved" or pairs is None:
        return problems
    try:
        m = Matching.from_pairs(graph, [tuple(p) for p in pairs])
    except (GraphError, ValueError, TypeError) as exc:
        return [f"matching is invalid: {exc}"]
    if not m.is_perfect:
        problems.append(f"matching covers {2 * len(m)} of {graph.vertex_count} vertices")
    if report.get("problem", inst.problem) == "tkpm":
        if report.get("objective") != m.topk(k):
            problems.append(f"objective {report.get('objective')} but the matching gives {m.topk(k)}")
    elif m.red_count != k:
        problems.append(f"matching has {m.red_count} red edges, k={k}")
    return problems


# --- bench ---

DEFAULT_BENCH = {
    "rows": [
        {
            "generator": {"prototype": "complete:3", "sizes": "8", "kinds": "i"},
            "algorithm": "exact-nd",
            "grid": {"k": [1, 2, 3, 4], "seed": [0]},
        },
        {
            "generator": {"prototype": "banded:5:2:0.7", "sizes": "random:1:4", "kinds": "c"},
            "algorithm": "approx-nd",
            "grid": {"k": [2, 4], "epsilon": [0.1, 0.3, 0.5], "seed": [0, 1]},
        },
        {
            "generator": {"prototype": "path:8", "sizes": "2", "kinds": "i"},
            "algorithm": "recursive",
            "grid": {"k": [1, 2], "base_blobs": [0, 16], "seed": [0]},
        },
    ]
}

GENERATOR_KEYS = ("prototype", "sizes", "kinds", "weights", "colors", "problem")
OPTION_KEYS = ("epsilon", "threshold_alpha", "trials", "max_oracle_size", "base_blobs")


def run_bench(config: dict[str, Any]) -> list[dict[str, Any]]:
    """One CSV row per grid point; a failing row records its error and the run continues."""
    out = []
    for index, row in enumerate(config.get("rows", [])):
        generator = dict(row.get("generator", {}))
        algorithm = row.get("algorithm", "exact-nd")
        grid = row.get("grid", {})
        keys = sorted(grid)
        for values in itertools.product(*(grid[key] for key in keys)):
            point = dict(zip(keys, values))
            record: dict[str, Any] = {"row": index, "algorithm": algorithm, **generator, **point}
            try:
                gen_args = {key: generator[key] for key in GENERATOR_KEYS if key in generator}
                for key in GENERATOR_KEYS:
                    if key in point:
                        gen_args[key] = point[key]
                if algorithm in EM_ALGORITHMS:
                    gen_args["problem"] = "em"
                inst = generate_instance(k=point.get("k", 1), seed=point.get("seed", 0), **gen_args)
                opts = SolveOptions(
                    seed=point.get("seed", 0), **{key: point[key] for key in OPTION_KEYS if key in point}
                )
                report = solve_instance(inst, algorithm, opts)
                record.update(
                    status=report["status"],
                    value=report.get("objective", report.get("decision")),
                    time_seconds=report["time_seconds"],
                    **report["counters"],
                )
                if "closed_form_tuples" in report["counters"]:
                    record["count_matches"] = (
                        report["counters"]["tuples_visited"] == report["counters"]["closed_form_tuples"]
                    )
            except (UsageError, InstanceError, GraphError, InputTooLarge, ValueError) as exc:
                record.update(status="error", error=str(exc))
            out.append(record)
    return out


def bench_csv(rows: list[dict[str, Any]]) -> str:
    columns: list[str] = []
    for row in rows:
        columns.extend(c for c in row if c not in columns)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# --- argparse plumbing ---


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="topkmatch", description="Top-k and exact perfect matching solvers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance file and print a JSON report")
    p.add_argument("instance", help="instance file, or - for stdin")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="exact-nd")
    p.add_argument("-k", type=int, default=None, help="override k from the problem line")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--threshold-alpha", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--max-oracle-size", type=int, default=MAX_ORACLE_VERTICES)
    p.add_argument("--base-blobs", type=int, default=DEFAULT_BASE_BLOBS)
    p.add_argument("--output", default=None)

    g = sub.add_parser("generate", help="write a seeded blow-up instance")
    g.add_argument("--prototype", default="path:4", help="path:N, cycle:N, complete:N, random:N:d, banded:N:phi:d")
    g.add_argument("--sizes", default="2", help="2, 1,2,3 or random:lo:hi")
    g.add_argument("--kinds", default="i", help="c, i, mixed or a pattern such as cii")
    g.add_argument("--weights", default="uniform:100", help="const:W or uniform:W")
    g.add_argument("--colors", default="none", help="none, r, b or random:p")
    g.add_argument("--problem", choices=("tkpm", "em"), default="tkpm")
    g.add_argument("-k", type=int, default=1)
    g.add_argument("--epsilon", type=float, default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", default=None)

    b = sub.add_parser("bench", help="run a parameter grid and write CSV")
    b.add_argument("config", nargs="?", default=None, help="JSON config; a small built-in grid if omitted")
    b.add_argument("--output", default=None)

    v = sub.add_parser("validate", help="re-check a solve report against its instance")
    v.add_argument("instance")
    v.add_argument("report", help="JSON report written by solve")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            inst = parse_instance(_read_text(args.instance))
            options = SolveOptions(
                epsilon=args.epsilon,
                threshold_alpha=args.threshold_alpha,
                seed=args.seed,
                trials=args.trials,
                max_oracle_size=args.max_oracle_size,
                base_blobs=args.base_blobs,
                k=args.k,
            )
            report = solve_instance(inst, args.algorithm, options)
            report["instance"] = args.instance
            _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.output)
            return EXIT_SOLVED if report["status"] == "solved" else EXIT_INFEASIBLE
        if args.command == "generate":
            inst = generate_instance(
                args.prototype,
                sizes=args.sizes,
                kinds=args.kinds,
                weights=args.weights,
                colors=args.colors,
                seed=args.seed,
                k=args.k,
                problem=args.problem,
                epsilon=args.epsilon,
            )
            _emit(write_instance(inst), args.output)
            return EXIT_SOLVED
        if args.command == "bench":
            config = json.loads(_read_text(args.config)) if args.config else DEFAULT_BENCH
            _emit(bench_csv(run_bench(config)), args.output)
            return EXIT_SOLVED
        inst = parse_instance(_read_text(args.instance))
        report = json.loads(_read_text(args.report))
        problems = validate_report(inst, report)
        for line in problems:
            print(line, file=sys.stderr)
        if not problems:
            print("ok")
        return EXIT_SOLVED if not problems else EXIT_INFEASIBLE
    except (InstanceError, UsageError, GraphError, InputTooLarge, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


__all__ = ["ALGORITHMS", "SolveOptions", "UsageError", "main", "run_bench", "solve_instance", "validate_report"]
