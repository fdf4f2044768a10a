"""Line-based instance files and seeded instance generators.

Format (one record per line, ``#`` lines holding ``key=value`` are metadata)::

    # seed=0
    p tkpm <2n> <m> <k> [epsilon]
    e <u> <v> <w> [r|b]
    c <vertex> <blob>
    blob <id> <size> <c|i>
    band <i> <j>
    order <blob ids...>

``write_instance`` emits records in exactly that order, so
``write(parse(write(parse(text)))) == write(parse(text))``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .graph import Color, GraphError, WeightedColoredGraph
from .prototype import (
    Blob,
    Prototype,
    RandomColors,
    UniformWeights,
    blow_up,
    complete_prototype,
    consecutive_blob_of,
    cycle_prototype,
    path_prototype,
    random_banded_prototype,
    random_prototype,
)

PROBLEMS = ("tkpm", "em")


class InstanceError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class InstanceFile:
    problem: str
    vertex_count: int
    k: int
    edges: list[tuple[int, int, int, Color]]
    epsilon: float | None = None
    blob_of: list[int] | None = None
    prototype: Prototype | None = None
    metadata: dict[str, str] = field(default_factory=dict)

    def graph(self) -> WeightedColoredGraph:
        return WeightedColoredGraph(self.vertex_count, self.edges)

    def membership(self) -> tuple[int, ...] | None:
        """Blob of each vertex: explicit class lines, else consecutive blow-up numbering."""
        if self.blob_of is not None:
            return tuple(self.blob_of)
        if self.prototype is not None:
            return consecutive_blob_of(self.prototype)
        return None


def _ints(tokens: Sequence[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise InstanceError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def parse_instance(text: str) -> InstanceFile:
    header = None
    edges: list[tuple[int, int, int, Color]] = []
    classes: dict[int, int] = {}
    blobs: dict[int, Blob] = {}
    bands: list[tuple[int, int]] = []
    order: list[int] | None = None
    metadata: dict[str, str] = {}
    seen_pairs: set[tuple[int, int]] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                metadata[key.strip()] = value.strip()
            continue
        tok = line.split()
        tag = tok[0]
        if tag == "p":
            if header is not None:
                raise InstanceError("second problem line", lineno)
            if len(tok) not in (5, 6) or tok[1] not in PROBLEMS:
                raise InstanceError("expected 'p <tkpm|em> <2n> <m> <k> [epsilon]'", lineno)
            nv, m, k = _ints(tok[2:5], lineno)
            eps = None
            if len(tok) == 6:
                try:
                    eps = float(tok[5])
                except ValueError:
                    raise InstanceError(f"bad epsilon {tok[5]!r}", lineno) from None
            if nv < 0 or m < 0 or k < 0:
                raise InstanceError("negative count in problem line", lineno)
            header = (tok[1], nv, m, k, eps)
        elif tag == "e":
            if header is None:
                raise InstanceError("edge before problem line", lineno)
            if len(tok) not in (4, 5):
                raise InstanceError("expected 'e <u> <v> <w> [r|b]'", lineno)
            u, v, w = _ints(tok[1:4], lineno)
            color = Color.NONE
            if len(tok) == 5:
                if tok[4] not in ("r", "b"):
                    raise InstanceError(f"bad color {tok[4]!r}", lineno)
                color = Color(tok[4])
            if u == v:
                raise InstanceError(f"self-loop at {u}", lineno)
            if not (0 <= u < header[1] and 0 <= v < header[1]):
                raise InstanceError(f"vertex out of range in edge ({u}, {v})", lineno)
            if w < 0:
                raise InstanceError("negative weight", lineno)
            pair = (min(u, v), max(u, v))
            if pair in seen_pairs:
                raise InstanceError(f"duplicate edge {pair}", lineno)
            seen_pairs.add(pair)
            edges.append((u, v, w, color))
        elif tag == "c":
            if len(tok) != 3:
                raise InstanceError("expected 'c <vertex> <blob>'", lineno)
            v, b = _ints(tok[1:], lineno)
            if v in classes:
                raise InstanceError(f"vertex {v} assigned twice", lineno)
            classes[v] = b
        elif tag == "blob":
            if len(tok) != 4 or tok[3] not in ("c", "i"):
                raise InstanceError("expected 'blob <id> <size> <c|i>'", lineno)
            bid, size = _ints(tok[1:3], lineno)
            if bid in blobs:
                raise InstanceError(f"blob {bid} declared twice", lineno)
            try:
                blobs[bid] = Blob(size, tok[3])
            except ValueError as exc:
                raise InstanceError(str(exc), lineno) from None
        elif tag == "band":
            if len(tok) != 3:
                raise InstanceError("expected 'band <i> <j>'", lineno)
            i, j = _ints(tok[1:], lineno)
            bands.append((i, j))
        elif tag == "order":
            if order is not None:
                raise InstanceError("second order line", lineno)
            order = _ints(tok[1:], lineno)
        else:
            raise InstanceError(f"unknown record {tag!r}", lineno)

    if header is None:
        raise InstanceError("missing problem line")
    problem, nv, m, k, eps = header
    if len(edges) != m:
        raise InstanceError(f"problem line announces {m} edges, found {len(edges)}")

    proto = None
    if blobs:
        if sorted(blobs) != list(range(len(blobs))):
            raise InstanceError("blob ids must be 0..B-1")
        try:
            proto = Prototype(
                tuple(blobs[i] for i in range(len(blobs))),
                tuple(bands),
                tuple(order) if order is not None else None,
            )
        except ValueError as exc:
            raise InstanceError(f"bad prototype: {exc}") from None
    elif bands or order is not None:
        raise InstanceError("band/order records need blob records")

    blob_of = None
    if classes:
        if sorted(classes) != list(range(nv)):
            raise InstanceError("class lines must cover every vertex exactly once")
        blob_of = [classes[v] for v in range(nv)]
    if proto is not None:
        total = proto.vertex_total
        if total != nv:
            raise InstanceError(f"blob sizes sum to {total}, problem line says {nv}")

    return InstanceFile(problem, nv, k, edges, eps, blob_of, proto, metadata)


def write_instance(inst: InstanceFile) -> str:
    lines = [f"# {key}={value}" for key, value in inst.metadata.items()]
    head = f"p {inst.problem} {inst.vertex_count} {len(inst.edges)} {inst.k}"
    if inst.epsilon is not None:
        head += f" {inst.epsilon!r}"
    lines.append(head)
    for u, v, w, color in inst.edges:
        color = Color(color) if not isinstance(color, Color) else color
        lines.append(f"e {u} {v} {w}" + ("" if color is Color.NONE else f" {color.value}"))
    if inst.blob_of is not None:
        lines.extend(f"c {v} {b}" for v, b in enumerate(inst.blob_of))
    if inst.prototype is not None:
        p = inst.prototype
        lines.extend(f"blob {i} {b.size} {b.kind}" for i, b in enumerate(p.blobs))
        lines.extend(f"band {i} {j}" for i, j in p.bands)
        if p.ordering is not None:
            lines.append("order " + " ".join(str(b) for b in p.ordering))
    return "\n".join(lines) + "\n"


def read_instance(path: str) -> InstanceFile:
    with open(path) as fh:
        return parse_instance(fh.read())


def instance_from_graph(
    graph: WeightedColoredGraph,
    k: int,
    problem: str = "tkpm",
    *,
    epsilon: float | None = None,
    prototype: Prototype | None = None,
    blob_of: Sequence[int] | None = None,
    metadata: dict[str, str] | None = None,
) -> InstanceFile:
    return InstanceFile(
        problem=problem,
        vertex_count=graph.vertex_count,
        k=k,
        edges=[(e.u, e.v, e.w, e.color) for e in graph.edges],
        epsilon=epsilon,
        blob_of=list(blob_of) if blob_of is not None else None,
        prototype=prototype,
        metadata=dict(metadata or {}),
    )


# --- generators ---


def _expand(values: Sequence, count: int) -> list:
    values = list(values)
    return [values[i % len(values)] for i in range(count)]


def parse_sizes(spec: str | Sequence[int], count: int, rng: random.Random) -> list[int]:
    """``"2"``, ``"1,2,3"`` (cycled) or ``"random:lo:hi"``."""
    if not isinstance(spec, str):
        return _expand([int(s) for s in spec], count)
    if spec.startswith("random:"):
        _, lo, hi = spec.split(":")
        return [rng.randint(int(lo), int(hi)) for _ in range(count)]
    return _expand([int(s) for s in spec.split(",")], count)


def parse_kinds(spec: str, count: int, rng: random.Random) -> list[str]:
    """``"c"``, ``"i"``, ``"mixed"`` (random per blob) or a pattern like ``"cii"``."""
    if spec == "mixed":
        return [rng.choice("ci") for _ in range(count)]
    if not spec or any(ch not in "ci" for ch in spec):
        raise ValueError(f"bad blob kinds {spec!r}")
    return _expand(list(spec), count)


def build_prototype(spec: str, sizes: list[int], kinds: list[str], rng: random.Random) -> Prototype:
    """``path:N``, ``cycle:N``, ``complete:N``, ``random:N:density``, ``banded:N:phi:density``."""
    parts = spec.split(":")
    name = parts[0]
    try:
        if name == "path":
            return path_prototype(sizes, kinds)
        if name == "cycle":
            return cycle_prototype(sizes, kinds)
        if name == "complete":
            return complete_prototype(sizes, kinds)
        if name == "random":
            return random_prototype(rng, len(sizes), float(parts[2]), sizes, kinds)
        if name == "banded":
            return random_banded_prototype(rng, len(sizes), int(parts[2]), float(parts[3]), sizes, kinds)
    except (IndexError, ValueError) as exc:
        raise ValueError(f"bad prototype spec {spec!r}: {exc}") from None
    raise ValueError(f"unknown prototype family {name!r}")


def prototype_blob_count(spec: str) -> int:
    parts = spec.split(":")
    if len(parts) < 2:
        raise ValueError(f"prototype spec {spec!r} needs a blob count")
    count = int(parts[1])
    if count < 1:
        raise ValueError("prototype needs at least one blob")
    return count


def parse_weight_rule(spec: str):
    kind, _, arg = spec.partition(":")
    if kind == "const":
        return int(arg)
    if kind == "uniform":
        return UniformWeights(int(arg))
    raise ValueError(f"bad weight rule {spec!r}")


def parse_color_rule(spec: str):
    if spec == "none":
        return None
    if spec in ("r", "b"):
        return spec
    kind, _, arg = spec.partition(":")
    if kind == "random":
        return RandomColors(float(arg) if arg else 0.5)
    raise ValueError(f"bad color rule {spec!r}")


def generate_instance(
    prototype: str,
    sizes: str | Sequence[int] = "2",
    kinds: str = "i",
    weights: str = "uniform:100",
    colors: str = "none",
    seed: int = 0,
    k: int = 1,
    problem: str = "tkpm",
    epsilon: float | None = None,
) -> InstanceFile:
    """Seeded blow-up instance; identical arguments give an identical file."""
    if problem not in PROBLEMS:
        raise ValueError(f"problem must be one of {PROBLEMS}")
    if problem == "em" and colors == "none":
        colors = "random:0.5"
    rng = random.Random(seed)
    count = prototype_blob_count(prototype)
    size_list = parse_sizes(sizes, count, rng)
    if sum(size_list) % 2:
        # an odd vertex total has no perfect matching; grow the last blob
        size_list[-1] += 1
    kind_list = parse_kinds(kinds, count, rng)
    proto = build_prototype(prototype, size_list, kind_list, rng)
    graph, _ = blow_up(proto, parse_weight_rule(weights), parse_color_rule(colors), seed=seed)
    size_text = sizes if isinstance(sizes, str) else ",".join(str(s) for s in sizes)
    meta = {
        "generator": prototype,
        "sizes": size_text,
        "kinds": kinds,
        "weights": weights,
        "colors": colors,
        "seed": str(seed),
    }
    return instance_from_graph(
        graph, k, problem, epsilon=epsilon, prototype=proto, metadata=meta
    )


__all__ = [
    "GraphError",
    "InstanceError",
    "InstanceFile",
    "generate_instance",
    "instance_from_graph",
    "parse_instance",
    "read_instance",
    "write_instance",
]
