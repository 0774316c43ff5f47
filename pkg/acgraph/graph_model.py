"""Geometric graph value type, validity checks, crossing scans and JSON persistence."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from .errors import GraphFormatError, InvalidGraphError
from .exact_geom import (
    Point,
    Segment,
    SegmentRelation,
    cos2_between,
    cross2,
    cross3,
    dot,
    integer_scaled,
    segment_relation,
    sub,
)
from .utils import rational_str, stable_json, to_rational

Edge = Tuple[int, int]


@dataclass(frozen=True)
class GeometricGraph:
    dim: int
    vertices: Tuple[Point, ...]
    edges: Tuple[Edge, ...]
    plane_normal: Optional[Tuple[Fraction, Fraction, Fraction]] = None
    plane_offset: Fraction = Fraction(0)
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def is_coplanar(self) -> bool:
        return self.dim == 2 or self.plane_normal is not None

    def segment(self, edge_index: int) -> Segment:
        i, j = self.edges[edge_index]
        return Segment(self.vertices[i], self.vertices[j])

    @cached_property
    def scaled_points(self) -> List[tuple]:
        """Vertex coordinates multiplied by their common denominator (plain ints)."""
        return integer_scaled(self.vertices)[1]

    @cached_property
    def planar_points(self) -> List[tuple]:
        """Integer 2D coordinates with the same combinatorics as the drawing.

        Coplanar 3D graphs drop the coordinate where the plane normal is largest; that map
        is an affine bijection of the plane, so crossings, incidences and overlaps are kept.
        Spatial 3D graphs have no such chart and return the 3D coordinates.
        """
        if self.dim == 2 or self.plane_normal is None:
            return self.scaled_points
        drop = max(range(3), key=lambda k: abs(self.plane_normal[k]))
        keep = [k for k in range(3) if k != drop]
        return [(p[keep[0]], p[keep[1]]) for p in self.scaled_points]

    def direction(self, edge_index: int) -> tuple:
        i, j = self.edges[edge_index]
        return sub(self.scaled_points[j], self.scaled_points[i])


@dataclass(frozen=True)
class Violation:
    kind: str
    indices: Tuple[int, ...]
    detail: str = ""

    def as_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "indices": list(self.indices), "detail": self.detail}


@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    crossing_count: int
    min_crossing_cos2: Optional[Fraction] = None

    def as_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "crossingCount": self.crossing_count,
            "minCrossingCos2": rational_str(self.min_crossing_cos2) if self.min_crossing_cos2 is not None else None,
        }


def make_graph(
    vertices: Iterable[Sequence[Any]],
    edges: Iterable[Sequence[int]],
    *,
    dim: int | None = None,
    plane_normal: Sequence[Any] | None = None,
    plane_offset: Any = 0,
    metadata: Mapping[str, Any] | None = None,
) -> GeometricGraph:
    """Normalize coordinates to Fractions and edges to sorted (i, j) pairs.

    Nothing is deduplicated: duplicates stay visible to ``validate``.
    """
    points = tuple(tuple(to_rational(value) for value in row) for row in vertices)
    if dim is None:
        dim = len(points[0]) if points else 2
    pairs = tuple(sorted((min(int(a), int(b)), max(int(a), int(b))) for a, b in edges))
    normal = tuple(to_rational(value) for value in plane_normal) if plane_normal is not None else None
    return GeometricGraph(
        dim=int(dim),
        vertices=points,
        edges=pairs,
        plane_normal=normal,
        plane_offset=to_rational(plane_offset),
        metadata=dict(metadata or {}),
    )


def with_edges(g: GeometricGraph, edges: Iterable[Edge], **metadata: Any) -> GeometricGraph:
    merged = dict(g.metadata)
    merged.update(metadata)
    return replace(g, edges=tuple(sorted(edges)), metadata=merged)


# Validation --------------------------------------------------------------------------


def _on_open_segment(a: Sequence[int], b: Sequence[int], p: Sequence[int]) -> bool:
    d = sub(b, a)
    w = sub(p, a)
    if len(d) == 2:
        if cross2(d, w) != 0:
            return False
    elif any(cross3(d, w)):
        return False
    along = dot(w, d)
    return 0 < along < dot(d, d)


def _relation_3d(a, b, c, d) -> SegmentRelation:
    u = sub(b, a)
    w = sub(d, c)
    normal = cross3(u, w)
    if not any(normal):
        if any(cross3(u, sub(c, a))):
            return SegmentRelation.DISJOINT
        axis = max(range(3), key=lambda k: abs(u[k]))
        lo = max(min(a[axis], b[axis]), min(c[axis], d[axis]))
        hi = min(max(a[axis], b[axis]), max(c[axis], d[axis]))
        if lo < hi:
            return SegmentRelation.OVERLAPPING
        return SegmentRelation.TOUCHING if lo == hi else SegmentRelation.DISJOINT
    if dot(normal, sub(c, a)) != 0:
        return SegmentRelation.DISJOINT
    drop = max(range(3), key=lambda k: abs(normal[k]))
    keep = [k for k in range(3) if k != drop]
    return segment_relation(*((p[keep[0]], p[keep[1]]) for p in (a, b, c, d)))


def _pair_relation(points: List[tuple], e1: Edge, e2: Edge) -> SegmentRelation:
    a, b = points[e1[0]], points[e1[1]]
    c, d = points[e2[0]], points[e2[1]]
    if len(a) == 2:
        return segment_relation(a, b, c, d)
    return _relation_3d(a, b, c, d)


def _structural_violations(g: GeometricGraph) -> List[Violation]:
    violations: List[Violation] = []
    if g.dim not in (2, 3):
        violations.append(Violation("bad-dimension", (), f"dim={g.dim}"))
        return violations
    for index, row in enumerate(g.vertices):
        if len(row) != g.dim:
            violations.append(Violation("bad-dimension", (index,), f"expected {g.dim} coordinates"))
    n = g.n
    seen: Dict[Edge, int] = {}
    for index, (i, j) in enumerate(g.edges):
        if not (0 <= i < n and 0 <= j < n):
            violations.append(Violation("edge-index-out-of-range", (index,), f"edge ({i}, {j}) with n={n}"))
            continue
        if i == j:
            violations.append(Violation("self-loop", (index, i)))
            continue
        if (i, j) in seen:
            violations.append(Violation("duplicate-edge", (seen[(i, j)], index), f"({i}, {j})"))
            continue
        seen[(i, j)] = index
    if g.plane_normal is not None:
        if g.dim != 3 or len(g.plane_normal) != 3 or not any(g.plane_normal):
            violations.append(Violation("bad-plane-normal", (), "plane normal must be a nonzero 3-vector"))
    return violations


def validate(g: GeometricGraph) -> List[Violation]:
    violations = _structural_violations(g)
    if violations:
        return violations

    first_at: Dict[tuple, int] = {}
    for index, p in enumerate(g.vertices):
        if p in first_at:
            violations.append(Violation("duplicate-point", (first_at[p], index)))
        else:
            first_at[p] = index

    if g.plane_normal is not None:
        for index, p in enumerate(g.vertices):
            if dot(g.plane_normal, p) != g.plane_offset:
                violations.append(Violation("off-plane", (index,), "vertex does not satisfy the plane equation"))
    if violations:
        return violations

    points = g.planar_points
    order = sorted(range(g.n), key=lambda index: points[index])
    xs = [points[index][0] for index in order]
    for edge_index, (i, j) in enumerate(g.edges):
        a, b = points[i], points[j]
        lo = bisect_left(xs, min(a[0], b[0]))
        hi = bisect_right(xs, max(a[0], b[0]))
        for vertex in order[lo:hi]:
            if vertex not in (i, j) and _on_open_segment(a, b, points[vertex]):
                violations.append(Violation("vertex-on-edge", (vertex, edge_index), "vertex in the open interior of an edge"))

    for e1, e2 in _candidate_pairs(g):
        if _pair_relation(points, g.edges[e1], g.edges[e2]) is SegmentRelation.OVERLAPPING:
            violations.append(Violation("edge-overlap", (e1, e2), "edges overlap in a segment of positive length"))
    return violations


def ensure_valid(g: GeometricGraph) -> None:
    violations = validate(g)
    if violations:
        first = violations[0]
        raise InvalidGraphError(
            f"invalid graph: {len(violations)} violation(s), first {first.kind} at {list(first.indices)}",
            violations,
        )


# Crossing scans ----------------------------------------------------------------------


def _candidate_pairs(g: GeometricGraph) -> Iterable[Edge]:
    """Edge pairs whose x-extents intersect, found by sorting on the left end."""
    points = g.planar_points
    spans = []
    for index, (i, j) in enumerate(g.edges):
        x1, x2 = points[i][0], points[j][0]
        spans.append((min(x1, x2), max(x1, x2), index))
    spans.sort()
    for position, (_, right, e1) in enumerate(spans):
        for left2, _, e2 in spans[position + 1:]:
            if left2 > right:
                break
            yield (e1, e2) if e1 < e2 else (e2, e1)


def crossing_pairs(g: GeometricGraph) -> List[Edge]:
    points = g.planar_points
    found = [
        pair
        for pair in _candidate_pairs(g)
        if _pair_relation(points, g.edges[pair[0]], g.edges[pair[1]]) is SegmentRelation.CROSSING
    ]
    found.sort()
    return found


def crossing_pairs_bruteforce(g: GeometricGraph) -> List[Edge]:
    points = g.planar_points
    found: List[Edge] = []
    for e1 in range(g.m):
        for e2 in range(e1 + 1, g.m):
            if _pair_relation(points, g.edges[e1], g.edges[e2]) is SegmentRelation.CROSSING:
                found.append((e1, e2))
    return found


def crossing_cos2(g: GeometricGraph, pair: Edge) -> Fraction:
    return cos2_between(g.direction(pair[0]), g.direction(pair[1]))


def stats(g: GeometricGraph) -> GraphStats:
    ensure_valid(g)
    pairs = crossing_pairs(g)
    sharpest = max((crossing_cos2(g, pair) for pair in pairs), default=None)
    return GraphStats(n=g.n, m=g.m, crossing_count=len(pairs), min_crossing_cos2=sharpest)


def is_connected(g: GeometricGraph) -> bool:
    if g.n == 0:
        return False
    graph = nx.Graph()
    graph.add_nodes_from(range(g.n))
    graph.add_edges_from(g.edges)
    return nx.is_connected(graph)


# Persistence -------------------------------------------------------------------------


def graph_to_dict(g: GeometricGraph) -> Dict[str, Any]:
    payload: Dict[str, Any] = {
        "dim": g.dim,
        "vertices": [[rational_str(value) for value in row] for row in g.vertices],
        "edges": [[i, j] for i, j in g.edges],
        "metadata": dict(g.metadata),
    }
    if g.plane_normal is not None:
        payload["plane_normal"] = [rational_str(value) for value in g.plane_normal]
        if g.plane_offset:
            payload["plane_offset"] = rational_str(g.plane_offset)
    return payload


def _coordinate(value: Any, field_path: str) -> Fraction:
    if isinstance(value, float):
        raise GraphFormatError("floating point coordinates are not accepted; use \"p/q\" strings", field=field_path)
    try:
        return to_rational(value)
    except ValueError as error:
        raise GraphFormatError(str(error), field=field_path) from error


def graph_from_dict(payload: Any) -> GeometricGraph:
    if not isinstance(payload, dict):
        raise GraphFormatError("top-level value must be an object")
    dim = payload.get("dim")
    if dim not in (2, 3) or isinstance(dim, bool):
        raise GraphFormatError("dim must be 2 or 3", field="dim")

    raw_vertices = payload.get("vertices")
    if not isinstance(raw_vertices, list):
        raise GraphFormatError("vertices must be a list", field="vertices")
    vertices = []
    for index, row in enumerate(raw_vertices):
        if not isinstance(row, list) or len(row) != dim:
            raise GraphFormatError(f"vertex must have {dim} coordinates", field=f"vertices[{index}]")
        vertices.append(tuple(_coordinate(value, f"vertices[{index}][{k}]") for k, value in enumerate(row)))

    raw_edges = payload.get("edges")
    if not isinstance(raw_edges, list):
        raise GraphFormatError("edges must be a list", field="edges")
    edges = []
    for index, pair in enumerate(raw_edges):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(value, int) and not isinstance(value, bool) for value in pair)
        ):
            raise GraphFormatError("edge must be a pair of vertex indices", field=f"edges[{index}]")
        for value in pair:
            if not 0 <= value < len(vertices):
                raise GraphFormatError(
                    f"edge index {value} out of range for {len(vertices)} vertices", field=f"edges[{index}]"
                )
        edges.append((pair[0], pair[1]))

    normal = None
    if payload.get("plane_normal") is not None:
        raw_normal = payload["plane_normal"]
        if dim != 3 or not isinstance(raw_normal, list) or len(raw_normal) != 3:
            raise GraphFormatError("plane_normal must be three rationals on a 3D graph", field="plane_normal")
        normal = tuple(_coordinate(value, f"plane_normal[{k}]") for k, value in enumerate(raw_normal))
    offset = _coordinate(payload.get("plane_offset", 0), "plane_offset")

    metadata = payload.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise GraphFormatError("metadata must be an object", field="metadata")
    return make_graph(vertices, edges, dim=dim, plane_normal=normal, plane_offset=offset, metadata=metadata)


def loads(text: str) -> GeometricGraph:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as error:
        raise GraphFormatError(error.msg, line=error.lineno) from error
    return graph_from_dict(payload)


def dumps(g: GeometricGraph) -> str:
    return stable_json(graph_to_dict(g))


def load(path: Path | str) -> GeometricGraph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as error:
        raise GraphFormatError(f"cannot read {path}: {error.strerror or error}") from error
    return loads(text)


def load_with_report(path: Path | str) -> Tuple[GeometricGraph, List[Violation]]:
    g = load(path)
    return g, validate(g)


def save(g: GeometricGraph, path: Path | str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(dumps(g), encoding="utf-8")
