"""Planarization G′, half-edge mesh, facial walks and the plane flattening step."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import MeshError, PrecisionError
from .exact_geom import (
    Point2,
    compare_full_angle,
    cross3,
    dot,
    line_intersection,
    rational_sqrt_floor,
    segment_parameter,
    Segment,
)
from .graph_model import Edge, GeometricGraph, GraphStats, crossing_pairs, ensure_valid, make_graph, stats, validate
from .settings import load_settings
from .utils import append_run_log, rational_str

SHAPE_NAMES = {1: "monogon", 2: "digon", 3: "triangle", 4: "quadrilateral", 5: "pentagon", 6: "hexagon"}


@dataclass(frozen=True)
class Arc:
    u: int
    v: int
    edge: int


@dataclass(frozen=True)
class Planarization:
    source: GeometricGraph
    nodes: Tuple[Point2, ...]
    vertex_of_node: Tuple[Optional[int], ...]
    arcs: Tuple[Arc, ...]
    crossings: Tuple[Edge, ...] = field(default_factory=tuple)

    def is_original(self, node: int) -> bool:
        return self.vertex_of_node[node] is not None

    def kind(self, node: int) -> str:
        return "original" if self.is_original(node) else "crossing"

    @property
    def crossing_nodes(self) -> List[int]:
        return [node for node in range(len(self.nodes)) if not self.is_original(node)]

    def degrees(self) -> List[int]:
        degree = [0] * len(self.nodes)
        for arc in self.arcs:
            degree[arc.u] += 1
            degree[arc.v] += 1
        return degree

    @property
    def multi_crossing_nodes(self) -> List[int]:
        """Crossing nodes where three or more edges meet."""
        degree = self.degrees()
        return [node for node in self.crossing_nodes if degree[node] > 4]

    def is_connected(self) -> bool:
        if not self.nodes:
            return False
        graph = nx.Graph()
        graph.add_nodes_from(range(len(self.nodes)))
        graph.add_edges_from((arc.u, arc.v) for arc in self.arcs)
        return nx.is_connected(graph)

    def arc_segment(self, arc_index: int) -> Segment:
        arc = self.arcs[arc_index]
        return Segment(self.nodes[arc.u], self.nodes[arc.v])


def planarize(g: GeometricGraph) -> Planarization:
    if g.dim != 2:
        raise MeshError("planarize expects a 2D graph; flatten coplanar input with flatten_to_2d first")
    ensure_valid(g)
    pairs = crossing_pairs(g)
    along: List[List[Point2]] = [[] for _ in range(g.m)]
    for e1, e2 in pairs:
        a, b = g.vertices[g.edges[e1][0]], g.vertices[g.edges[e1][1]]
        c, d = g.vertices[g.edges[e2][0]], g.vertices[g.edges[e2][1]]
        point = line_intersection(a, b, c, d)
        along[e1].append(point)
        along[e2].append(point)

    labels: Dict[Point2, Optional[int]] = {}
    for index, p in enumerate(g.vertices):
        labels[p] = index
    for points in along:
        for p in points:
            labels.setdefault(p, None)
    nodes = sorted(labels)
    node_index = {p: index for index, p in enumerate(nodes)}

    arcs: List[Arc] = []
    for edge_index, (i, j) in enumerate(g.edges):
        segment = g.segment(edge_index)
        interior = sorted(set(along[edge_index]), key=lambda p: segment_parameter(segment, p))
        chain = [g.vertices[i], *interior, g.vertices[j]]
        for p, q in zip(chain, chain[1:]):
            arcs.append(Arc(node_index[p], node_index[q], edge_index))
    return Planarization(
        source=g,
        nodes=tuple(nodes),
        vertex_of_node=tuple(labels[p] for p in nodes),
        arcs=tuple(arcs),
        crossings=tuple(pairs),
    )


@dataclass(frozen=True)
class HalfEdgeMesh:
    """Half-edges 2a and 2a+1 run along arc a in and against its direction.

    ``next`` walks each face with the face on the left.
    """

    planarization: Planarization
    origin: Tuple[int, ...]
    next: Tuple[int, ...]
    face_of: Tuple[int, ...]
    faces: Tuple[int, ...]
    outer_face: int
    outgoing: Tuple[Tuple[int, ...], ...]

    @staticmethod
    def twin(h: int) -> int:
        return h ^ 1

    def target(self, h: int) -> int:
        return self.origin[h ^ 1]

    @staticmethod
    def arc_of(h: int) -> int:
        return h >> 1

    @property
    def half_edge_count(self) -> int:
        return len(self.origin)

    def face_walk(self, face: int) -> List[int]:
        start = self.faces[face]
        if start < 0:
            return []
        walk = [start]
        h = self.next[start]
        while h != start:
            walk.append(h)
            h = self.next[h]
        return walk

    def vector(self, h: int) -> Tuple[Fraction, Fraction]:
        nodes = self.planarization.nodes
        a = nodes[self.origin[h]]
        b = nodes[self.target(h)]
        return (b[0] - a[0], b[1] - a[1])


def build_mesh(p: Planarization, allow_disconnected: bool = False) -> HalfEdgeMesh:
    if not p.nodes:
        raise MeshError("empty planarization")
    if not allow_disconnected and not p.is_connected():
        raise MeshError("planarization is disconnected; facial walks would not describe a single plane graph")
    origin: List[int] = []
    for arc in p.arcs:
        origin.extend((arc.u, arc.v))
    count = len(origin)
    nodes = p.nodes

    def vector(h: int) -> Tuple[Fraction, Fraction]:
        a = nodes[origin[h]]
        b = nodes[origin[h ^ 1]]
        return (b[0] - a[0], b[1] - a[1])

    around: List[List[int]] = [[] for _ in nodes]
    for h in range(count):
        around[origin[h]].append(h)
    for node, half_edges in enumerate(around):
        half_edges.sort(key=cmp_to_key(lambda h1, h2: compare_full_angle(vector(h1), vector(h2))))
    position = [0] * count
    for half_edges in around:
        for index, h in enumerate(half_edges):
            position[h] = index

    following = [0] * count
    for h in range(count):
        twin = h ^ 1
        ring = around[origin[twin]]
        following[h] = ring[(position[twin] - 1) % len(ring)]

    face_of = [-1] * count
    faces: List[int] = []
    for h in range(count):
        if face_of[h] >= 0:
            continue
        face = len(faces)
        faces.append(h)
        current = h
        while face_of[current] < 0:
            face_of[current] = face
            current = following[current]
    if not faces:
        faces.append(-1)
        outer = 0
    else:
        # isolated nodes have no ring to read the outer face from
        top = max(
            (node for node, ring in enumerate(around) if ring),
            key=lambda node: (nodes[node][1], nodes[node][0]),
        )
        outer = face_of[around[top][-1]]
    return HalfEdgeMesh(
        planarization=p,
        origin=tuple(origin),
        next=tuple(following),
        face_of=tuple(face_of),
        faces=tuple(faces),
        outer_face=outer,
        outgoing=tuple(tuple(ring) for ring in around),
    )


def shape_label(walk_length: int, original_steps: int) -> str:
    name = SHAPE_NAMES.get(walk_length, f"{walk_length}-gon")
    return f"{original_steps}-{name}"


@dataclass(frozen=True)
class FaceMetrics:
    face: int
    walk_length: int
    original_steps: int
    is_outer: bool
    shape_label: str

    def as_dict(self) -> Dict[str, Any]:
        return {
            "face": self.face,
            "len": self.walk_length,
            "v": self.original_steps,
            "outer": self.is_outer,
            "shape": self.shape_label,
        }


def face_metrics(mesh: HalfEdgeMesh) -> List[FaceMetrics]:
    p = mesh.planarization
    metrics = []
    for face in range(len(mesh.faces)):
        walk = mesh.face_walk(face)
        original = sum(1 for h in walk if p.is_original(mesh.origin[h]))
        metrics.append(FaceMetrics(face, len(walk), original, face == mesh.outer_face, shape_label(len(walk), original)))
    return metrics


@dataclass(frozen=True)
class EulerReport:
    vertices: int
    edges: int
    faces: int
    walk_sum: int

    @property
    def characteristic(self) -> int:
        return self.vertices - self.edges + self.faces

    @property
    def passed(self) -> bool:
        return self.characteristic == 2 and self.walk_sum == 2 * self.edges

    def as_dict(self) -> Dict[str, Any]:
        return {
            "vertices": self.vertices,
            "edges": self.edges,
            "faces": self.faces,
            "characteristic": self.characteristic,
            "walkSum": self.walk_sum,
            "passed": self.passed,
        }


def euler_check(mesh: HalfEdgeMesh) -> EulerReport:
    p = mesh.planarization
    walk_sum = sum(len(mesh.face_walk(face)) for face in range(len(mesh.faces)))
    return EulerReport(len(p.nodes), len(p.arcs), len(mesh.faces), walk_sum)


def planarization_report(p: Planarization, mesh: HalfEdgeMesh, metrics: Sequence[FaceMetrics]) -> Dict[str, Any]:
    degree = p.degrees()
    return {
        "nodes": len(p.nodes),
        "originalNodes": len(p.nodes) - len(p.crossing_nodes),
        "crossingNodes": len(p.crossing_nodes),
        "multiCrossingNodes": p.multi_crossing_nodes,
        "maxCrossingDegree": max((degree[node] for node in p.crossing_nodes), default=0),
        "arcs": len(p.arcs),
        "faces": [item.as_dict() for item in metrics],
        "outerFace": mesh.outer_face,
        "euler": euler_check(mesh).as_dict(),
    }


# Flattening --------------------------------------------------------------------------


@dataclass(frozen=True)
class FlattenReport:
    graph: GeometricGraph
    basis_error: Fraction
    snap_step: Fraction
    stats: GraphStats

    def as_dict(self) -> Dict[str, Any]:
        return {
            "basisError": rational_str(self.basis_error),
            "snapStep": rational_str(self.snap_step),
            "stats": self.stats.as_dict(),
        }


def _snap(value: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(round(value * scale), scale)


def flatten_to_2d(g: GeometricGraph, bits: int | None = None) -> FlattenReport:
    """Map a coplanar 3D graph into the plane through a near-orthonormal rational basis.

    The snapped output is validated and measured on its own; the basis error only
    describes how far the map is from an isometry.
    """
    bits = load_settings().bits if bits is None else int(bits)
    if g.dim == 2:
        return FlattenReport(g, Fraction(0), Fraction(0), stats(g))
    if g.plane_normal is None:
        raise MeshError("flatten_to_2d needs a plane normal on 3D input")
    normal = g.plane_normal
    metadata = dict(g.metadata)
    metadata["flattenBits"] = bits
    if normal[0] == 0 and normal[1] == 0:
        vertices = [(p[0], p[1]) for p in g.vertices]
        flat = make_graph(vertices, g.edges, dim=2, metadata=metadata)
        basis_error = Fraction(0)
        step = Fraction(0)
    else:
        axis = min(range(3), key=lambda k: abs(normal[k]))
        unit = tuple(Fraction(int(k == axis)) for k in range(3))
        e1 = cross3(normal, unit)
        e2 = cross3(normal, e1)
        precision = bits + 8
        length1 = rational_sqrt_floor(Fraction(dot(e1, e1)), precision)
        length2 = rational_sqrt_floor(Fraction(dot(e2, e2)), precision)
        u1 = tuple(value / length1 for value in e1)
        u2 = tuple(value / length2 for value in e2)
        basis_error = max(abs(1 - dot(u1, u1)), abs(1 - dot(u2, u2)))
        step = Fraction(1, 1 << bits)
        vertices = [(_snap(dot(p, u1), bits), _snap(dot(p, u2), bits)) for p in g.vertices]
        flat = make_graph(vertices, g.edges, dim=2, metadata=metadata)
    violations = validate(flat)
    if violations:
        first = violations[0]
        raise PrecisionError(
            f"flattening at {bits} bits produced {first.kind} at {list(first.indices)}; raise the precision"
        )
    append_run_log("flatten_to_2d", bits=bits, basisError=f"{float(basis_error):.3e}")
    return FlattenReport(flat, basis_error, step, stats(flat))
