"""Lower-bound constructions: grid graphs, stacked grids, lattice and frame line families,
the 3D line-plane builder and the certified projection to a plane."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .errors import ConstructionError, GeometryError, InvalidGraphError, PrecisionError, ProjectionError
from .exact_geom import (
    AngleSpec,
    CosThreshold,
    Point2,
    Vector2,
    canonical_direction,
    compare_angles,
    cross2,
    crossing_angle_at_least,
    dot,
    interval_bounds,
    interval_context,
    iv_rational,
    rational_cos_bound,
    rational_sqrt_floor,
    sub,
)
from .graph_model import GeometricGraph, make_graph, validate
from .settings import load_settings
from .utils import append_run_log, rational_str
from .verify import ACCertificate, is_alpha_ac


# Grid graphs -------------------------------------------------------------------------


def grid_edges(rows: int, cols: int) -> List[Tuple[Tuple[int, int], Tuple[int, int]]]:
    """Adjacency rule (a,b)-(a,b+1), (a,b)-(a+1,b+1), (a,b)-(a+1,b+2), clipped to the grid."""
    edges = []
    for a in range(rows):
        for b in range(cols):
            if b + 1 < cols:
                edges.append(((a, b), (a, b + 1)))
            if a + 1 < rows and b + 1 < cols:
                edges.append(((a, b), (a + 1, b + 1)))
            if a + 1 < rows and b + 2 < cols:
                edges.append(((a, b), (a + 1, b + 2)))
    return edges


def grid_edge_count(rows: int, cols: int) -> int:
    if rows < 1 or cols < 1:
        return 0
    return rows * (cols - 1) + (rows - 1) * (cols - 1) + (rows - 1) * max(cols - 2, 0)


def grid_graph(x: int, y: int) -> GeometricGraph:
    if x < 1 or y < 1:
        raise ConstructionError(f"grid needs x >= 1 and y >= 1, got ({x}, {y})", stage="grid_graph")
    vertices = [(i, j) for i in range(x) for j in range(y)]
    edges = [(p[0] * y + p[1], q[0] * y + q[1]) for p, q in grid_edges(x, y)]
    return make_graph(vertices, edges, dim=2, metadata={"construction": "grid", "x": x, "y": y})


def stacked_grids(r: int) -> GeometricGraph:
    """Grid graphs on the planes x = c and y = c of the r×r×r cube.

    Grid row goes to z and grid column runs along the plane's horizontal axis, so no edge
    is parallel to the z-axis and the two plane families never share an edge.
    """
    if r < 1:
        raise ConstructionError(f"r must be >= 1, got {r}", stage="stacked_grids")

    def index(x: int, y: int, z: int) -> int:
        return (x * r + y) * r + z

    vertices = [(x, y, z) for x in range(r) for y in range(r) for z in range(r)]
    edges = []
    for c in range(r):
        for (a1, b1), (a2, b2) in grid_edges(r, r):
            edges.append((index(c, b1, a1), index(c, b2, a2)))
            edges.append((index(b1, c, a1), index(b2, c, a2)))
    return make_graph(vertices, edges, dim=3, metadata={"construction": "stacked", "r": r})


# Projection --------------------------------------------------------------------------


def projection_normal(gamma: Fraction) -> Tuple[Fraction, Fraction, Fraction]:
    return (gamma, gamma, Fraction(1))


def project_point(p: Sequence[Fraction], normal: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    factor = Fraction(dot(p, normal)) / dot(normal, normal)
    return tuple(Fraction(value) - factor * n for value, n in zip(p, normal))


def project(g3: GeometricGraph, gamma: Fraction) -> GeometricGraph:
    gamma = Fraction(gamma)
    if g3.dim != 3:
        raise ProjectionError("projection expects a 3D graph", kind="dimension")
    if gamma < 0:
        raise ProjectionError(f"gamma must be >= 0, got {rational_str(gamma)}", kind="gamma")
    normal = projection_normal(gamma)
    vertices = [project_point(p, normal) for p in g3.vertices]
    metadata = dict(g3.metadata)
    metadata["gamma"] = rational_str(gamma)
    projected = make_graph(vertices, g3.edges, dim=3, plane_normal=normal, metadata=metadata)
    for violation in validate(projected):
        if violation.kind == "duplicate-point":
            raise ProjectionError(
                f"gamma={rational_str(gamma)} identifies vertices {violation.indices[0]} and {violation.indices[1]}",
                pair=(violation.indices[0], violation.indices[1]),
                kind="duplicate-point",
            )
        raise ProjectionError(
            f"gamma={rational_str(gamma)}: {violation.kind} at {list(violation.indices)}",
            pair=(violation.indices[0], violation.indices[1]) if len(violation.indices) >= 2 else None,
            kind=violation.kind,
        )
    return projected


@dataclass(frozen=True)
class GammaTrial:
    gamma: Fraction
    outcome: str
    detail: str = ""


@dataclass(frozen=True)
class GammaSearch:
    gamma: Fraction
    graph: GeometricGraph
    certificate: ACCertificate
    trials: Tuple[GammaTrial, ...]


def search_gamma(g3: GeometricGraph, target: CosThreshold, max_halvings: int | None = None) -> GammaSearch:
    """Try γ = 1/8, 1/16, ... until the projection passes ``is_alpha_ac`` at ``target``."""
    halvings = load_settings().max_halvings if max_halvings is None else int(max_halvings)
    gamma = Fraction(1, 8)
    trials: List[GammaTrial] = []
    for _ in range(halvings + 1):
        try:
            projected = project(g3, gamma)
        except ProjectionError as error:
            trials.append(GammaTrial(gamma, "projection-error", error.message))
            append_run_log("choose_gamma", error.message, outcome="reject", gamma=gamma)
            gamma /= 2
            continue
        certificate = is_alpha_ac(projected, target, assume_valid=True)
        if certificate.verdict:
            trials.append(GammaTrial(gamma, "pass"))
            return GammaSearch(gamma, projected, certificate, tuple(trials))
        detail = f"witness {list(certificate.witness or ())} cos2={rational_str(certificate.witness_cos2 or 0)}"
        trials.append(GammaTrial(gamma, "angle-violation", detail))
        append_run_log("choose_gamma", detail, outcome="reject", gamma=gamma)
        gamma /= 2
    last = trials[-1] if trials else None
    raise ConstructionError(
        f"no gamma in {len(trials)} trials reaches {target.alpha_label}"
        + (f" (last: {last.outcome} {last.detail})" if last else ""),
        stage="choose_gamma",
    )


def choose_gamma(g3: GeometricGraph, target: CosThreshold, max_halvings: int | None = None) -> Fraction:
    return search_gamma(g3, target, max_halvings).gamma


# Line families -----------------------------------------------------------------------


@dataclass(frozen=True)
class Line2:
    base: Point2
    dir: Vector2

    def __post_init__(self) -> None:
        if canonical_direction(self.dir) != tuple(self.dir):
            raise GeometryError(f"line direction {self.dir} is not canonical")

    @property
    def offset(self) -> Fraction:
        return Fraction(cross2(self.dir, self.base))

    def key(self) -> Tuple[Vector2, Fraction]:
        return (tuple(self.dir), self.offset)

    def contains(self, p: Sequence[Fraction]) -> bool:
        return cross2(self.dir, sub(p, self.base)) == 0

    def position(self, p: Sequence[Fraction]) -> Fraction:
        return Fraction(dot(p, self.dir))


@dataclass(frozen=True)
class CoveredArrangement:
    lines: Tuple[Line2, ...]
    cover_points: Tuple[Point2, ...]
    incidence: Dict[Point2, Tuple[int, ...]]
    t: int
    metadata: Dict[str, Any] = field(default_factory=dict)

    def points_by_line(self) -> List[List[Point2]]:
        grouped: List[List[Point2]] = [[] for _ in self.lines]
        for p in self.cover_points:
            for line_index in self.incidence.get(p, ()):
                grouped[line_index].append(p)
        for line_index, points in enumerate(grouped):
            points.sort(key=self.lines[line_index].position)
        return grouped


@dataclass(frozen=True)
class CoverageCertificate:
    points_checked: int
    min_incidence: int
    failures: Tuple[Point2, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def certify_coverage(arr: CoveredArrangement, t: int) -> CoverageCertificate:
    """Re-check every incidence with the rational line equation."""
    failures = []
    smallest = None
    for p in arr.cover_points:
        indices = set(arr.incidence.get(p, ()))
        incident = sum(1 for index in indices if arr.lines[index].contains(p))
        smallest = incident if smallest is None else min(smallest, incident)
        if incident < t:
            failures.append(p)
    return CoverageCertificate(len(arr.cover_points), smallest or 0, tuple(failures))


LATTICE_KINDS: Dict[str, Tuple[Tuple[int, int], ...]] = {
    "axes": ((1, 0), (0, 1)),
    "axes+diagonals": ((1, 0), (0, 1), (1, 1), (1, -1)),
    "triangular": ((1, 0), (0, 1), (-1, 1)),
    "triangular-refined": ((1, 0), (1, 1), (0, 1), (-1, 2), (-1, 1), (-2, 1)),
}


def lattice_basis(kind: str, bits: int) -> Tuple[Vector2, Vector2]:
    if kind.startswith("triangular"):
        # w approximates (1/2, √3/2) from below within 2^-(bits+1)
        half_root3 = rational_sqrt_floor(Fraction(3), bits) / 2
        return (Fraction(1), Fraction(0)), (Fraction(1, 2), half_root3)
    return (Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))


def _lines_from_families(
    points: Dict[Tuple[int, int], Point2],
    families: Sequence[Tuple[Vector2, Tuple[int, int]]],
) -> Tuple[List[Line2], Dict[Point2, Tuple[int, ...]]]:
    """One line per (family, offset) met by the points; offsets use integer coordinates."""
    line_index: Dict[Tuple[int, Any], int] = {}
    lines: List[Line2] = []
    incidence: Dict[Point2, List[int]] = {}
    for coords in sorted(points):
        p = points[coords]
        for family, (direction, (da, db)) in enumerate(families):
            key = (family, coords[0] * db - coords[1] * da)
            if key not in line_index:
                line_index[key] = len(lines)
                lines.append(Line2(p, direction))
            incidence.setdefault(p, []).append(line_index[key])
    return lines, {p: tuple(indices) for p, indices in incidence.items()}


def _certify_family_angles(directions: Sequence[Vector2], threshold: CosThreshold, stage: str) -> None:
    for i in range(len(directions)):
        for j in range(i + 1, len(directions)):
            if not crossing_angle_at_least(directions[i], directions[j], threshold):
                raise ConstructionError(
                    f"directions {i} and {j} meet below {threshold.alpha_label}; raise the precision",
                    stage=stage,
                )


def lattice_lines(kind: str, r: int, bits: int | None = None, eps: Fraction | None = None) -> CoveredArrangement:
    if kind not in LATTICE_KINDS:
        raise ConstructionError(f"unknown lattice kind {kind!r}", stage="lattice_lines")
    if r < 2:
        raise ConstructionError(f"r must be >= 2, got {r}", stage="lattice_lines")
    bits = load_settings().bits if bits is None else int(bits)
    if bits < 3:
        raise PrecisionError(f"lattice precision needs at least 3 bits, got {bits}")
    coefficients = LATTICE_KINDS[kind]
    t = len(coefficients)
    u, w = lattice_basis(kind, bits)
    families = [
        (canonical_direction((da * u[0] + db * w[0], da * u[1] + db * w[1])), (da, db))
        for da, db in coefficients
    ]
    eps = Fraction(1, 1 << (bits - 2)) if eps is None else Fraction(eps)
    threshold = rational_cos_bound(AngleSpec(Fraction(1, t), -eps), bits + 8)
    _certify_family_angles([direction for direction, _ in families], threshold, "lattice_lines")

    points = {
        (a, b): (a * u[0] + b * w[0], a * u[1] + b * w[1])
        for a in range(r)
        for b in range(r)
    }
    lines, incidence = _lines_from_families(points, families)
    arrangement = CoveredArrangement(
        lines=tuple(lines),
        cover_points=tuple(sorted(incidence)),
        incidence=incidence,
        t=t,
        metadata={"kind": kind, "r": r, "bits": bits, "eps": rational_str(eps), "threshold": threshold.as_dict()},
    )
    certificate = certify_coverage(arrangement, t)
    if not certificate.passed:
        raise ConstructionError(f"{len(certificate.failures)} lattice points on fewer than {t} lines", stage="lattice_lines")
    return arrangement


# Frames ------------------------------------------------------------------------------


@dataclass(frozen=True)
class Frame:
    t: int
    delta: Fraction
    lines: Tuple[Line2, ...]
    points: Tuple[Tuple[int, int], ...]
    q: int

    def as_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "delta": rational_str(self.delta),
            "points": [list(p) for p in self.points],
            "q": self.q,
        }


_FRAME_PRECISIONS = (96, 192, 384, 768)


def _nearest_lattice_point(t: int, i: int, delta: Fraction) -> Tuple[int, int]:
    """Lattice point nearest to distance 1/(√2 sin(δ/2)) along direction iπ/t."""
    for prec in _FRAME_PRECISIONS:
        ctx = interval_context(prec)
        radius = 1 / (ctx.sqrt(2) * ctx.sin(iv_rational(ctx, delta) / 2))
        angle = ctx.pi * iv_rational(ctx, Fraction(i, t))
        x = radius * ctx.cos(angle)
        y = radius * ctx.sin(angle)
        x_lo, x_hi = interval_bounds(x)
        y_lo, y_hi = interval_bounds(y)
        candidates = [
            (a, b)
            for a in range(math.floor(x_lo) - 1, math.ceil(x_hi) + 2)
            for b in range(math.floor(y_lo) - 1, math.ceil(y_hi) + 2)
            if (a, b) != (0, 0)
        ]
        distances = {}
        for a, b in candidates:
            distances[(a, b)] = interval_bounds((x - a) ** 2 + (y - b) ** 2)
        best_high = min(high for _, high in distances.values())
        contenders = [p for p, (low, _) in distances.items() if low <= best_high]
        if len(contenders) == 1:
            return contenders[0]
    return min(contenders, key=lambda p: (abs(p[0]), abs(p[1]), p[0] < 0))


def _primitive(a: int, b: int) -> Tuple[int, int]:
    divisor = math.gcd(a, b)
    return (a // divisor, b // divisor)


def frame_q_bound(delta: Fraction) -> int:
    """⌈2√2π/δ⌉ + 1, rounded down through a certified lower bound."""
    ctx = interval_context(96)
    low, _ = interval_bounds(2 * ctx.sqrt(2) * ctx.pi / iv_rational(ctx, delta))
    return math.ceil(low) + 1


def _deviation_within(point: Tuple[int, int], t: int, i: int, delta: Fraction) -> bool:
    """Angle between (a,b) and direction iπ/t is at most δ/2 (interval check)."""
    ctx = interval_context(128)
    angle = ctx.pi * iv_rational(ctx, Fraction(i, t))
    cos_phi = ctx.cos(angle)
    sin_phi = ctx.sin(angle)
    a, b = point
    along = a * cos_phi + b * sin_phi
    across = a * sin_phi - b * cos_phi
    half = iv_rational(ctx, delta) / 2
    slack = (ctx.sin(half) * along) ** 2 - (ctx.cos(half) * across) ** 2
    along_low, _ = interval_bounds(along)
    slack_low, _ = interval_bounds(slack)
    return along_low > 0 and slack_low >= 0


def t_frame(t: int, delta: Fraction) -> Frame:
    delta = Fraction(delta)
    if t < 2:
        raise ConstructionError(f"t must be >= 2, got {t}", stage="t_frame")
    if delta <= 0 or compare_angles(AngleSpec(Fraction(0), delta), AngleSpec(Fraction(1, t))) >= 0:
        raise ConstructionError(f"delta must lie in (0, pi/{t}), got {rational_str(delta)}", stage="t_frame")
    points = []
    for i in range(t):
        nearest = _nearest_lattice_point(t, i, delta)
        if not _deviation_within(nearest, t, i, delta):
            raise ConstructionError(f"line {i} deviates from {i}pi/{t} by more than delta/2", stage="t_frame")
        points.append(_primitive(*nearest))
    q = max(max(abs(a), abs(b)) for a, b in points)
    if q > frame_q_bound(delta):
        raise ConstructionError(f"frame coordinate bound {q} exceeds {frame_q_bound(delta)}", stage="t_frame")
    lines = tuple(Line2((Fraction(0), Fraction(0)), canonical_direction(p)) for p in points)
    threshold = rational_cos_bound(AngleSpec(Fraction(1, t), -delta), load_settings().bits)
    _certify_family_angles([line.dir for line in lines], threshold, "t_frame")
    return Frame(t=t, delta=delta, lines=lines, points=tuple(points), q=q)


def boundary_band(r: int, q: int) -> List[Tuple[int, int]]:
    """Grid points within q of the boundary; all of P when the bands meet."""
    if r <= 2 * (q + 1):
        return [(i, j) for i in range(r) for j in range(r)]
    band = set(range(q + 1)) | set(range(r - 1 - q, r))
    return [(i, j) for i in range(r) for j in range(r) if i in band or j in band]


def frame_cover(t: int, delta: Fraction, r: int, frame: Optional[Frame] = None) -> CoveredArrangement:
    frame = frame or t_frame(t, delta)
    if r < 1:
        raise ConstructionError(f"r must be >= 1, got {r}", stage="frame_cover")
    directions = [tuple(int(value) for value in line.dir) for line in frame.lines]
    line_index: Dict[Tuple[int, int], int] = {}
    lines: List[Line2] = []
    for i, j in boundary_band(r, frame.q):
        for family, (da, db) in enumerate(directions):
            key = (family, da * j - db * i)
            if key not in line_index:
                line_index[key] = len(lines)
                lines.append(Line2((Fraction(i), Fraction(j)), frame.lines[family].dir))
    incidence: Dict[Point2, Tuple[int, ...]] = {}
    for i in range(r):
        for j in range(r):
            hits = []
            for family, (da, db) in enumerate(directions):
                index = line_index.get((family, da * j - db * i))
                if index is not None:
                    hits.append(index)
            incidence[(Fraction(i), Fraction(j))] = tuple(hits)
    arrangement = CoveredArrangement(
        lines=tuple(lines),
        cover_points=tuple(sorted(incidence)),
        incidence=incidence,
        t=t,
        metadata={"kind": "frame", "t": t, "delta": rational_str(frame.delta), "r": r, "q": frame.q},
    )
    certificate = certify_coverage(arrangement, t)
    if not certificate.passed:
        raise ConstructionError(
            f"{len(certificate.failures)} grid points on fewer than {t} lines, first {certificate.failures[0]}",
            stage="frame_cover",
        )
    return arrangement


# Line-plane builder ------------------------------------------------------------------


def lemma_convert_build(arr: CoveredArrangement, t: int, k: int) -> GeometricGraph:
    """Stack k copies of every cover point and draw a grid graph in each line's vertical plane.

    Grid column is the position along the line and grid row is the height.
    """
    if k < 2:
        raise ConstructionError(f"k must be >= 2, got {k}", stage="lemma_convert_build")
    for p in arr.cover_points:
        if len(arr.incidence.get(p, ())) < t:
            raise ConstructionError(f"cover point {p} lies on fewer than {t} lines", stage="lemma_convert_build")
    point_index = {p: index for index, p in enumerate(arr.cover_points)}
    vertices = [(p[0], p[1], Fraction(h)) for p in arr.cover_points for h in range(k)]
    edges: Dict[Tuple[int, int], int] = {}
    for line_number, on_line in enumerate(arr.points_by_line()):
        if not on_line:
            raise ConstructionError(f"line {line_number} has no cover point", stage="lemma_convert_build")
        columns = [point_index[p] for p in on_line]
        for (h1, c1), (h2, c2) in grid_edges(k, len(columns)):
            u = columns[c1] * k + h1
            v = columns[c2] * k + h2
            pair = (min(u, v), max(u, v))
            if pair in edges:
                raise ConstructionError(
                    f"edge {pair} drawn on lines {edges[pair]} and {line_number}", stage="lemma_convert_build"
                )
            edges[pair] = line_number
    metadata = {
        "construction": "lemma_convert",
        "t": t,
        "k": k,
        "lines": len(arr.lines),
        "coverPoints": len(arr.cover_points),
    }
    metadata.update({f"arrangement{key[:1].upper()}{key[1:]}": value for key, value in arr.metadata.items()})
    return make_graph(vertices, sorted(edges), dim=3, metadata=metadata)


def enumerated_edge_count(arr: CoveredArrangement, k: int) -> int:
    return sum(grid_edge_count(k, len(points)) for points in arr.points_by_line())


# Full pipeline -----------------------------------------------------------------------

LATTICE_FOR_T = {2: "axes", 3: "triangular", 4: "axes+diagonals", 6: "triangular-refined"}


@dataclass(frozen=True)
class AlphaAcCertificate:
    n: int
    m: int
    enumerated_edges: int
    threshold: CosThreshold
    verdict: bool
    gamma: Fraction
    source: str
    trials: int
    r: int
    q: Optional[int] = None

    @property
    def q_below_half_r(self) -> Optional[bool]:
        """Frame bound against the grid side; None for lattice sources, which have no boundary band."""
        if self.q is None:
            return None
        return 2 * self.q < self.r

    @property
    def density(self) -> Fraction:
        return Fraction(self.m, self.n) if self.n else Fraction(0)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "enumeratedEdges": self.enumerated_edges,
            "threshold": self.threshold.as_dict(),
            "verdict": self.verdict,
            "gamma": rational_str(self.gamma),
            "source": self.source,
            "trials": self.trials,
            "density": rational_str(self.density),
            "r": self.r,
            "q": self.q,
            "qBelowHalfR": self.q_below_half_r,
        }


def build_arrangement(t: int, delta: Fraction, r: int, source: str = "frame", bits: int | None = None) -> CoveredArrangement:
    if source == "frame":
        return frame_cover(t, delta, r)
    if source == "lattice":
        kind = LATTICE_FOR_T.get(t)
        if kind is None:
            raise ConstructionError(f"no lattice family for t={t}; use t in {sorted(LATTICE_FOR_T)}", stage="arrangement")
        return lattice_lines(kind, r, bits)
    raise ConstructionError(f"unknown source {source!r}", stage="arrangement")


def rotate_arrangement(arr: CoveredArrangement, c: Fraction, s: Fraction) -> CoveredArrangement:
    """Turn every cover point and line by the rational rotation (c, s); incidences are kept as they are."""
    if c * c + s * s != 1:
        raise GeometryError(f"({c}, {s}) is not on the unit circle")

    def turn(p: Sequence[Fraction]) -> Point2:
        return (c * p[0] - s * p[1], s * p[0] + c * p[1])

    moved = {p: turn(p) for p in arr.cover_points}
    lines = tuple(Line2(turn(line.base), canonical_direction(turn(line.dir))) for line in arr.lines)
    metadata = dict(arr.metadata)
    metadata["rotation"] = [rational_str(c), rational_str(s)]
    return CoveredArrangement(
        lines=lines,
        cover_points=tuple(sorted(moved.values())),
        incidence={moved[p]: indices for p, indices in arr.incidence.items()},
        t=arr.t,
        metadata=metadata,
    )


# a vertical plane along (1, 1) contains the projection direction (γ, γ, 1)
_AXIS_ROTATION = (Fraction(3, 5), Fraction(4, 5))


def _along_projection_axis(arr: CoveredArrangement) -> bool:
    return any(line.dir[0] == line.dir[1] for line in arr.lines)


def construct_alpha_ac(
    t: int,
    eps: Fraction,
    r: int,
    *,
    source: str = "frame",
    bits: int | None = None,
    max_halvings: int | None = None,
) -> Tuple[GeometricGraph, AlphaAcCertificate]:
    eps = Fraction(eps)
    bits = load_settings().bits if bits is None else int(bits)
    if t < 2:
        raise ConstructionError(f"t must be >= 2, got {t}", stage="construct")
    if eps <= 0 or compare_angles(AngleSpec(Fraction(0), eps), AngleSpec(Fraction(1, t))) >= 0:
        raise ConstructionError(f"eps must lie in (0, pi/{t}), got {rational_str(eps)}", stage="construct")
    arrangement = build_arrangement(t, eps / 2, r, source, bits)
    if _along_projection_axis(arrangement):
        arrangement = rotate_arrangement(arrangement, *_AXIS_ROTATION)
        if _along_projection_axis(arrangement):
            raise ConstructionError("no line family clears the projection direction", stage="arrangement")
    spatial = lemma_convert_build(arrangement, t, r)
    expected = enumerated_edge_count(arrangement, r)
    threshold = rational_cos_bound(AngleSpec(Fraction(1, t), -eps), bits)
    try:
        search = search_gamma(spatial, threshold, max_halvings)
    except InvalidGraphError as error:
        raise ConstructionError(error.message, stage="project") from error
    graph = search.graph
    metadata = dict(graph.metadata)
    metadata.update({"construction": "full", "t": t, "eps": rational_str(eps), "r": r, "source": source})
    graph = make_graph(graph.vertices, graph.edges, dim=3, plane_normal=graph.plane_normal, metadata=metadata)
    certificate = AlphaAcCertificate(
        n=graph.n,
        m=graph.m,
        enumerated_edges=expected,
        threshold=threshold,
        verdict=search.certificate.verdict,
        gamma=search.gamma,
        source=source,
        trials=len(search.trials),
        r=r,
        q=arrangement.metadata.get("q"),
    )
    if certificate.q_below_half_r is False:
        append_run_log("construct_alpha_ac", "frame bound is not below r/2", t=t, r=r, q=certificate.q)
    return graph, certificate
