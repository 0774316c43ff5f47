"""αAC certification, direction partitions, rotation search and the bounds table."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import math
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from mpmath.ctx_mp import MPContext

from .errors import GeometryError, PartitionError, PreconditionError
from .exact_geom import (
    AngleSpec,
    CosThreshold,
    compare_angles,
    dot,
    interval_bounds,
    interval_context,
    iv_rational,
    mpf_to_fraction,
    parse_angle,
    rational_cos_bound,
    sign,
    sign_plus_root3,
)
from .graph_model import Edge, GeometricGraph, crossing_pairs, ensure_valid, with_edges
from .settings import load_settings
from .utils import rational_str


@dataclass(frozen=True)
class ACCertificate:
    threshold: CosThreshold
    verdict: bool
    pair_count: int
    witness: Optional[Edge] = None
    witness_cos2: Optional[Fraction] = None
    sharpest_cos2: Optional[Fraction] = None

    def as_dict(self) -> Dict[str, Any]:
        return {
            "threshold": self.threshold.as_dict(),
            "verdict": self.verdict,
            "pairCount": self.pair_count,
            "witness": list(self.witness) if self.witness else None,
            "witnessCos2": rational_str(self.witness_cos2) if self.witness_cos2 is not None else None,
            "sharpestCos2": rational_str(self.sharpest_cos2) if self.sharpest_cos2 is not None else None,
        }


def is_alpha_ac(g: GeometricGraph, threshold: CosThreshold, *, assume_valid: bool = False) -> ACCertificate:
    """Check every properly crossing pair against the threshold in integer arithmetic."""
    if not assume_valid:
        ensure_valid(g)
    bound = threshold.cos_bound
    bound_num2 = bound.numerator * bound.numerator
    bound_den2 = bound.denominator * bound.denominator
    pairs = crossing_pairs(g)
    sharpest: Optional[Tuple[int, int, Edge]] = None
    worst: Optional[Tuple[int, int, Edge]] = None
    for pair in pairs:
        d1 = g.direction(pair[0])
        d2 = g.direction(pair[1])
        product = dot(d1, d2)
        product2 = product * product
        norms = dot(d1, d1) * dot(d2, d2)
        if sharpest is None or product2 * sharpest[1] > sharpest[0] * norms:
            sharpest = (product2, norms, pair)
        if product2 * bound_den2 > bound_num2 * norms:
            if worst is None or product2 * worst[1] > worst[0] * norms:
                worst = (product2, norms, pair)
    return ACCertificate(
        threshold=threshold,
        verdict=worst is None,
        pair_count=len(pairs),
        witness=worst[2] if worst else None,
        witness_cos2=Fraction(worst[0], worst[1]) if worst else None,
        sharpest_cos2=Fraction(sharpest[0], sharpest[1]) if sharpest else None,
    )


# Rotations ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Rotation:
    """Rotation by a rational point (c, s) of the unit circle."""

    c: Fraction
    s: Fraction

    def __post_init__(self) -> None:
        if self.c * self.c + self.s * self.s != 1:
            raise GeometryError(f"({self.c}, {self.s}) is not on the unit circle")

    def apply(self, v: Sequence) -> Tuple[Fraction, Fraction]:
        return (self.c * v[0] - self.s * v[1], self.s * v[0] + self.c * v[1])

    def as_dict(self) -> Dict[str, str]:
        return {"cos": rational_str(self.c), "sin": rational_str(self.s)}


IDENTITY = Rotation(Fraction(1), Fraction(0))


def rotation_from_half_tangent(t: Fraction) -> Rotation:
    t = Fraction(t)
    denominator = 1 + t * t
    return Rotation((1 - t * t) / denominator, 2 * t / denominator)


def rotation_for_angle(theta: AngleSpec | str, bits: int | None = None) -> Rotation:
    """Rational rotation within about 2^-bits of θ ∈ [0, π)."""
    spec = parse_angle(theta)
    if spec == AngleSpec():
        return IDENTITY
    if compare_angles(spec, AngleSpec()) < 0 or compare_angles(spec, AngleSpec(Fraction(1))) >= 0:
        raise GeometryError(f"rotation angle {spec} outside [0, pi)")
    bits = load_settings().bits if bits is None else int(bits)
    ctx = interval_context(bits + 32)
    half = spec.interval(ctx) / 2
    low, high = interval_bounds(ctx.sin(half) / ctx.cos(half))
    scale = 1 << bits
    return rotation_from_half_tangent(Fraction(round((low + high) / 2 * scale), scale))


# Direction partition -----------------------------------------------------------------

_EXACT_BOUNDARIES: Dict[Fraction, Callable[[Fraction, Fraction], int]] = {
    Fraction(1, 6): lambda x, y: sign_plus_root3(x, -y),
    Fraction(1, 4): lambda x, y: sign(x - y),
    Fraction(1, 3): lambda x, y: sign_plus_root3(-y, x),
    Fraction(1, 2): lambda x, y: sign(x),
    Fraction(2, 3): lambda x, y: sign_plus_root3(y, x),
    Fraction(3, 4): lambda x, y: sign(x + y),
    Fraction(5, 6): lambda x, y: sign_plus_root3(x, y),
}

_BOUNDARY_PRECISIONS = (64, 128, 256, 512, 1024, 2048, 4096)


def boundary_side(v: Sequence[Fraction], beta: AngleSpec, edge: int | None = None) -> int:
    """Sign of sin(β − φ) for the direction φ ∈ [0, π) of v: +1 when φ < β, 0 when equal."""
    x, y = v
    if beta.offset == 0 and beta.pi_coeff in _EXACT_BOUNDARIES:
        return _EXACT_BOUNDARIES[beta.pi_coeff](x, y)
    for prec in _BOUNDARY_PRECISIONS:
        ctx = interval_context(prec)
        angle = beta.interval(ctx)
        low, high = interval_bounds(ctx.sin(angle) * iv_rational(ctx, x) - ctx.cos(angle) * iv_rational(ctx, y))
        if low > 0:
            return 1
        if high < 0:
            return -1
    raise PartitionError(f"direction of edge {edge} undecidable against boundary {beta}", edge=edge)


def bucket_count(alpha: AngleSpec) -> Tuple[int, bool]:
    """r = ⌈π/α⌉ and whether α divides π exactly."""
    r = 1
    while True:
        order = compare_angles(alpha.times(r), AngleSpec(Fraction(1)))
        if order >= 0:
            return r, order == 0
        r += 1


def _check_alpha(alpha: AngleSpec) -> None:
    if compare_angles(alpha, AngleSpec()) <= 0 or compare_angles(alpha, AngleSpec(Fraction(1, 2))) > 0:
        raise PreconditionError(f"alpha must lie in (0, pi/2], got {alpha}")


def _upper(v: Tuple[Fraction, Fraction]) -> Tuple[Fraction, Fraction]:
    if v[1] < 0 or (v[1] == 0 and v[0] < 0):
        return (-v[0], -v[1])
    return v


@dataclass(frozen=True)
class DirectionPartition:
    alpha: AngleSpec
    rotation: Rotation
    bucket_count: int
    buckets: Tuple[Tuple[int, ...], ...]
    last_bucket_size: int
    divides: bool

    def as_dict(self) -> Dict[str, Any]:
        return {
            "alpha": str(self.alpha),
            "rotation": self.rotation.as_dict(),
            "bucketCount": self.bucket_count,
            "buckets": [list(bucket) for bucket in self.buckets],
            "lastBucketSize": self.last_bucket_size,
            "alphaDividesPi": self.divides,
        }


def direction_partition(g: GeometricGraph, alpha: AngleSpec | str, theta: Rotation | AngleSpec | str = IDENTITY) -> DirectionPartition:
    """Bucket i holds the edges whose rotated direction lies in [α(i−1), αi).

    When α divides π the remainder interval [⌊π/α⌋α, π) is empty and ``last_bucket_size``
    is 0; otherwise it is the size of bucket r.
    """
    alpha = parse_angle(alpha)
    _check_alpha(alpha)
    if g.dim != 2:
        raise GeometryError("direction_partition expects a 2D graph; flatten coplanar input first")
    rotation = theta if isinstance(theta, Rotation) else rotation_for_angle(theta)
    r, divides = bucket_count(alpha)
    boundaries = [alpha.times(i) for i in range(1, r)]
    buckets: List[List[int]] = [[] for _ in range(r)]
    for edge_index, (i, j) in enumerate(g.edges):
        direction = _upper(rotation.apply((g.vertices[j][0] - g.vertices[i][0], g.vertices[j][1] - g.vertices[i][1])))
        bucket = 0
        for beta in boundaries:
            if boundary_side(direction, beta, edge_index) > 0:
                break
            bucket += 1
        buckets[bucket].append(edge_index)
    return DirectionPartition(
        alpha=alpha,
        rotation=rotation,
        bucket_count=r,
        buckets=tuple(tuple(bucket) for bucket in buckets),
        last_bucket_size=0 if divides else len(buckets[-1]),
        divides=divides,
    )


def remainder_bound(alpha: AngleSpec, m: int) -> int:
    """⌊(π mod α)/π · m⌋ with certified bounds, rounded down when undecided."""
    r, divides = bucket_count(alpha)
    if divides or m == 0:
        return 0
    if alpha.offset == 0:
        return math.floor(m * (1 - (r - 1) * alpha.pi_coeff))
    low = Fraction(0)
    for prec in (96, 256, 1024):
        ctx = interval_context(prec)
        pi = ctx.pi
        value = m * (pi - (r - 1) * alpha.interval(ctx)) / pi
        low, high = interval_bounds(value)
        if math.floor(low) == math.floor(high):
            return math.floor(low)
    return math.floor(low)


def _numeric_directions(g: GeometricGraph, ctx: MPContext) -> List[Any]:
    angles = []
    for edge_index in range(g.m):
        dx, dy = g.direction(edge_index)
        phi = ctx.atan2(dy, dx)
        if phi < 0:
            phi += ctx.pi
        if phi >= ctx.pi:
            phi -= ctx.pi
        angles.append(phi)
    return angles


def find_good_rotation(
    g: GeometricGraph,
    alpha: AngleSpec | str,
    bits: int | None = None,
    certify_limit: int = 8,
) -> Tuple[Rotation, DirectionPartition]:
    """Rotation with the smallest remainder bucket.

    Edge e sits in the remainder bucket for θ in one arc [(r−1)α − φ_e, π − φ_e) mod π, so
    a circular sweep over arc ends counts every stretch between critical rotations.  The
    count at a critical rotation equals the count just after it, so stretch midpoints
    cover every value.  The best midpoints are converted to rational rotations and the
    partition is recomputed exactly.
    """
    alpha = parse_angle(alpha)
    _check_alpha(alpha)
    bits = load_settings().bits if bits is None else int(bits)
    r, divides = bucket_count(alpha)
    if divides or g.m == 0:
        return IDENTITY, direction_partition(g, alpha, IDENTITY)

    ctx = MPContext()
    ctx.prec = max(96, bits + 32)
    pi = ctx.pi
    alpha_value = alpha.pi_coeff.numerator * pi / alpha.pi_coeff.denominator + ctx.mpf(alpha.offset.numerator) / alpha.offset.denominator
    start_of_last = (r - 1) * alpha_value

    def wrap(value):
        value = value % pi
        return value + pi if value < 0 else value

    events: List[Tuple[Any, int]] = []
    arcs = []
    for phi in _numeric_directions(g, ctx):
        begin = wrap(start_of_last - phi)
        end = wrap(-phi)
        arcs.append((begin, end))
        events.append((begin, 1))
        events.append((end, -1))
    events.sort(key=lambda item: (item[0], item[1]))
    positions = sorted({position for position, _ in events})

    def covered(theta) -> int:
        count = 0
        for begin, end in arcs:
            if begin <= end:
                count += begin <= theta < end
            else:
                count += theta >= begin or theta < end
        return count

    midpoints = []
    for index, position in enumerate(positions):
        following = positions[index + 1] if index + 1 < len(positions) else positions[0] + pi
        midpoints.append(wrap((position + following) / 2))
    first = midpoints[0]
    coverage = covered(first)
    scored = [(coverage, first)]
    change: Dict[Any, int] = {}
    for position, delta in events:
        change[position] = change.get(position, 0) + delta
    for index in range(1, len(positions)):
        coverage += change[positions[index]]
        scored.append((coverage, midpoints[index]))
    scored.sort(key=lambda item: (item[0], item[1]))

    scale = 1 << bits
    best: Optional[Tuple[Rotation, DirectionPartition]] = None
    for expected, theta in scored[:certify_limit]:
        half_tangent = mpf_to_fraction(ctx.nint(ctx.tan(theta / 2) * scale))
        rotation = rotation_from_half_tangent(half_tangent / scale)
        partition = direction_partition(g, alpha, rotation)
        if best is None or partition.last_bucket_size < best[1].last_bucket_size:
            best = (rotation, partition)
        if partition.last_bucket_size <= expected:
            break
    return best


# Uniform bound -----------------------------------------------------------------------


def planar_capacity(n: int) -> int:
    return 3 * n - 6 if n >= 3 else n * (n - 1) // 2


def pi_over_alpha(alpha: AngleSpec, factor: int = 1) -> Tuple[Fraction, Fraction]:
    """Certified rational bounds of factor·π/α (exact when α is a rational multiple of π)."""
    if alpha.offset == 0:
        exact = Fraction(factor) / alpha.pi_coeff
        return exact, exact
    ctx = interval_context(128)
    return interval_bounds(factor * ctx.pi / alpha.interval(ctx))


@dataclass(frozen=True)
class BucketCheck:
    index: int
    size: int
    crossings: int
    capacity: int

    @property
    def passed(self) -> bool:
        return self.crossings == 0 and self.size <= self.capacity

    def as_dict(self) -> Dict[str, Any]:
        return {"index": self.index, "size": self.size, "crossings": self.crossings, "capacity": self.capacity}


@dataclass(frozen=True)
class UniformBoundReport:
    alpha: AngleSpec
    n: int
    m: int
    bound_low: Fraction
    bound_high: Fraction
    edge_bound_holds: bool
    partition: DirectionPartition
    buckets: Tuple[BucketCheck, ...]
    remainder_limit: int

    @property
    def remainder_holds(self) -> bool:
        return self.partition.last_bucket_size <= self.remainder_limit

    @property
    def verdict(self) -> bool:
        return self.edge_bound_holds and self.remainder_holds and all(check.passed for check in self.buckets)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "alpha": str(self.alpha),
            "n": self.n,
            "m": self.m,
            "boundLow": rational_str(self.bound_low),
            "boundHigh": rational_str(self.bound_high),
            "slack": rational_str(self.bound_low - self.m),
            "edgeBoundHolds": self.edge_bound_holds,
            "partition": self.partition.as_dict(),
            "buckets": [check.as_dict() for check in self.buckets],
            "remainderLimit": self.remainder_limit,
            "remainderHolds": self.remainder_holds,
            "verdict": self.verdict,
        }


def uniform_bound_check(g: GeometricGraph, alpha: AngleSpec | str, bits: int | None = None) -> UniformBoundReport:
    alpha = parse_angle(alpha)
    _check_alpha(alpha)
    bits = load_settings().bits if bits is None else int(bits)
    certificate = is_alpha_ac(g, rational_cos_bound(alpha, bits))
    if not certificate.verdict:
        raise PreconditionError(
            f"graph is not {alpha}AC: edges {list(certificate.witness)} have cos^2 {rational_str(certificate.witness_cos2)}"
        )
    capacity = planar_capacity(g.n)
    low, high = pi_over_alpha(alpha, capacity)
    _, partition = find_good_rotation(g, alpha, bits)
    checks = []
    for index, bucket in enumerate(partition.buckets, start=1):
        crossings = len(crossing_pairs(with_edges(g, (g.edges[e] for e in bucket))))
        checks.append(BucketCheck(index, len(bucket), crossings, capacity))
    return UniformBoundReport(
        alpha=alpha,
        n=g.n,
        m=g.m,
        bound_low=low,
        bound_high=high,
        edge_bound_holds=g.m <= low,
        partition=partition,
        buckets=tuple(checks),
        remainder_limit=remainder_bound(alpha, g.m),
    )


# Bounds table ------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundRow:
    label: str
    condition: str
    applies: bool
    source: str
    kind: str = "upper"
    value: Optional[Fraction] = None
    value_low: Optional[Fraction] = None
    is_min: bool = False

    def as_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "condition": self.condition,
            "applies": self.applies,
            "source": self.source,
            "kind": self.kind,
            "value": rational_str(self.value) if self.value is not None else None,
            "valueLow": rational_str(self.value_low) if self.value_low is not None else None,
            "isMin": self.is_min,
        }


@dataclass(frozen=True)
class BoundsTable:
    alpha: AngleSpec
    n: int
    rows: Tuple[BoundRow, ...] = field(default_factory=tuple)

    @property
    def minimum(self) -> Optional[BoundRow]:
        return next((row for row in self.rows if row.is_min), None)

    def as_dict(self) -> Dict[str, Any]:
        minimum = self.minimum
        return {
            "alpha": str(self.alpha),
            "n": self.n,
            "rows": [row.as_dict() for row in self.rows],
            "minimum": minimum.label if minimum else None,
        }

    def as_markdown(self) -> str:
        lines = [
            f"# Edge bounds for alpha = {self.alpha}, n = {self.n}",
            "",
            "| bound | condition | applies | value | kind | source |",
            "|---|---|---|---|---|---|",
        ]
        for row in self.rows:
            if row.value is None:
                value = "-"
            elif row.value_low is not None and row.value_low != row.value:
                value = f"{float(row.value_low):.2f} .. {float(row.value):.2f}"
            else:
                value = rational_str(row.value)
            marker = " **min**" if row.is_min else ""
            lines.append(
                f"| {row.label}{marker} | {row.condition} | {'yes' if row.applies else 'no'} | {value} | {row.kind} | {row.source} |"
            )
        return "\n".join(lines) + "\n"


def bound_table(alpha: AngleSpec | str, n: int, bits: int | None = None) -> BoundsTable:
    alpha = parse_angle(alpha)
    _check_alpha(alpha)
    if n < 3:
        raise PreconditionError(f"n must be >= 3, got {n}")
    n_value = Fraction(n)

    def above(coeff: Fraction) -> bool:
        return compare_angles(alpha, AngleSpec(coeff)) > 0

    partition_low, partition_high = pi_over_alpha(alpha, 3 * n - 6)
    rows = [
        BoundRow("4n-10", "alpha = pi/2", compare_angles(alpha, AngleSpec(Fraction(1, 2))) == 0,
                 "RAC graphs, charging with surplus", value=4 * n_value - 10),
        BoundRow("6.5n-20", "alpha > pi/3", above(Fraction(1, 3)),
                 "quasiplanar graphs (Ackerman-Tardos)", value=Fraction(13, 2) * n_value - 20),
        BoundRow("36n-72", "alpha > pi/4", above(Fraction(1, 4)),
                 "no four pairwise crossing edges (Ackerman)", value=36 * n_value - 72),
        BoundRow("6n-12", "alpha > 2pi/5", above(Fraction(2, 5)),
                 "discharging along 1-triangle bisectors", value=6 * n_value - 12),
        BoundRow("(pi/alpha)(3n-6)", "alpha > 0", True,
                 "direction partition into crossing-free buckets", value=partition_high, value_low=partition_low),
        BoundRow("O(n log n)", "alpha > pi/k, k >= 5", not above(Fraction(1, 4)),
                 "no k pairwise crossing edges (Valtr); citation only"),
    ]
    # largest t with t·α < π
    t = bucket_count(alpha)[0] - 1
    if t >= 2:
        rows.append(BoundRow(f"3*{t}n", f"alpha < pi/{t}", True,
                             f"lattice construction, 3tn - O(tn^(2/3)/eps) with t={t}",
                             kind="lower", value=3 * t * n_value))

    candidates = [row for row in rows if row.kind == "upper" and row.applies and row.value is not None]
    best = min(candidates, key=lambda row: row.value) if candidates else None
    rows = [
        BoundRow(row.label, row.condition, row.applies, row.source, row.kind, row.value, row.value_low, row is best)
        for row in rows
    ]
    return BoundsTable(alpha=alpha, n=n, rows=tuple(rows))
