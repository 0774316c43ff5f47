"""Exact rational geometry: predicates, directions, symbolic angles and certified cosine bounds.

Every accept/reject decision in acgraph goes through this module and is evaluated in
``fractions.Fraction`` or integer arithmetic.  ``mpmath`` intervals are used only to
produce one-sided rational bounds of transcendental quantities (cos, π); the bound
itself is then used exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
import enum
from fractions import Fraction
from functools import reduce
import math
import re
from typing import Iterable, List, Sequence, Tuple

from mpmath.ctx_iv import MPIntervalContext

from .errors import CollinearOverlapError, GeometryError, PrecisionError
from .utils import rational_str, to_rational

Rational = Fraction
Point2 = Tuple[Fraction, Fraction]
Vector2 = Point2
Point3 = Tuple[Fraction, Fraction, Fraction]
Vector3 = Point3
Point = Tuple[Fraction, ...]

MAX_BITS = 1 << 16
_ESCALATION = (64, 128, 256, 512, 1024, 2048, 4096)


def point(*coords) -> Point:
    return tuple(to_rational(value) for value in coords)


def sub(p: Sequence, q: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(p, q))


def add(p: Sequence, q: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(p, q))


def scale(v: Sequence, factor) -> tuple:
    return tuple(a * factor for a in v)


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), 0)


def cross2(u: Sequence, v: Sequence):
    return u[0] * v[1] - u[1] * v[0]


def cross3(u: Sequence, v: Sequence) -> tuple:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def sign(value) -> int:
    return (value > 0) - (value < 0)


class Orientation(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    COLLINEAR = "collinear"


def orient_sign(p: Sequence, q: Sequence, r: Sequence) -> int:
    det = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (det > 0) - (det < 0)


def orient2d(p: Sequence, q: Sequence, r: Sequence) -> Orientation:
    value = orient_sign(p, q, r)
    if value > 0:
        return Orientation.LEFT
    if value < 0:
        return Orientation.RIGHT
    return Orientation.COLLINEAR


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point

    def __post_init__(self) -> None:
        if len(self.a) != len(self.b):
            raise GeometryError("segment endpoints have different dimensions")
        if tuple(self.a) == tuple(self.b):
            raise GeometryError(f"degenerate segment at {format_point(self.a)}")

    @property
    def direction(self) -> tuple:
        return sub(self.b, self.a)

    @property
    def dim(self) -> int:
        return len(self.a)


class SegmentRelation(str, enum.Enum):
    DISJOINT = "disjoint"
    CROSSING = "crossing"
    TOUCHING = "touching"
    OVERLAPPING = "overlapping"


def _within_box(a: Sequence, b: Sequence, p: Sequence) -> bool:
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def segment_relation(a: Sequence, b: Sequence, c: Sequence, d: Sequence) -> SegmentRelation:
    """Classify closed 2D segments ab and cd. Works on ints and Fractions alike."""
    o1 = orient_sign(a, b, c)
    o2 = orient_sign(a, b, d)
    if o1 == 0 and o2 == 0:
        axis = 0 if a[0] != b[0] else 1
        lo = max(min(a[axis], b[axis]), min(c[axis], d[axis]))
        hi = min(max(a[axis], b[axis]), max(c[axis], d[axis]))
        if lo < hi:
            return SegmentRelation.OVERLAPPING
        if lo == hi:
            return SegmentRelation.TOUCHING
        return SegmentRelation.DISJOINT
    o3 = orient_sign(c, d, a)
    o4 = orient_sign(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return SegmentRelation.CROSSING
    if (
        (o1 == 0 and _within_box(a, b, c))
        or (o2 == 0 and _within_box(a, b, d))
        or (o3 == 0 and _within_box(c, d, a))
        or (o4 == 0 and _within_box(c, d, b))
    ):
        return SegmentRelation.TOUCHING
    return SegmentRelation.DISJOINT


def properly_cross(s1: Segment, s2: Segment) -> bool:
    if s1.dim != 2 or s2.dim != 2:
        raise GeometryError("properly_cross expects 2D segments")
    relation = segment_relation(s1.a, s1.b, s2.a, s2.b)
    if relation is SegmentRelation.OVERLAPPING:
        raise CollinearOverlapError(
            f"collinear overlap between {format_segment(s1)} and {format_segment(s2)}",
            segments=(s1, s2),
        )
    return relation is SegmentRelation.CROSSING


def line_intersection(a: Sequence, b: Sequence, c: Sequence, d: Sequence) -> Point2:
    """Intersection of the supporting lines of ab and cd; the caller guarantees they cross."""
    r = sub(b, a)
    s = sub(d, c)
    denominator = cross2(r, s)
    t = Fraction(cross2(sub(c, a), s)) / denominator
    return (a[0] + t * r[0], a[1] + t * r[1])


def crossing_point(s1: Segment, s2: Segment) -> Point2:
    if not properly_cross(s1, s2):
        raise GeometryError(
            f"crossing_point needs properly crossing segments: {format_segment(s1)}, {format_segment(s2)}"
        )
    x, y = line_intersection(s1.a, s1.b, s2.a, s2.b)
    return (Fraction(x), Fraction(y))


def segment_parameter(seg: Segment, p: Sequence) -> Fraction:
    """Parameter t with p = a + t (b - a); p must lie on the supporting line."""
    direction = seg.direction
    axis = max(range(len(direction)), key=lambda index: abs(direction[index]))
    return Fraction(p[axis] - seg.a[axis]) / direction[axis]


class ThresholdSide(str, enum.Enum):
    LOWER_BOUND_OF_COS = "lower-bound-of-cos"
    EXACT = "exact"


@dataclass(frozen=True)
class CosThreshold:
    alpha_label: str
    cos_bound: Fraction
    side: ThresholdSide = ThresholdSide.LOWER_BOUND_OF_COS

    def __post_init__(self) -> None:
        if not (-1 <= self.cos_bound <= 1):
            raise GeometryError(f"cos bound {self.cos_bound} outside [-1, 1]")

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha_label,
            "cosBound": rational_str(self.cos_bound),
            "side": self.side.value,
        }


def cos2_between(d1: Sequence, d2: Sequence) -> Fraction:
    n1 = dot(d1, d1)
    n2 = dot(d2, d2)
    if n1 == 0 or n2 == 0:
        raise GeometryError("zero direction vector")
    d = dot(d1, d2)
    return Fraction(d * d) / (n1 * n2)


def crossing_angle_at_least(d1: Sequence, d2: Sequence, threshold: CosThreshold) -> bool:
    if len(d1) != len(d2):
        raise GeometryError("direction vectors have different dimensions")
    n1 = dot(d1, d1)
    n2 = dot(d2, d2)
    if n1 == 0 or n2 == 0:
        raise GeometryError("zero direction vector")
    d = dot(d1, d2)
    bound = threshold.cos_bound
    return d * d <= bound * bound * n1 * n2


def canonical_direction(vector: Sequence) -> tuple:
    """Primitive integer representative of a direction class, in the upper half-plane."""
    values = [Fraction(value) for value in vector]
    if not any(values):
        raise GeometryError("zero direction vector")
    common = reduce(math.lcm, (value.denominator for value in values), 1)
    ints = [int(value * common) for value in values]
    divisor = reduce(math.gcd, (abs(value) for value in ints), 0)
    ints = [value // divisor for value in ints]
    if len(ints) == 2:
        flip = ints[1] < 0 or (ints[1] == 0 and ints[0] < 0)
    else:
        leading = next(value for value in reversed(ints) if value != 0)
        flip = leading < 0
    if flip:
        ints = [-value for value in ints]
    return tuple(Fraction(value) for value in ints)


def direction_of(edge: Segment) -> Vector2:
    if edge.dim != 2:
        raise GeometryError("direction_of expects a 2D segment")
    return canonical_direction(edge.direction)


def _half_plane(v: Sequence) -> int:
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def compare_full_angle(u: Sequence, v: Sequence) -> int:
    """Order of two nonzero vectors by their angle in [0, 2π), counterclockwise from +x."""
    hu = _half_plane(u)
    hv = _half_plane(v)
    if hu != hv:
        return -1 if hu < hv else 1
    return -sign(cross2(u, v))


def sign_of_radical_sum(a_coeff, a_radicand, b_coeff, b_radicand) -> int:
    """Exact sign of a_coeff/sqrt(a_radicand) + b_coeff/sqrt(b_radicand), radicands > 0."""
    sa = sign(a_coeff)
    sb = sign(b_coeff)
    if sa == 0:
        return sb
    if sb == 0 or sa == sb:
        return sa
    lhs = a_coeff * a_coeff * b_radicand
    rhs = b_coeff * b_coeff * a_radicand
    if lhs > rhs:
        return sa
    if lhs < rhs:
        return sb
    return 0


def integer_scaled(points: Iterable[Sequence]) -> Tuple[int, List[tuple]]:
    """Multiply all coordinates by their common denominator.

    Orientation signs, crossings, incidences and squared cosines are invariant under a
    positive uniform scaling, so scans can run on plain ints.
    """
    rows = [tuple(Fraction(value) for value in row) for row in points]
    common = 1
    for row in rows:
        for value in row:
            common = math.lcm(common, value.denominator)
    return common, [tuple(int(value * common) for value in row) for row in rows]


def rational_sqrt_floor(value: Fraction, bits: int) -> Fraction:
    """Largest multiple of 2^-bits that is <= sqrt(value)."""
    if value < 0:
        raise GeometryError("square root of a negative number")
    scaled = Fraction(value) * (1 << (2 * bits))
    return Fraction(math.isqrt(scaled.numerator // scaled.denominator), 1 << bits)


def cos2_below_two_pi_fifths(cos2: Fraction) -> bool:
    """cos^2 < cos^2(2π/5) = (3 - √5)/8, decided exactly."""
    gap = 3 - 8 * Fraction(cos2)
    return gap > 0 and gap * gap > 5


def format_point(p: Sequence) -> str:
    return "(" + ", ".join(rational_str(Fraction(value)) for value in p) + ")"


def format_segment(seg: Segment) -> str:
    return f"{format_point(seg.a)}-{format_point(seg.b)}"


# Symbolic angles ---------------------------------------------------------------------

_PI_TERM_RE = re.compile(r"^([+-]?)(\d+(?:/\d+)?)?\*?pi(?:/(\d+))?$")


@dataclass(frozen=True)
class AngleSpec:
    """The angle pi_coeff·π + offset (radians)."""

    pi_coeff: Fraction = Fraction(0)
    offset: Fraction = Fraction(0)

    def __str__(self) -> str:
        parts: List[str] = []
        if self.pi_coeff:
            coeff = self.pi_coeff
            head = "-" if coeff < 0 else ""
            coeff = abs(coeff)
            numerator = "" if coeff.numerator == 1 else str(coeff.numerator)
            denominator = "" if coeff.denominator == 1 else f"/{coeff.denominator}"
            parts.append(f"{head}{numerator}pi{denominator}")
        if self.offset or not parts:
            text = rational_str(self.offset)
            if parts and not text.startswith("-"):
                text = "+" + text
            parts.append(text)
        return "".join(parts)

    def plus(self, offset: Fraction) -> "AngleSpec":
        return AngleSpec(self.pi_coeff, self.offset + Fraction(offset))

    def times(self, factor: Fraction | int) -> "AngleSpec":
        return AngleSpec(self.pi_coeff * factor, self.offset * factor)

    def interval(self, ctx: MPIntervalContext):
        return ctx.pi * iv_rational(ctx, self.pi_coeff) + iv_rational(ctx, self.offset)


def parse_angle(text: str | AngleSpec) -> AngleSpec:
    if isinstance(text, AngleSpec):
        return text
    cleaned = str(text or "").strip().lower().replace(" ", "").replace("π", "pi")
    if not cleaned:
        raise ValueError("empty angle specification")
    terms = re.findall(r"[+-]?[^+-]+", cleaned)
    if "".join(terms) != cleaned:
        raise ValueError(f"cannot parse angle: {text!r}")
    pi_coeff = Fraction(0)
    offset = Fraction(0)
    for term in terms:
        if "pi" in term:
            match = _PI_TERM_RE.match(term)
            if not match:
                raise ValueError(f"cannot parse angle term {term!r}")
            coeff = to_rational(match.group(2)) if match.group(2) else Fraction(1)
            if match.group(3):
                divisor = int(match.group(3))
                if divisor == 0:
                    raise ValueError(f"zero denominator in {term!r}")
                coeff /= divisor
            pi_coeff += -coeff if match.group(1) == "-" else coeff
        else:
            offset += to_rational(term)
    return AngleSpec(pi_coeff, offset)


# Interval helpers --------------------------------------------------------------------


def interval_context(prec: int) -> MPIntervalContext:
    """A private interval context; the shared ``mpmath.iv`` precision is never touched."""
    ctx = MPIntervalContext()
    ctx.prec = int(prec)
    return ctx


def iv_rational(ctx: MPIntervalContext, value: Fraction | int):
    value = Fraction(value)
    return ctx.mpf(value.numerator) / ctx.mpf(value.denominator)


def _raw_to_fraction(raw) -> Fraction:
    sign_bit, mantissa, exponent, bitcount = raw
    mantissa = int(mantissa)
    if mantissa == 0:
        if exponent != 0 or bitcount not in (0,):
            raise PrecisionError("interval endpoint is not finite")
        return Fraction(0)
    value = Fraction(mantissa) * (Fraction(2) ** int(exponent))
    return -value if sign_bit else value


def interval_bounds(value) -> Tuple[Fraction, Fraction]:
    """Exact rational endpoints of an mpmath interval."""
    low, high = value._mpi_
    return _raw_to_fraction(low), _raw_to_fraction(high)


def mpf_to_fraction(value) -> Fraction:
    return _raw_to_fraction(value._mpf_)


def sign_plus_root3(a, b) -> int:
    """Exact sign of a + b·√3."""
    sa = sign(a)
    sb = sign(b)
    if sa == 0:
        return sb
    if sb == 0 or sa == sb:
        return sa
    lhs = a * a
    rhs = 3 * b * b
    return sa if lhs > rhs else sb


def pi_bounds(bits: int = 64) -> Tuple[Fraction, Fraction]:
    return interval_bounds(interval_context(max(8, bits) + 8).pi)


def compare_angles(a: AngleSpec, b: AngleSpec) -> int:
    """Exact sign of a - b (π is irrational, so mixed terms never tie)."""
    coeff = a.pi_coeff - b.pi_coeff
    offset = a.offset - b.offset
    if coeff == 0:
        return sign(offset)
    if offset == 0:
        return sign(coeff)
    for prec in _ESCALATION:
        pi_low, pi_high = pi_bounds(prec)
        low, high = sorted((coeff * pi_low + offset, coeff * pi_high + offset))
        if low > 0:
            return 1
        if high < 0:
            return -1
    raise PrecisionError(f"cannot order angles {a} and {b}")


_EXACT_COSINES = {
    Fraction(1, 2): Fraction(0),
    Fraction(1, 3): Fraction(1, 2),
}


def rational_cos_bound(angle_spec: str | AngleSpec, bits: int = 64) -> CosThreshold:
    """A rational q <= cos(angle), within 2^-bits of it, for an angle in (0, π/2]."""
    angle = parse_angle(angle_spec)
    if not isinstance(bits, int) or bits < 1 or bits > MAX_BITS:
        raise PrecisionError(f"unrepresentable precision request: {bits!r} bits")
    if compare_angles(angle, AngleSpec()) <= 0 or compare_angles(angle, AngleSpec(Fraction(1, 2))) > 0:
        raise GeometryError(f"angle {angle} outside (0, pi/2]")
    if angle.offset == 0 and angle.pi_coeff in _EXACT_COSINES:
        return CosThreshold(str(angle), _EXACT_COSINES[angle.pi_coeff], ThresholdSide.EXACT)
    step = Fraction(1, 1 << (bits + 1))
    tolerance = Fraction(1, 1 << bits)
    for prec in (bits + 32, 2 * bits + 64, 4 * bits + 128):
        ctx = interval_context(prec)
        low, high = interval_bounds(ctx.cos(angle.interval(ctx)))
        bound = max(Fraction(0), Fraction(math.floor(low / step)) * step)
        if high - bound <= tolerance:
            return CosThreshold(str(angle), bound, ThresholdSide.LOWER_BOUND_OF_COS)
    raise PrecisionError(f"could not bound cos({angle}) to {bits} bits")
