"""Face charges ch(f) = |f| + v(f) − 4, the RAC face conditions and the 1-triangle discharging walk."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .arrangement import FaceMetrics, HalfEdgeMesh, face_metrics
from .errors import ChargingError, PreconditionError
from .exact_geom import CosThreshold, ThresholdSide, cos2_below_two_pi_fifths, cross2, dot, sign_of_radical_sum
from .utils import rational_str
from .verify import is_alpha_ac

THIRD = Fraction(1, 3)


@dataclass(frozen=True)
class TransferRecord:
    from_face: int
    to_face: int
    exit_arc: int
    exit_half_edge: int
    walk_trace: Tuple[int, ...]
    amount: Fraction = THIRD

    def as_dict(self, trace: bool = True) -> Dict[str, Any]:
        payload = {
            "from": self.from_face,
            "to": self.to_face,
            "exitArc": self.exit_arc,
            "amount": rational_str(self.amount),
        }
        if trace:
            payload["trace"] = list(self.walk_trace)
        return payload


@dataclass(frozen=True)
class ChargeLedger:
    charges: Dict[int, Fraction]
    transfers: Tuple[TransferRecord, ...] = field(default_factory=tuple)

    @property
    def total(self) -> Fraction:
        return sum(self.charges.values(), Fraction(0))

    def as_dict(self, trace: bool = False) -> Dict[str, Any]:
        return {
            "charges": {str(face): rational_str(value) for face, value in sorted(self.charges.items())},
            "total": rational_str(self.total),
            "transfers": [record.as_dict(trace) for record in self.transfers],
        }


def initial_charges(mesh: HalfEdgeMesh, metrics: Sequence[FaceMetrics]) -> ChargeLedger:
    return ChargeLedger({item.face: Fraction(item.walk_length + item.original_steps - 4) for item in metrics})


def _identity_blockers(mesh: HalfEdgeMesh) -> List[str]:
    p = mesh.planarization
    reasons = []
    if not p.is_connected():
        reasons.append("planarization is disconnected")
    if p.multi_crossing_nodes:
        reasons.append(f"crossing nodes where three or more edges meet: {p.multi_crossing_nodes}")
    return reasons


@dataclass(frozen=True)
class ChargeSumReport:
    total: Fraction
    expected: int
    verdict: Optional[bool]
    reason: str = ""

    def as_dict(self) -> Dict[str, Any]:
        return {
            "total": rational_str(self.total),
            "expected": self.expected,
            "verdict": self.verdict,
            "reason": self.reason,
        }


def charge_sum_check(ledger: ChargeLedger, mesh: HalfEdgeMesh) -> ChargeSumReport:
    """Σ ch(f) = 4n − 8; abstains (verdict None) when G′ is disconnected or crossings are not simple."""
    n = mesh.planarization.source.n
    expected = 4 * n - 8
    blockers = _identity_blockers(mesh)
    if blockers:
        return ChargeSumReport(ledger.total, expected, None, "; ".join(blockers))
    return ChargeSumReport(ledger.total, expected, ledger.total == expected)


# RAC ---------------------------------------------------------------------------------

_RIGHT_ANGLE = CosThreshold("pi/2", Fraction(0), ThresholdSide.EXACT)


@dataclass(frozen=True)
class RacReport:
    n: int
    m: int
    three_face_violations: Tuple[int, ...]
    surplus_violations: Tuple[int, ...]
    total_charge: Fraction
    original_step_sum: int
    outer_surplus: Fraction
    case: str
    derived_bound: int

    @property
    def verdict(self) -> bool:
        return (
            not self.three_face_violations
            and not self.surplus_violations
            and self.total_charge == 4 * self.n - 8
            and self.original_step_sum == 2 * self.m
            and self.m <= self.derived_bound
        )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "threeFaceViolations": list(self.three_face_violations),
            "surplusViolations": list(self.surplus_violations),
            "totalCharge": rational_str(self.total_charge),
            "originalStepSum": self.original_step_sum,
            "outerSurplus": rational_str(self.outer_surplus),
            "case": self.case,
            "derivedBound": self.derived_bound,
            "verdict": self.verdict,
        }


def rac_face_conditions(mesh: HalfEdgeMesh, metrics: Sequence[FaceMetrics]) -> RacReport:
    """Face-by-face RAC argument: ch(f) ≥ v(f)/2, plus the outer-face surplus that sharpens 4n−8 to 4n−10."""
    g = mesh.planarization.source
    certificate = is_alpha_ac(g, _RIGHT_ANGLE, assume_valid=True)
    if not certificate.verdict:
        raise PreconditionError(
            f"not a RAC graph: edges {list(certificate.witness)} cross with cos^2 {rational_str(certificate.witness_cos2)}"
        )
    by_face = {item.face: item for item in metrics}
    charge = {item.face: Fraction(item.walk_length + item.original_steps - 4) for item in metrics}
    surplus = {face: charge[face] - Fraction(item.original_steps, 2) for face, item in by_face.items()}

    three_face = tuple(item.face for item in metrics if item.walk_length == 3 and item.original_steps < 2)
    below = tuple(face for face, value in surplus.items() if value < 0)
    total = sum(charge.values(), Fraction(0))
    steps = sum(item.original_steps for item in metrics)

    outer = by_face[mesh.outer_face]
    outer_surplus = surplus[mesh.outer_face]
    # |E| = Σ ch − Σ surplus
    case, guaranteed = "general", Fraction(0)
    if outer_surplus >= 2:
        case, guaranteed = "outer-surplus", Fraction(2)
    elif outer.walk_length == 3 and outer.original_steps == 3:
        neighbours = {mesh.face_of[mesh.twin(h)] for h in mesh.face_walk(mesh.outer_face)}
        neighbours.discard(mesh.outer_face)
        two_triangles = [face for face in neighbours if by_face[face].shape_label == "2-triangle"]
        collected = outer_surplus + sum(
            (surplus[face] for face in neighbours if face not in two_triangles), Fraction(0)
        )
        if len(neighbours) == 3 and len(two_triangles) <= 1 and collected >= Fraction(3, 2):
            case, guaranteed = "outer-3-triangle", Fraction(3, 2)
    derived = math.floor(total - guaranteed)
    return RacReport(
        n=g.n,
        m=g.m,
        three_face_violations=three_face,
        surplus_violations=below,
        total_charge=total,
        original_step_sum=steps,
        outer_surplus=outer_surplus,
        case=case,
        derived_bound=derived,
    )


# 1-triangles and the bisector walk ---------------------------------------------------


@dataclass(frozen=True)
class OneTriangle:
    """A face with |f| = 3 and v(f) = 1: apex x, wedge arcs on e1 and e2, crossing arc on e."""

    face: int
    apex: int
    out_half_edge: int
    cross_half_edge: int
    in_half_edge: int
    e1: int
    e2: int
    e: int


def one_triangles(mesh: HalfEdgeMesh, metrics: Sequence[FaceMetrics]) -> List[OneTriangle]:
    p = mesh.planarization
    found = []
    for item in metrics:
        if item.walk_length != 3 or item.original_steps != 1:
            continue
        walk = mesh.face_walk(item.face)
        start = next(index for index, h in enumerate(walk) if p.is_original(mesh.origin[h]))
        out_h, cross_h, in_h = walk[start], walk[(start + 1) % 3], walk[(start + 2) % 3]
        e1 = p.arcs[mesh.arc_of(out_h)].edge
        e = p.arcs[mesh.arc_of(cross_h)].edge
        e2 = p.arcs[mesh.arc_of(in_h)].edge
        if len({e1, e2, e}) != 3:
            raise ChargingError(f"face {item.face} is not a wedge cut by a third edge (edges {e1}, {e}, {e2})")
        found.append(OneTriangle(item.face, mesh.origin[out_h], out_h, cross_h, in_h, e1, e2, e))
    return found


class _BisectorRay:
    """Ray from the apex along d1/|d1| + d2/|d2|; side tests are exact."""

    def __init__(self, mesh: HalfEdgeMesh, tri: OneTriangle):
        nodes = mesh.planarization.nodes
        self.apex = nodes[tri.apex]
        c1 = nodes[mesh.target(tri.out_half_edge)]
        c2 = nodes[mesh.origin[tri.in_half_edge]]
        self.d1 = (c1[0] - self.apex[0], c1[1] - self.apex[1])
        self.d2 = (c2[0] - self.apex[0], c2[1] - self.apex[1])
        self.norm1 = dot(self.d1, self.d1)
        self.norm2 = dot(self.d2, self.d2)

    def side(self, point: Sequence[Fraction]) -> int:
        w = (point[0] - self.apex[0], point[1] - self.apex[1])
        return sign_of_radical_sum(cross2(self.d1, w), self.norm1, cross2(self.d2, w), self.norm2)


def bisector_walk(mesh: HalfEdgeMesh, tri: OneTriangle, metrics: Sequence[FaceMetrics] | None = None) -> TransferRecord:
    metrics = list(metrics) if metrics is not None else face_metrics(mesh)
    by_face = {item.face: item for item in metrics}
    nodes = mesh.planarization.nodes
    ray = _BisectorRay(mesh, tri)

    def zero_quadrilateral(face: int) -> bool:
        item = by_face[face]
        return item.walk_length == 4 and item.original_steps == 0

    trace = [tri.face]
    crossed = tri.cross_half_edge
    face = mesh.face_of[mesh.twin(crossed)]
    for _ in range(len(mesh.faces) + 1):
        if not zero_quadrilateral(face):
            trace.append(face)
            return TransferRecord(
                from_face=face,
                to_face=tri.face,
                exit_arc=mesh.arc_of(crossed),
                exit_half_edge=mesh.twin(crossed),
                walk_trace=tuple(trace),
            )
        trace.append(face)
        entry = mesh.twin(crossed)
        walk = mesh.face_walk(face)
        for h in walk:
            if ray.side(nodes[mesh.origin[h]]) == 0:
                raise ChargingError(
                    f"bisector of the 1-triangle at face {tri.face} passes through node {mesh.origin[h]} "
                    f"at {nodes[mesh.origin[h]]}"
                )
        exits = [
            h
            for h in walk
            if h != entry and ray.side(nodes[mesh.origin[h]]) * ray.side(nodes[mesh.target(h)]) < 0
        ]
        if len(exits) != 1:
            raise ChargingError(f"bisector leaves face {face} through {len(exits)} arcs; the face is not convex")
        crossed = exits[0]
        face = mesh.face_of[mesh.twin(crossed)]
    raise ChargingError(f"bisector walk from face {tri.face} did not terminate")


def discharge_six_n(mesh: HalfEdgeMesh, metrics: Sequence[FaceMetrics]) -> ChargeLedger:
    blockers = _identity_blockers(mesh)
    if blockers:
        raise PreconditionError("discharging needs a connected planarization with simple crossings: " + "; ".join(blockers))
    ledger = initial_charges(mesh, metrics)
    charges = dict(ledger.charges)
    transfers = []
    for tri in one_triangles(mesh, metrics):
        record = bisector_walk(mesh, tri, metrics)
        charges[record.from_face] -= record.amount
        charges[record.to_face] += record.amount
        transfers.append(record)
    return ChargeLedger(charges, tuple(transfers))


# Verification ------------------------------------------------------------------------


@dataclass(frozen=True)
class FaceCharge:
    face: int
    walk_length: int
    original_steps: int
    shape: str
    outer: bool
    initial: Fraction
    final: Fraction
    out_count: int
    in_count: int

    @property
    def leave_limit(self) -> int:
        if self.original_steps == 0:
            return self.walk_length
        return max(0, self.walk_length - self.original_steps - 1)

    @property
    def flow_limit(self) -> int:
        return 3 * self.walk_length + 2 * self.original_steps - 12

    def as_dict(self) -> Dict[str, Any]:
        return {
            "face": self.face,
            "len": self.walk_length,
            "v": self.original_steps,
            "shape": self.shape,
            "outer": self.outer,
            "initial": rational_str(self.initial),
            "final": rational_str(self.final),
            "out": self.out_count,
            "in": self.in_count,
            "leaveLimit": self.leave_limit,
        }


@dataclass(frozen=True)
class DischargeReport:
    precondition_ok: bool
    sharpest_cos2: Optional[Fraction]
    faces: Tuple[FaceCharge, ...]
    below_claim: Tuple[int, ...]
    large_face_leaks: Tuple[int, ...]
    zero_pentagons: Tuple[int, ...]
    leaking_quadrilaterals: Tuple[int, ...]
    unsettled_one_triangles: Tuple[int, ...]
    zero_triangles: Tuple[int, ...]
    leaving_violations: Tuple[int, ...]
    duplicate_exits: Tuple[Tuple[int, int], ...]
    bad_exit_arcs: Tuple[int, ...]
    flow_violations: Tuple[int, ...]
    total_initial: Fraction
    total_final: Fraction
    identity_expected: Optional[int]
    original_step_sum: int
    n: int
    m: int

    @property
    def conserved(self) -> bool:
        return self.total_initial == self.total_final

    @property
    def edge_bound(self) -> int:
        return 6 * self.n - 12

    @property
    def negative_faces(self) -> List[FaceCharge]:
        return [item for item in self.faces if item.final < 0]

    @property
    def verdict(self) -> bool:
        checks = (
            self.below_claim,
            self.large_face_leaks,
            self.zero_pentagons,
            self.leaking_quadrilaterals,
            self.unsettled_one_triangles,
            self.zero_triangles,
            self.leaving_violations,
            self.duplicate_exits,
            self.bad_exit_arcs,
            self.flow_violations,
        )
        return (
            self.precondition_ok
            and not any(checks)
            and self.conserved
            and self.identity_expected is not None
            and self.total_initial == self.identity_expected
            and self.original_step_sum == 2 * self.m
            and self.m <= self.edge_bound
        )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "preconditionOk": self.precondition_ok,
            "sharpestCos2": rational_str(self.sharpest_cos2) if self.sharpest_cos2 is not None else None,
            "faces": [item.as_dict() for item in self.faces],
            "belowClaim": list(self.below_claim),
            "observations": {
                "largeFaceLeaks": list(self.large_face_leaks),
                "zeroPentagons": list(self.zero_pentagons),
                "leakingZeroQuadrilaterals": list(self.leaking_quadrilaterals),
                "unsettledOneTriangles": list(self.unsettled_one_triangles),
                "zeroTriangles": list(self.zero_triangles),
            },
            "leavingViolations": list(self.leaving_violations),
            "duplicateExits": [list(item) for item in self.duplicate_exits],
            "badExitArcs": list(self.bad_exit_arcs),
            "flowViolations": list(self.flow_violations),
            "negativeFaces": [item.face for item in self.negative_faces],
            "totalInitial": rational_str(self.total_initial),
            "totalFinal": rational_str(self.total_final),
            "identityExpected": self.identity_expected,
            "originalStepSum": self.original_step_sum,
            "edgeBound": self.edge_bound,
            "m": self.m,
            "verdict": self.verdict,
        }


def discharge_precondition(mesh: HalfEdgeMesh, alpha_threshold: CosThreshold | None = None) -> Tuple[bool, Optional[Fraction]]:
    """Whether the input is αAC for some α > 2π/5, judged by its own sharpest crossing."""
    g = mesh.planarization.source
    sharpest = is_alpha_ac(g, CosThreshold("0", Fraction(1), ThresholdSide.EXACT), assume_valid=True).sharpest_cos2
    ok = sharpest is None or cos2_below_two_pi_fifths(sharpest)
    if alpha_threshold is not None:
        bound2 = alpha_threshold.cos_bound * alpha_threshold.cos_bound
        ok = ok and alpha_threshold.cos_bound >= 0 and cos2_below_two_pi_fifths(bound2)
        ok = ok and (sharpest is None or sharpest <= bound2)
    return ok, sharpest


def verify_discharged(
    ledger: ChargeLedger,
    metrics: Sequence[FaceMetrics],
    mesh: HalfEdgeMesh,
    alpha_threshold: CosThreshold | None = None,
    *,
    diagnostic: bool = False,
) -> DischargeReport:
    ok, sharpest = discharge_precondition(mesh, alpha_threshold)
    if not ok and not diagnostic:
        label = alpha_threshold.alpha_label if alpha_threshold else "the sharpest crossing"
        raise PreconditionError(
            f"discharging needs an alpha-AC graph with alpha > 2pi/5; {label} fails (max cos^2 {rational_str(sharpest or 0)})"
        )
    p = mesh.planarization
    g = p.source
    out_count = Counter(record.from_face for record in ledger.transfers)
    in_count = Counter(record.to_face for record in ledger.transfers)
    faces = tuple(
        FaceCharge(
            face=item.face,
            walk_length=item.walk_length,
            original_steps=item.original_steps,
            shape=item.shape_label,
            outer=item.is_outer,
            initial=Fraction(item.walk_length + item.original_steps - 4),
            final=ledger.charges[item.face],
            out_count=out_count[item.face],
            in_count=in_count[item.face],
        )
        for item in metrics
    )
    exit_uses = Counter((record.from_face, record.exit_arc) for record in ledger.transfers)
    bad_arcs = tuple(
        index
        for index, record in enumerate(ledger.transfers)
        if p.is_original(p.arcs[record.exit_arc].u) or p.is_original(p.arcs[record.exit_arc].v)
    )
    identity_expected = 4 * g.n - 8 if not _identity_blockers(mesh) else None
    return DischargeReport(
        precondition_ok=ok,
        sharpest_cos2=sharpest,
        faces=faces,
        below_claim=tuple(item.face for item in faces if item.final < Fraction(item.original_steps, 3)),
        large_face_leaks=tuple(item.face for item in faces if item.walk_length >= 6 and item.out_count > item.walk_length),
        zero_pentagons=tuple(item.face for item in faces if item.walk_length == 5 and item.original_steps == 0),
        leaking_quadrilaterals=tuple(
            item.face for item in faces if item.walk_length == 4 and item.original_steps == 0 and item.out_count
        ),
        unsettled_one_triangles=tuple(
            item.face for item in faces if item.walk_length == 3 and item.original_steps == 1 and item.final != THIRD
        ),
        zero_triangles=tuple(item.face for item in faces if item.walk_length == 3 and item.original_steps == 0),
        leaving_violations=tuple(item.face for item in faces if item.out_count > item.leave_limit),
        duplicate_exits=tuple(sorted(key for key, uses in exit_uses.items() if uses > 1)),
        bad_exit_arcs=bad_arcs,
        flow_violations=tuple(item.face for item in faces if item.out_count - item.in_count > item.flow_limit),
        total_initial=sum((item.initial for item in faces), Fraction(0)),
        total_final=ledger.total,
        identity_expected=identity_expected,
        original_step_sum=sum(item.original_steps for item in faces),
        n=g.n,
        m=g.m,
    )
