"""Command-line entry point: ``python3 -m acgraph.cli <command> ...``."""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from fractions import Fraction
import json
from pathlib import Path
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .arrangement import build_mesh, euler_check, face_metrics, flatten_to_2d, planarization_report, planarize
from .charging import (
    charge_sum_check,
    discharge_precondition,
    discharge_six_n,
    initial_charges,
    rac_face_conditions,
    verify_discharged,
)
from .constructions import (
    LATTICE_KINDS,
    construct_alpha_ac,
    enumerated_edge_count,
    frame_cover,
    grid_graph,
    lattice_lines,
    lemma_convert_build,
    project,
    search_gamma,
    stacked_grids,
)
from .errors import AcGraphError, PreconditionError
from .exact_geom import AngleSpec, parse_angle, rational_cos_bound
from .fixtures import fixture_names, load_fixture
from .graph_model import GeometricGraph, is_connected, load, save, stats, validate
from .settings import load_settings
from .svg_render import emit_svg
from .utils import append_run_log, rational_str, sha256_file, stable_json, to_rational
from .verify import bound_table, uniform_bound_check, is_alpha_ac

APP_NAME = "acgraph"

EXIT_PASS = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2

CONSTRUCTIONS = ("grid", "stacked", "lattice", "frame", "full", "fixture")

# paths and switches that do not change what a report says
_UNRECORDED = {"command", "handler", "input", "out", "svg", "timing"}


class CliError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass
class RunReport:
    command: str
    parameters: Dict[str, Any]
    input_sha256: Optional[str] = None
    verdicts: Dict[str, Optional[bool]] = field(default_factory=dict)
    counts: Dict[str, int] = field(default_factory=dict)
    result: Dict[str, Any] = field(default_factory=dict)
    timing: Optional[float] = None
    version: str = __version__

    @property
    def exit_code(self) -> int:
        return EXIT_VIOLATION if any(value is False for value in self.verdicts.values()) else EXIT_PASS

    def as_dict(self) -> Dict[str, Any]:
        payload = {
            "tool": APP_NAME,
            "version": self.version,
            "command": self.command,
            "parameters": self.parameters,
            "inputSha256": self.input_sha256,
            "verdicts": self.verdicts,
            "counts": self.counts,
            "result": self.result,
        }
        if self.timing is not None:
            payload["timingSeconds"] = round(self.timing, 3)
        return payload

    def to_json(self) -> str:
        return stable_json(self.as_dict())


def _angle(text: str, flag: str) -> AngleSpec:
    try:
        return parse_angle(text)
    except ValueError as error:
        raise CliError(EXIT_ERROR, f"{flag}: {error}") from error


def _rational(text: Optional[str], flag: str) -> Optional[Fraction]:
    if text is None:
        return None
    try:
        return to_rational(text)
    except ValueError as error:
        raise CliError(EXIT_ERROR, f"{flag}: {error}") from error


def _parameters(args: argparse.Namespace) -> Dict[str, Any]:
    return {key: value for key, value in sorted(vars(args).items()) if key not in _UNRECORDED and value is not None}


def _load_input(args: argparse.Namespace) -> Tuple[GeometricGraph, str]:
    path = Path(args.input)
    if not path.exists():
        raise CliError(EXIT_ERROR, f"input file not found: {path}")
    return load(path), sha256_file(path)


def _plane_graph(g: GeometricGraph, bits: int) -> Tuple[GeometricGraph, Optional[Dict[str, Any]]]:
    if g.dim == 2:
        return g, None
    if g.plane_normal is None:
        raise CliError(EXIT_ERROR, "3D input without plane_normal cannot be drawn in the plane; project it first")
    flattened = flatten_to_2d(g, bits)
    return flattened.graph, flattened.as_dict()


def _violations(g: GeometricGraph) -> List[Dict[str, Any]]:
    return [violation.as_dict() for violation in validate(g)]


# Commands ----------------------------------------------------------------------------


def cmd_generate(args: argparse.Namespace) -> RunReport:
    bits = args.bits
    r = args.r
    k = args.k or r
    t = args.t
    eps = _rational(args.eps, "--eps")
    gamma = _rational(args.gamma, "--gamma")
    result: Dict[str, Any] = {}
    verdicts: Dict[str, Optional[bool]] = {}

    if args.construction == "fixture":
        if not args.name:
            raise CliError(EXIT_ERROR, f"--name is required for fixtures; known: {', '.join(fixture_names())}")
        try:
            g = load_fixture(args.name)
        except KeyError as error:
            raise CliError(EXIT_ERROR, str(error.args[0])) from error
    elif args.construction == "grid":
        g = grid_graph(r, k)
    elif args.construction == "stacked":
        g = stacked_grids(r)
        if gamma is not None:
            g = project(g, gamma)
        elif args.alpha:
            search = search_gamma(g, rational_cos_bound(_angle(args.alpha, "--alpha"), bits), args.max_halvings)
            g = search.graph
            result["certificate"] = search.certificate.as_dict()
            result["trials"] = len(search.trials)
            verdicts["alphaAc"] = search.certificate.verdict
    elif args.construction in ("lattice", "frame"):
        if args.construction == "lattice":
            arrangement = lattice_lines(args.kind, r, bits)
        else:
            if t is None or eps is None:
                raise CliError(EXIT_ERROR, "--t and --eps are required for the frame construction")
            arrangement = frame_cover(t, eps / 2, r)
        g = lemma_convert_build(arrangement, arrangement.t, k)
        expected = enumerated_edge_count(arrangement, k)
        result["arrangement"] = {
            "lines": len(arrangement.lines),
            "coverPoints": len(arrangement.cover_points),
            "metadata": arrangement.metadata,
        }
        result["enumeratedEdges"] = expected
        verdicts["edgeCount"] = g.m == expected
        if gamma is not None:
            g = project(g, gamma)
    else:
        if t is None or eps is None:
            raise CliError(EXIT_ERROR, "--t and --eps are required for the full construction")
        g, certificate = construct_alpha_ac(
            t, eps, r, source=args.source, bits=bits, max_halvings=args.max_halvings
        )
        result["certificate"] = certificate.as_dict()
        verdicts["alphaAc"] = certificate.verdict
        verdicts["edgeCount"] = certificate.m == certificate.enumerated_edges
        verdicts["qBelowHalfR"] = certificate.q_below_half_r

    save(g, args.out)
    if args.svg:
        emit_svg(g, args.svg)
    result["metadata"] = g.metadata
    return RunReport(
        command="generate",
        parameters=_parameters(args),
        verdicts=verdicts,
        counts={"n": g.n, "m": g.m, "dim": g.dim},
        result=result,
    )


def cmd_verify(args: argparse.Namespace) -> RunReport:
    g, digest = _load_input(args)
    alpha = _angle(args.alpha, "--alpha")
    eps = _rational(args.eps, "--eps")
    angle = alpha.plus(-eps) if eps is not None else alpha
    violations = _violations(g)
    report = RunReport(command="verify", parameters=_parameters(args), input_sha256=digest, counts={"n": g.n, "m": g.m})
    report.verdicts["valid"] = not violations
    if violations:
        report.result["violations"] = violations
        return report
    threshold = rational_cos_bound(angle, args.bits)
    certificate = is_alpha_ac(g, threshold, assume_valid=True)
    report.verdicts["alphaAc"] = certificate.verdict
    report.counts["crossingPairs"] = certificate.pair_count
    report.result["certificate"] = certificate.as_dict()
    if args.partition:
        plane, flattened = _plane_graph(g, args.bits)
        try:
            uniform = uniform_bound_check(plane, angle, args.bits)
        except PreconditionError as error:
            report.result["partition"] = {"skipped": error.message}
        else:
            report.verdicts["uniformBound"] = uniform.verdict
            report.result["partition"] = uniform.as_dict()
            if flattened:
                report.result["flatten"] = flattened
    return report


def _mesh_for(args: argparse.Namespace, *, allow_disconnected: bool):
    g, digest = _load_input(args)
    plane, flattened = _plane_graph(g, args.bits)
    p = planarize(plane)
    mesh = build_mesh(p, allow_disconnected=allow_disconnected)
    return g, digest, p, mesh, flattened


def cmd_planarize(args: argparse.Namespace) -> RunReport:
    g, digest, p, mesh, flattened = _mesh_for(args, allow_disconnected=True)
    metrics = face_metrics(mesh)
    result = planarization_report(p, mesh, metrics)
    if flattened:
        result["flatten"] = flattened
    if args.svg:
        emit_svg(p, args.svg)
    connected = p.is_connected()
    return RunReport(
        command="planarize",
        parameters=_parameters(args),
        input_sha256=digest,
        verdicts={"euler": euler_check(mesh).passed if connected else None},
        counts={"n": g.n, "m": g.m, "nodes": len(p.nodes), "arcs": len(p.arcs), "faces": len(mesh.faces)},
        result=result,
    )


def cmd_charge(args: argparse.Namespace) -> RunReport:
    g, digest, p, mesh, flattened = _mesh_for(args, allow_disconnected=True)
    metrics = face_metrics(mesh)
    ledger = initial_charges(mesh, metrics)
    check = charge_sum_check(ledger, mesh)
    report = RunReport(
        command="charge",
        parameters=_parameters(args),
        input_sha256=digest,
        verdicts={"chargeSum": check.verdict},
        counts={"n": g.n, "m": g.m, "faces": len(mesh.faces)},
        result={"ledger": ledger.as_dict(), "identity": check.as_dict()},
    )
    if args.rac:
        if check.verdict is None:
            raise CliError(EXIT_ERROR, f"RAC face conditions need the charge identity: {check.reason}")
        rac = rac_face_conditions(mesh, metrics)
        report.verdicts["rac"] = rac.verdict
        report.result["rac"] = rac.as_dict()
    if flattened:
        report.result["flatten"] = flattened
    return report


def cmd_discharge(args: argparse.Namespace) -> RunReport:
    g, digest, p, mesh, flattened = _mesh_for(args, allow_disconnected=False)
    metrics = face_metrics(mesh)
    threshold = rational_cos_bound(_angle(args.alpha, "--alpha"), args.bits) if args.alpha else None
    if not args.diagnostic:
        ok, sharpest = discharge_precondition(mesh, threshold)
        if not ok:
            raise PreconditionError(
                f"discharging needs an alpha-AC graph with alpha > 2pi/5; max crossing cos^2 {rational_str(sharpest or 0)}"
            )
    ledger = discharge_six_n(mesh, metrics)
    checked = verify_discharged(ledger, metrics, mesh, threshold, diagnostic=args.diagnostic)
    if args.svg:
        emit_svg(ledger, args.svg, mesh=mesh)
    result = {"ledger": ledger.as_dict(trace=args.trace), "checks": checked.as_dict()}
    if flattened:
        result["flatten"] = flattened
    return RunReport(
        command="discharge",
        parameters=_parameters(args),
        input_sha256=digest,
        verdicts={"discharge": checked.verdict},
        counts={"n": g.n, "m": g.m, "faces": len(mesh.faces), "transfers": len(ledger.transfers)},
        result=result,
    )


def cmd_bounds(args: argparse.Namespace) -> RunReport:
    table = bound_table(_angle(args.alpha, "--alpha"), args.n, args.bits)
    result = table.as_dict()
    if args.format == "markdown":
        result["markdown"] = table.as_markdown()
    return RunReport(command="bounds", parameters=_parameters(args), counts={"n": args.n}, result=result)


def cmd_svg(args: argparse.Namespace) -> RunReport:
    g, digest = _load_input(args)
    counts = {"n": g.n, "m": g.m}
    if args.mode == "graph":
        emit_svg(g, args.out)
    else:
        plane, _ = _plane_graph(g, args.bits)
        p = planarize(plane)
        if args.mode == "planarization":
            emit_svg(p, args.out)
            counts["nodes"] = len(p.nodes)
        else:
            mesh = build_mesh(p)
            ledger = discharge_six_n(mesh, face_metrics(mesh))
            emit_svg(ledger, args.out, mesh=mesh)
            counts["transfers"] = len(ledger.transfers)
    return RunReport(command="svg", parameters=_parameters(args), input_sha256=digest, counts=counts)


def cmd_stats(args: argparse.Namespace) -> RunReport:
    g, digest = _load_input(args)
    violations = _violations(g)
    result: Dict[str, Any] = {"violations": violations, "metadata": g.metadata}
    if not violations:
        result["stats"] = stats(g).as_dict()
        result["connected"] = is_connected(g)
    return RunReport(
        command="stats",
        parameters=_parameters(args),
        input_sha256=digest,
        verdicts={"valid": not violations},
        counts={"n": g.n, "m": g.m, "dim": g.dim},
        result=result,
    )


# Parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    settings = load_settings()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bits", type=int, default=settings.bits, help="Precision for symbolic angles")
    common.add_argument("--timing", action="store_true", help="Include wall time in the report")

    parser = argparse.ArgumentParser(prog=APP_NAME, description=f"{APP_NAME} {__version__}: alpha-AC graph toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    generate = sub.add_parser("generate", parents=[common], help="Build a construction and save it as JSON")
    generate.add_argument("--construction", choices=CONSTRUCTIONS, required=True)
    generate.add_argument("--t", type=int, default=None, help="Lines per point / target angle pi/t")
    generate.add_argument("--eps", default=None, help="Angle slack as a rational, e.g. 1/5")
    generate.add_argument("--r", type=int, default=4, help="Grid side")
    generate.add_argument("--k", type=int, default=None, help="Heights per point (defaults to --r)")
    generate.add_argument("--gamma", default=None, help="Projection parameter as a rational")
    generate.add_argument("--alpha", default=None, help="Search gamma for this angle (stacked only)")
    generate.add_argument("--source", choices=("frame", "lattice"), default="frame")
    generate.add_argument("--kind", choices=sorted(LATTICE_KINDS), default="axes")
    generate.add_argument("--name", default=None, help="Fixture name")
    generate.add_argument("--max-halvings", type=int, default=settings.max_halvings)
    generate.add_argument("--out", required=True, help="Graph JSON output path")
    generate.add_argument("--svg", default=None, help="Optional SVG drawing path")
    generate.set_defaults(handler=cmd_generate)

    verify = sub.add_parser("verify", parents=[common], help="Certify the alpha-AC property")
    verify.add_argument("--alpha", required=True)
    verify.add_argument("--eps", default=None)
    verify.add_argument("--partition", action="store_true", help="Also run the direction partition bound")
    verify.add_argument("--out", default=None)
    verify.add_argument("input")
    verify.set_defaults(handler=cmd_verify)

    planarize_cmd = sub.add_parser("planarize", parents=[common], help="Face report of the planarization")
    planarize_cmd.add_argument("--out", default=None)
    planarize_cmd.add_argument("--svg", default=None)
    planarize_cmd.add_argument("input")
    planarize_cmd.set_defaults(handler=cmd_planarize)

    charge = sub.add_parser("charge", parents=[common], help="Initial charges and the 4n-8 identity")
    charge.add_argument("--rac", action="store_true", help="Also run the RAC face conditions")
    charge.add_argument("--out", default=None)
    charge.add_argument("input")
    charge.set_defaults(handler=cmd_charge)

    discharge = sub.add_parser("discharge", parents=[common], help="Discharge 1-triangles and check the result")
    discharge.add_argument("--alpha", default=None, help="Claimed alpha (must exceed 2pi/5)")
    discharge.add_argument("--diagnostic", action="store_true", help="Run even when the precondition fails")
    discharge.add_argument("--trace", action="store_true", help="Include bisector walk traces")
    discharge.add_argument("--out", default=None)
    discharge.add_argument("--svg", default=None)
    discharge.add_argument("input")
    discharge.set_defaults(handler=cmd_discharge)

    bounds = sub.add_parser("bounds", parents=[common], help="Edge bounds known for a given alpha")
    bounds.add_argument("--alpha", required=True)
    bounds.add_argument("--n", type=int, required=True)
    bounds.add_argument("--format", choices=("json", "markdown"), default="json")
    bounds.add_argument("--out", default=None)
    bounds.set_defaults(handler=cmd_bounds)

    draw = sub.add_parser("svg", parents=[common], help="Draw a graph, its planarization or its discharge")
    draw.add_argument("--mode", choices=("graph", "planarization", "discharge"), default="graph")
    draw.add_argument("--out", required=True)
    draw.add_argument("input")
    draw.set_defaults(handler=cmd_svg)

    stats_cmd = sub.add_parser("stats", parents=[common], help="Validation and crossing statistics")
    stats_cmd.add_argument("--out", default=None)
    stats_cmd.add_argument("input")
    stats_cmd.set_defaults(handler=cmd_stats)
    return parser


def _emit(report: RunReport, args: argparse.Namespace) -> None:
    if args.command == "bounds" and args.format == "markdown":
        text = report.result["markdown"]
    else:
        text = report.to_json()
    target = getattr(args, "out", None)
    if target and args.command not in ("generate", "svg"):
        path = Path(target)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        # argparse exits with 2 on usage errors; 2 is reserved for violations here
        return EXIT_PASS if exit_request.code in (0, None) else EXIT_ERROR
    handler: Callable[[argparse.Namespace], RunReport] = args.handler
    started = time.perf_counter()
    try:
        report = handler(args)
        if args.timing:
            report.timing = time.perf_counter() - started
        _emit(report, args)
    except CliError as error:
        status, message = error.status, error.message
    except AcGraphError as error:
        status, message = EXIT_ERROR, error.message
    except OSError as error:
        status, message = EXIT_ERROR, f"{error.strerror or error}: {error.filename or ''}".rstrip(": ")
    else:
        append_run_log(
            args.command, input=report.input_sha256, verdicts=report.verdicts, outcome="ok", exit=report.exit_code
        )
        return report.exit_code
    sys.stderr.write(json.dumps({"error": message}, ensure_ascii=False) + "\n")
    append_run_log(args.command, message, outcome="error", exit=status)
    return status


def main(argv: Optional[Sequence[str]] = None) -> None:
    raise SystemExit(run(argv))


if __name__ == "__main__":
    main()
