"""SVG drawings of graphs, planarizations and discharge ledgers (display only)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import svg

from .arrangement import HalfEdgeMesh, Planarization
from .charging import ChargeLedger
from .errors import AcGraphError
from .graph_model import GeometricGraph

DEFAULT_STYLES: Dict[str, Dict[str, object]] = {
    "edge": {"stroke": "#1f2937", "stroke_width": 1.5},
    "arc": {"stroke": "#1f2937", "stroke_width": 1.5},
    "wedge": {"stroke": "#b45309", "stroke_width": 2.5},
    "transfer": {"stroke": "#dc2626", "stroke_width": 1.5},
    "original-vertex": {"fill": "#1f2937", "stroke": "#1f2937", "stroke_width": 1, "r": 4},
    "crossing-vertex": {"fill": "none", "stroke": "#2563eb", "stroke_width": 1.5, "r": 4},
}


@dataclass(frozen=True)
class SvgScene:
    """Canvas size, per-class styles and the affine world→screen map.

    The transform is fitted to the drawn points and rounded to floats for output only;
    nothing computed here is read back by the exact layers.
    """

    width: int = 800
    height: int = 800
    margin: int = 40
    styles: Dict[str, Dict[str, object]] = field(default_factory=lambda: {k: dict(v) for k, v in DEFAULT_STYLES.items()})
    scale: float = 1.0
    min_x: float = 0.0
    max_y: float = 0.0

    def fitted(self, points: Sequence[Sequence[Fraction]]) -> "SvgScene":
        if not points:
            return self
        xs = [float(p[0]) for p in points]
        ys = [float(p[1]) for p in points]
        span = max(max(xs) - min(xs), max(ys) - min(ys)) or 1.0
        usable = min(self.width, self.height) - 2 * self.margin
        return SvgScene(
            width=self.width,
            height=self.height,
            margin=self.margin,
            styles=self.styles,
            scale=usable / span,
            min_x=min(xs),
            max_y=max(ys),
        )

    def to_screen(self, p: Sequence[Fraction]) -> Tuple[float, float]:
        x = self.margin + (float(p[0]) - self.min_x) * self.scale
        y = self.margin + (self.max_y - float(p[1])) * self.scale
        return round(x, 3), round(y, 3)

    def line(self, a: Sequence[Fraction], b: Sequence[Fraction], css: str, **extra) -> svg.Line:
        (x1, y1), (x2, y2) = self.to_screen(a), self.to_screen(b)
        style = self.styles[css]
        return svg.Line(
            x1=x1,
            y1=y1,
            x2=x2,
            y2=y2,
            stroke=style["stroke"],
            stroke_width=style["stroke_width"],
            class_=[css],
            **extra,
        )

    def dot(self, p: Sequence[Fraction], css: str) -> svg.Circle:
        cx, cy = self.to_screen(p)
        style = self.styles[css]
        return svg.Circle(
            cx=cx,
            cy=cy,
            r=style["r"],
            fill=style["fill"],
            stroke=style["stroke"],
            stroke_width=style["stroke_width"],
            class_=[css],
        )


def _display_points(g: GeometricGraph) -> List[Tuple[Fraction, Fraction]]:
    if g.dim == 2:
        return [(p[0], p[1]) for p in g.vertices]
    if g.plane_normal is not None:
        drop = max(range(3), key=lambda k: abs(g.plane_normal[k]))
        keep = [k for k in range(3) if k != drop]
        return [(p[keep[0]], p[keep[1]]) for p in g.vertices]
    # oblique view of spatial input
    return [(p[0] + p[2] / 2, p[1] + p[2] / 3) for p in g.vertices]


def _graph_elements(g: GeometricGraph, scene: SvgScene) -> Tuple[SvgScene, List[svg.Element]]:
    points = _display_points(g)
    scene = scene.fitted(points)
    elements: List[svg.Element] = [scene.line(points[i], points[j], "edge") for i, j in g.edges]
    elements.extend(scene.dot(p, "original-vertex") for p in points)
    return scene, elements


def _planarization_elements(
    p: Planarization, scene: SvgScene, wedge_arcs: Sequence[int] = ()
) -> Tuple[SvgScene, List[svg.Element]]:
    scene = scene.fitted(p.nodes)
    highlighted = set(wedge_arcs)
    elements: List[svg.Element] = []
    for index, arc in enumerate(p.arcs):
        css = "wedge" if index in highlighted else "arc"
        elements.append(scene.line(p.nodes[arc.u], p.nodes[arc.v], css))
    for node, point in enumerate(p.nodes):
        elements.append(scene.dot(point, "original-vertex" if p.is_original(node) else "crossing-vertex"))
    return scene, elements


def _arrow_marker(scene: SvgScene) -> svg.Defs:
    return svg.Defs(
        elements=[
            svg.Marker(
                id="transfer-head",
                viewBox=svg.ViewBoxSpec(0, 0, 10, 10),
                refX=10,
                refY=5,
                markerWidth=6,
                markerHeight=6,
                orient="auto",
                elements=[
                    svg.Path(
                        d=[svg.MoveTo(0, 0), svg.LineTo(10, 5), svg.LineTo(0, 10), svg.ClosePath()],
                        fill=scene.styles["transfer"]["stroke"],
                    )
                ],
            )
        ]
    )


def _face_centroid(mesh: HalfEdgeMesh, face: int) -> Tuple[Fraction, Fraction]:
    nodes = mesh.planarization.nodes
    corners = [nodes[mesh.origin[h]] for h in mesh.face_walk(face)]
    count = len(corners)
    return (sum(c[0] for c in corners) / count, sum(c[1] for c in corners) / count)


def _ledger_elements(ledger: ChargeLedger, mesh: HalfEdgeMesh, scene: SvgScene) -> Tuple[SvgScene, List[svg.Element]]:
    p = mesh.planarization
    wedge_arcs = []
    for record in ledger.transfers:
        for h in mesh.face_walk(record.to_face):
            if p.is_original(mesh.origin[h]) or p.is_original(mesh.target(h)):
                wedge_arcs.append(mesh.arc_of(h))
    scene, elements = _planarization_elements(p, scene, wedge_arcs)
    if not ledger.transfers:
        return scene, elements
    arrows: List[svg.Element] = [_arrow_marker(scene)]
    for record in ledger.transfers:
        arc = p.arcs[record.exit_arc]
        a, b = p.nodes[arc.u], p.nodes[arc.v]
        midpoint = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        arrows.append(
            scene.line(midpoint, _face_centroid(mesh, record.to_face), "transfer", marker_end="url(#transfer-head)")
        )
    return scene, arrows + elements


def render_svg(
    subject: GeometricGraph | Planarization | ChargeLedger,
    *,
    mesh: Optional[HalfEdgeMesh] = None,
    scene: Optional[SvgScene] = None,
) -> str:
    scene = scene or SvgScene()
    if isinstance(subject, GeometricGraph):
        scene, elements = _graph_elements(subject, scene)
    elif isinstance(subject, Planarization):
        scene, elements = _planarization_elements(subject, scene)
    elif isinstance(subject, ChargeLedger):
        if mesh is None:
            raise AcGraphError("drawing a charge ledger needs the mesh it was computed on")
        scene, elements = _ledger_elements(subject, mesh, scene)
    else:
        raise AcGraphError(f"cannot draw {type(subject).__name__}")
    canvas = svg.SVG(
        width=scene.width,
        height=scene.height,
        viewBox=svg.ViewBoxSpec(0, 0, scene.width, scene.height),
        elements=elements,
    )
    return canvas.as_str() + "\n"


def emit_svg(
    subject: GeometricGraph | Planarization | ChargeLedger,
    path: Path | str,
    *,
    mesh: Optional[HalfEdgeMesh] = None,
    scene: Optional[SvgScene] = None,
) -> str:
    text = render_svg(subject, mesh=mesh, scene=scene)
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    except OSError as error:
        raise AcGraphError(f"cannot write {target}: {error.strerror or error}") from error
    return text
