"""Named fixture graphs used by the cli and the test-suite."""

from __future__ import annotations

from typing import Callable, Dict, List

from .graph_model import GeometricGraph, make_graph


def _fixture(name: str, vertices, edges) -> GeometricGraph:
    return make_graph(vertices, edges, dim=2, metadata={"construction": "fixture", "fixture": name})


def plane_triangle() -> GeometricGraph:
    return _fixture("plane_triangle", [(0, 0), (4, 0), (0, 4)], [(0, 1), (1, 2), (0, 2)])


def x_cross() -> GeometricGraph:
    return _fixture("x_cross", [(0, 0), (2, 2), (0, 2), (2, 0)], [(0, 1), (2, 3)])


def k4_square() -> GeometricGraph:
    """Unit square with both diagonals: one orthogonal crossing."""
    return _fixture(
        "k4_square",
        [(0, 0), (1, 0), (1, 1), (0, 1)],
        [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 3)],
    )


def one_triangle_wedge() -> GeometricGraph:
    """Wedge at the origin cut by a vertical edge; the single 1-triangle drains the outer face."""
    return _fixture(
        "one_triangle_wedge",
        [(0, 0), (6, -1), (6, 1), (3, -2), (3, 2)],
        [(0, 1), (0, 2), (3, 4)],
    )


def narrow_wedge() -> GeometricGraph:
    return _fixture(
        "narrow_wedge",
        [(0, 0), (4, 0), (4, 2), (3, -1), (3, 3)],
        [(0, 1), (0, 2), (3, 4)],
    )


def quad_ladder() -> GeometricGraph:
    """Wedge crossed by three verticals and closed by a slanted edge.

    The bisector of the first 1-triangle passes two 0-quadrilaterals and stops in a
    1-quadrilateral.
    """
    return _fixture(
        "quad_ladder",
        [(0, 0), (12, -2), (12, 2), (3, -3), (3, 3), (6, -3), (6, 3), (9, -3), (9, 3), (10, 4)],
        [(0, 1), (0, 2), (3, 4), (5, 6), (7, 8), (1, 9)],
    )


def concurrent_three() -> GeometricGraph:
    """Three segments through the origin at directions near 0, π/3 and 2π/3."""
    return _fixture(
        "concurrent_three",
        [(-2, 0), (2, 0), (-4, -7), (4, 7), (4, -7), (-4, 7)],
        [(0, 1), (2, 3), (4, 5)],
    )


def pentagram() -> GeometricGraph:
    """Regular pentagram rounded to integers; its crossings meet at about 2π/5 and its tips at π/5."""
    points = [(0, 1000), (-951, 309), (-588, -809), (588, -809), (951, 309)]
    return _fixture("pentagram", points, [(k, (k + 2) % 5) for k in range(5)])


def plane_triangulation() -> GeometricGraph:
    return _fixture(
        "plane_triangulation",
        [(0, 0), (6, 0), (0, 6), (1, 1)],
        [(0, 1), (1, 2), (0, 2), (0, 3), (1, 3), (2, 3)],
    )


FIXTURES: Dict[str, Callable[[], GeometricGraph]] = {
    "plane_triangle": plane_triangle,
    "x_cross": x_cross,
    "k4_square": k4_square,
    "one_triangle_wedge": one_triangle_wedge,
    "narrow_wedge": narrow_wedge,
    "quad_ladder": quad_ladder,
    "concurrent_three": concurrent_three,
    "pentagram": pentagram,
    "plane_triangulation": plane_triangulation,
}


def fixture_names() -> List[str]:
    return sorted(FIXTURES)


def load_fixture(name: str) -> GeometricGraph:
    builder = FIXTURES.get(name)
    if builder is None:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(fixture_names())}")
    return builder()
