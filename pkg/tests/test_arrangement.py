import unittest
from collections import Counter
from fractions import Fraction

from hypothesis import HealthCheck, assume, given, settings, strategies as st

from acgraph.arrangement import (
    Arc,
    build_mesh,
    euler_check,
    face_metrics,
    flatten_to_2d,
    planarization_report,
    planarize,
    shape_label,
)
from acgraph.constructions import project, stacked_grids
from acgraph.errors import MeshError
from acgraph.fixtures import fixture_names, load_fixture
from acgraph.graph_model import crossing_pairs, make_graph, validate


def connected_drawings():
    """Random straight-line drawings whose abstract graph is connected (a path plus chords)."""

    @st.composite
    def build(draw):
        points = draw(
            st.lists(st.tuples(st.integers(-30, 30), st.integers(-30, 30)), min_size=3, max_size=8, unique=True)
        )
        n = len(points)
        raw = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=6))
        chords = sorted({(min(a, b), max(a, b)) for a, b in raw if abs(a - b) > 1})
        edges = [(i, i + 1) for i in range(n - 1)] + chords
        return make_graph(points, edges)

    return build()


class PlanarizeTests(unittest.TestCase):
    def test_x_cross(self):
        p = planarize(load_fixture("x_cross"))
        self.assertEqual(len(p.nodes), 5)
        self.assertEqual(p.nodes[2], (1, 1))
        self.assertEqual(p.kind(2), "crossing")
        self.assertEqual(p.crossing_nodes, [2])
        self.assertEqual(p.arcs, (Arc(0, 2, 0), Arc(2, 4, 0), Arc(1, 2, 1), Arc(2, 3, 1)))
        self.assertEqual(p.crossings, ((0, 1),))
        self.assertTrue(p.is_connected())

    def test_pentagram_sizes(self):
        p = planarize(load_fixture("pentagram"))
        self.assertEqual(len(p.nodes), 10)
        self.assertEqual(len(p.arcs), 15)
        self.assertEqual(p.multi_crossing_nodes, [])

    def test_concurrent_segments_share_one_node(self):
        p = planarize(load_fixture("concurrent_three"))
        self.assertEqual(len(p.nodes), 7)
        self.assertEqual(len(p.crossings), 3)
        self.assertEqual(len(p.multi_crossing_nodes), 1)
        self.assertEqual(p.nodes[p.multi_crossing_nodes[0]], (0, 0))
        self.assertEqual(p.degrees()[p.multi_crossing_nodes[0]], 6)

    def test_rejects_spatial_input(self):
        with self.assertRaises(MeshError):
            planarize(stacked_grids(2))

    def test_arc_segments_follow_the_edge(self):
        p = planarize(load_fixture("one_triangle_wedge"))
        vertical = [index for index, arc in enumerate(p.arcs) if arc.edge == 2]
        self.assertEqual(len(vertical), 3)
        ys = [p.arc_segment(index).a[1] for index in vertical]
        self.assertEqual(ys, [Fraction(-2), Fraction(-1, 2), Fraction(1, 2)])


class MeshTests(unittest.TestCase):
    def test_plane_triangle_faces(self):
        mesh = build_mesh(planarize(load_fixture("plane_triangle")))
        metrics = face_metrics(mesh)
        self.assertEqual(len(metrics), 2)
        self.assertEqual([item.shape_label for item in metrics], ["3-triangle", "3-triangle"])
        self.assertEqual(sum(item.is_outer for item in metrics), 1)
        self.assertTrue(euler_check(mesh).passed)

    def test_x_cross_has_a_single_face(self):
        mesh = build_mesh(planarize(load_fixture("x_cross")))
        (only,) = face_metrics(mesh)
        self.assertEqual((only.walk_length, only.original_steps, only.is_outer), (8, 4, True))

    def test_k4_square_faces(self):
        mesh = build_mesh(planarize(load_fixture("k4_square")))
        metrics = face_metrics(mesh)
        shapes = Counter(item.shape_label for item in metrics)
        self.assertEqual(shapes, Counter({"2-triangle": 4, "4-quadrilateral": 1}))
        outer = metrics[mesh.outer_face]
        self.assertEqual(outer.shape_label, "4-quadrilateral")

    def test_pentagram_faces(self):
        mesh = build_mesh(planarize(load_fixture("pentagram")))
        metrics = face_metrics(mesh)
        shapes = Counter(item.shape_label for item in metrics)
        self.assertEqual(shapes, Counter({"1-triangle": 5, "0-pentagon": 1, "5-10-gon": 1}))
        self.assertEqual(metrics[mesh.outer_face].shape_label, "5-10-gon")

    def test_quad_ladder_faces(self):
        mesh = build_mesh(planarize(load_fixture("quad_ladder")))
        shapes = Counter(item.shape_label for item in face_metrics(mesh))
        self.assertEqual(shapes["1-triangle"], 1)
        self.assertEqual(shapes["0-quadrilateral"], 2)
        self.assertEqual(shapes["1-quadrilateral"], 1)
        self.assertEqual(len(mesh.faces), 5)

    def test_face_walks_use_every_half_edge_once(self):
        for name in fixture_names():
            with self.subTest(fixture=name):
                p = planarize(load_fixture(name))
                if not p.is_connected():
                    continue
                mesh = build_mesh(p)
                seen = Counter(h for face in range(len(mesh.faces)) for h in mesh.face_walk(face))
                self.assertEqual(sorted(seen), list(range(mesh.half_edge_count)))
                self.assertEqual(set(seen.values()), {1})
                self.assertTrue(euler_check(mesh).passed)

    def test_disconnected_input(self):
        g = make_graph([(0, 0), (1, 0), (0, 5), (1, 5)], [(0, 1), (2, 3)])
        with self.assertRaises(MeshError):
            build_mesh(planarize(g))
        mesh = build_mesh(planarize(g), allow_disconnected=True)
        self.assertFalse(euler_check(mesh).passed)

    def test_isolated_top_vertex_leaves_the_outer_face_alone(self):
        triangle = [(0, 0), (4, 0), (2, 3)]
        for edges in ([(0, 1), (1, 2), (0, 2)], [(0, 2), (1, 2), (0, 1)]):
            with self.subTest(edges=edges):
                alone = build_mesh(planarize(make_graph(triangle, edges)))
                mesh = build_mesh(planarize(make_graph(triangle + [(2, 10)], edges)), allow_disconnected=True)
                self.assertEqual(mesh.outer_face, alone.outer_face)
                self.assertEqual(mesh.face_walk(mesh.outer_face), alone.face_walk(alone.outer_face))

    def test_shape_labels(self):
        self.assertEqual(shape_label(3, 1), "1-triangle")
        self.assertEqual(shape_label(4, 0), "0-quadrilateral")
        self.assertEqual(shape_label(9, 2), "2-9-gon")

    def test_report(self):
        p = planarize(load_fixture("k4_square"))
        mesh = build_mesh(p)
        report = planarization_report(p, mesh, face_metrics(mesh))
        self.assertEqual(report["nodes"], 5)
        self.assertEqual(report["crossingNodes"], 1)
        self.assertEqual(report["maxCrossingDegree"], 4)
        self.assertEqual(report["arcs"], 8)
        self.assertEqual(len(report["faces"]), 5)
        self.assertTrue(report["euler"]["passed"])

    @given(connected_drawings())
    @settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
    def test_euler_on_random_drawings(self, g):
        assume(validate(g) == [])
        mesh = build_mesh(planarize(g))
        report = euler_check(mesh)
        self.assertEqual(report.characteristic, 2)
        self.assertEqual(report.walk_sum, 2 * len(mesh.planarization.arcs))


class FlattenTests(unittest.TestCase):
    def test_plane_input_is_unchanged(self):
        g = load_fixture("x_cross")
        report = flatten_to_2d(g)
        self.assertIs(report.graph, g)
        self.assertEqual(report.basis_error, 0)

    def test_horizontal_plane_drops_z(self):
        g = make_graph([(0, 0, 3), (2, 2, 3), (0, 2, 3), (2, 0, 3)], [(0, 1), (2, 3)], dim=3,
                       plane_normal=(0, 0, 1), plane_offset=3)
        report = flatten_to_2d(g)
        self.assertEqual(report.graph.vertices, load_fixture("x_cross").vertices)
        self.assertEqual(report.stats.crossing_count, 1)

    def test_tilted_plane_keeps_crossings(self):
        projected = project(stacked_grids(3), Fraction(1, 100))
        report = flatten_to_2d(projected, 64)
        self.assertEqual(report.graph.dim, 2)
        self.assertEqual(validate(report.graph), [])
        self.assertEqual(report.stats.crossing_count, len(crossing_pairs(projected)))
        self.assertLess(report.basis_error, Fraction(1, 2**60))
        self.assertEqual(report.snap_step, Fraction(1, 2**64))

    def test_spatial_input_is_rejected(self):
        with self.assertRaises(MeshError):
            flatten_to_2d(stacked_grids(2))


if __name__ == "__main__":
    unittest.main()
