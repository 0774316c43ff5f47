import unittest
from fractions import Fraction
from itertools import combinations

from acgraph.constructions import (
    LATTICE_KINDS,
    build_arrangement,
    boundary_band,
    certify_coverage,
    choose_gamma,
    construct_alpha_ac,
    enumerated_edge_count,
    frame_cover,
    frame_q_bound,
    grid_edge_count,
    grid_graph,
    lattice_lines,
    lemma_convert_build,
    project,
    search_gamma,
    stacked_grids,
    t_frame,
)
from acgraph.errors import ConstructionError, ProjectionError
from acgraph.exact_geom import AngleSpec, crossing_angle_at_least, rational_cos_bound
from acgraph.graph_model import crossing_pairs, graph_to_dict, validate
from acgraph.verify import is_alpha_ac

_STEPS = {(0, 1), (1, 1), (1, 2)}


def brute_force_stacked_edges(r):
    """Pairs of cube points adjacent in a plane x = c (row z, column y) or y = c (row z, column x)."""
    points = [(x, y, z) for x in range(r) for y in range(r) for z in range(r)]
    found = set()
    for p, q in combinations(points, 2):
        for a, b in ((p, q), (q, p)):
            if a[0] == b[0] and (b[2] - a[2], b[1] - a[1]) in _STEPS:
                found.add(frozenset((a, b)))
            if a[1] == b[1] and (b[2] - a[2], b[0] - a[0]) in _STEPS:
                found.add(frozenset((a, b)))
    return found


class GridTests(unittest.TestCase):
    def test_grid_counts(self):
        g = grid_graph(3, 3)
        self.assertEqual(g.n, 9)
        self.assertEqual(g.m, 12)
        self.assertEqual(grid_edge_count(3, 3), 12)
        self.assertEqual(grid_edge_count(1, 5), 4)
        self.assertEqual(grid_edge_count(4, 1), 0)
        self.assertEqual(validate(g), [])
        self.assertEqual(crossing_pairs(g), [])

    def test_line_plane_count_formula(self):
        for p in range(2, 7):
            for k in range(2, 7):
                with self.subTest(p=p, k=k):
                    self.assertEqual(grid_edge_count(k, p), 3 * p * k - 4 * k - 2 * p + 3)

    def test_grid_rejects_empty(self):
        with self.assertRaises(ConstructionError):
            grid_graph(0, 3)


class StackedGridTests(unittest.TestCase):
    def test_counts_match_formula_and_brute_force(self):
        for r in (2, 3, 4):
            with self.subTest(r=r):
                g = stacked_grids(r)
                self.assertEqual(g.n, r**3)
                self.assertEqual(g.m, 2 * r * (3 * r * r - 6 * r + 3))
                edges = {frozenset((g.vertices[i], g.vertices[j])) for i, j in g.edges}
                self.assertEqual(edges, {frozenset(tuple(map(Fraction, p)) for p in pair) for pair in brute_force_stacked_edges(r)})

    def test_vertex_labels(self):
        g = stacked_grids(3)
        self.assertEqual(g.vertices[(1 * 3 + 2) * 3 + 0], (1, 2, 0))
        self.assertEqual(g.metadata, {"construction": "stacked", "r": 3})

    def test_projection_errors(self):
        with self.assertRaises(ProjectionError) as caught:
            project(stacked_grids(2), Fraction(-1, 8))
        self.assertEqual(caught.exception.kind, "gamma")
        with self.assertRaises(ProjectionError) as caught:
            project(stacked_grids(2), Fraction(0))
        self.assertEqual(caught.exception.kind, "duplicate-point")
        self.assertEqual(caught.exception.pair, (0, 1))
        with self.assertRaises(ProjectionError):
            project(grid_graph(2, 2), Fraction(1, 8))

    def test_projection_is_coplanar(self):
        g = project(stacked_grids(3), Fraction(1, 100))
        self.assertEqual(g.plane_normal, (Fraction(1, 100), Fraction(1, 100), 1))
        self.assertEqual(validate(g), [])
        self.assertEqual(g.metadata["gamma"], "1/100")
        self.assertEqual((g.n, g.m), (27, 72))

    def test_gamma_search(self):
        target = rational_cos_bound("pi/2-1/10")
        search = search_gamma(stacked_grids(3), target)
        self.assertTrue(search.certificate.verdict)
        self.assertEqual(search.trials[-1].outcome, "pass")
        self.assertTrue(is_alpha_ac(search.graph, target).verdict)
        self.assertEqual(choose_gamma(stacked_grids(3), target), search.gamma)
        self.assertFalse(is_alpha_ac(search.graph, rational_cos_bound("pi/2")).verdict)

    def test_gamma_search_gives_up(self):
        with self.assertRaises(ConstructionError) as caught:
            search_gamma(stacked_grids(3), rational_cos_bound("pi/2"), max_halvings=2)
        self.assertEqual(caught.exception.stage, "choose_gamma")


class LatticeTests(unittest.TestCase):
    def test_axes_lattice(self):
        arrangement = lattice_lines("axes", 4)
        self.assertEqual(len(arrangement.cover_points), 16)
        self.assertEqual(len(arrangement.lines), 8)
        self.assertEqual(arrangement.t, 2)
        certificate = certify_coverage(arrangement, 2)
        self.assertTrue(certificate.passed)
        self.assertEqual(certificate.min_incidence, 2)

    def test_triangular_lattice(self):
        arrangement = lattice_lines("triangular", 3)
        self.assertEqual(len(arrangement.cover_points), 9)
        self.assertEqual(len(arrangement.lines), 11)
        self.assertTrue(certify_coverage(arrangement, 3).passed)

    def test_every_kind_covers_with_its_family_count(self):
        for kind, families in LATTICE_KINDS.items():
            with self.subTest(kind=kind):
                arrangement = lattice_lines(kind, 3)
                self.assertEqual(arrangement.t, len(families))
                self.assertEqual(certify_coverage(arrangement, len(families)).min_incidence, len(families))

    def test_unknown_kind(self):
        with self.assertRaises(ConstructionError):
            lattice_lines("hexagonal", 3)


class FrameTests(unittest.TestCase):
    def test_frame_for_three_lines(self):
        frame = t_frame(3, Fraction(1, 5))
        self.assertEqual(frame.points, ((1, 0), (2, 3), (-2, 3)))
        self.assertEqual(frame.q, 3)
        self.assertLessEqual(frame.q, frame_q_bound(Fraction(1, 5)))
        threshold = rational_cos_bound(AngleSpec(Fraction(1, 3), Fraction(-1, 5)))
        for a, b in combinations(frame.lines, 2):
            self.assertTrue(crossing_angle_at_least(a.dir, b.dir, threshold))

    def test_frame_for_two_lines(self):
        frame = t_frame(2, Fraction(1, 10))
        self.assertEqual(frame.points, ((1, 0), (0, 1)))
        self.assertEqual(frame.q, 1)

    def test_frame_rejects_wide_delta(self):
        with self.assertRaises(ConstructionError):
            t_frame(3, Fraction(11, 10))
        with self.assertRaises(ConstructionError):
            t_frame(1, Fraction(1, 10))

    def test_boundary_band(self):
        self.assertEqual(len(boundary_band(4, 1)), 16)
        band = boundary_band(10, 1)
        self.assertEqual(len(band), 100 - 36)
        self.assertNotIn((5, 5), band)

    def test_frame_cover_reaches_every_point(self):
        frame = t_frame(3, Fraction(1, 5))
        arrangement = frame_cover(3, Fraction(1, 5), 6 * frame.q, frame)
        self.assertEqual(len(arrangement.cover_points), (6 * frame.q) ** 2)
        certificate = certify_coverage(arrangement, 3)
        self.assertTrue(certificate.passed)
        self.assertGreaterEqual(certificate.min_incidence, 3)


class LineToPlaneBuilderTests(unittest.TestCase):
    def test_axes_build_is_the_stacked_grid(self):
        arrangement = lattice_lines("axes", 3)
        g = lemma_convert_build(arrangement, 2, 3)
        self.assertEqual((g.n, g.m), (27, 72))
        self.assertEqual(enumerated_edge_count(arrangement, 3), 72)
        self.assertEqual(validate(g), [])

    def test_frame_pipeline_with_two_lines_matches_stacked_grids(self):
        arrangement = build_arrangement(2, Fraction(1, 10), 4)
        g = lemma_convert_build(arrangement, 2, 4)
        self.assertEqual((g.n, g.m), (64, 216))
        reference = stacked_grids(4)
        self.assertEqual(set(g.vertices), set(reference.vertices))
        self.assertEqual(
            {frozenset((g.vertices[i], g.vertices[j])) for i, j in g.edges},
            {frozenset((reference.vertices[i], reference.vertices[j])) for i, j in reference.edges},
        )

    def test_builder_rejects_small_k(self):
        with self.assertRaises(ConstructionError):
            lemma_convert_build(lattice_lines("axes", 3), 2, 1)

    def test_builder_rejects_undercovered_points(self):
        with self.assertRaises(ConstructionError):
            lemma_convert_build(lattice_lines("axes", 3), 3, 3)


class FullPipelineTests(unittest.TestCase):
    def test_two_directions(self):
        g, certificate = construct_alpha_ac(2, Fraction(1, 5), 4)
        self.assertTrue(certificate.verdict)
        self.assertEqual(certificate.m, certificate.enumerated_edges)
        self.assertEqual((g.n, g.m), (64, 216))
        self.assertGreaterEqual(certificate.density, 3)
        self.assertTrue(is_alpha_ac(g, certificate.threshold).verdict)
        self.assertEqual(g.metadata["construction"], "full")
        self.assertEqual(graph_to_dict(g)["dim"], 3)

    def test_frame_bound_against_grid_side(self):
        # t=2 frames have q=1, so the bound holds from r=3 on
        _, tight = construct_alpha_ac(2, Fraction(1, 5), 2)
        self.assertEqual(tight.q, 1)
        self.assertFalse(tight.q_below_half_r)
        _, roomy = construct_alpha_ac(2, Fraction(1, 5), 3)
        self.assertTrue(roomy.q_below_half_r)
        self.assertEqual(roomy.as_dict()["qBelowHalfR"], True)
        self.assertEqual(roomy.as_dict()["q"], 1)

    def test_small_grid_for_three_directions_is_flagged(self):
        _, certificate = construct_alpha_ac(3, Fraction(2, 5), 4)
        self.assertEqual(certificate.q, t_frame(3, Fraction(1, 5)).q)
        self.assertFalse(certificate.q_below_half_r)
        self.assertTrue(certificate.verdict)
        self.assertLess(certificate.density, 3 * 3 - 3)

    def test_lattice_source_has_no_frame_bound(self):
        _, certificate = construct_alpha_ac(2, Fraction(1, 5), 3, source="lattice")
        self.assertIsNone(certificate.q)
        self.assertIsNone(certificate.q_below_half_r)

    def test_eps_must_stay_below_pi_over_t(self):
        with self.assertRaises(ConstructionError):
            construct_alpha_ac(2, Fraction(2), 4)
        with self.assertRaises(ConstructionError):
            construct_alpha_ac(2, Fraction(0), 4)


if __name__ == "__main__":
    unittest.main()
