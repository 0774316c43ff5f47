import unittest
from fractions import Fraction
from itertools import combinations

from acgraph.arrangement import build_mesh, euler_check, face_metrics, flatten_to_2d, planarize
from acgraph.charging import charge_sum_check, discharge_six_n, initial_charges, verify_discharged
from acgraph.constructions import (
    build_arrangement,
    certify_coverage,
    construct_alpha_ac,
    frame_cover,
    frame_q_bound,
    lattice_lines,
    lemma_convert_build,
    project,
    rotate_arrangement,
    search_gamma,
    stacked_grids,
    t_frame,
)
from acgraph.exact_geom import AngleSpec, crossing_angle_at_least, rational_cos_bound
from acgraph.fixtures import load_fixture
from acgraph.graph_model import crossing_pairs, validate
from acgraph.verify import is_alpha_ac


class StackedPipelineTests(unittest.TestCase):
    def test_stacked_counts(self):
        for r in (3, 4, 6):
            with self.subTest(r=r):
                g = stacked_grids(r)
                self.assertEqual((g.n, g.m), (r**3, 2 * r * (3 * r * r - 6 * r + 3)))
                self.assertEqual(validate(g), [])

    def test_projected_stacked_grid_is_nearly_right_angled(self):
        g = project(stacked_grids(6), Fraction(1, 100))
        self.assertEqual((g.n, g.m), (216, 900))
        self.assertTrue(is_alpha_ac(g, rational_cos_bound("pi/2-1/10")).verdict)

    def test_gamma_search_then_flatten_keeps_the_charge_identity(self):
        search = search_gamma(stacked_grids(4), rational_cos_bound("pi/2-1/4"))
        self.assertLessEqual(search.gamma.denominator, 2**12)
        report = flatten_to_2d(search.graph)
        self.assertEqual(report.stats.crossing_count, len(crossing_pairs(search.graph)))
        p = planarize(report.graph)
        mesh = build_mesh(p)
        self.assertTrue(euler_check(mesh).passed)
        check = charge_sum_check(initial_charges(mesh, face_metrics(mesh)), mesh)
        if p.multi_crossing_nodes:
            self.assertIsNone(check.verdict)
        else:
            self.assertTrue(check.verdict)
            self.assertEqual(check.total, 4 * 64 - 8)


class FramePipelineTests(unittest.TestCase):
    def test_frames_meet_their_angle_bound(self):
        for t, delta in ((3, Fraction(1, 5)), (4, Fraction(1, 10)), (6, Fraction(1, 20))):
            with self.subTest(t=t):
                frame = t_frame(t, delta)
                self.assertEqual(len(frame.points), t)
                self.assertLessEqual(frame.q, frame_q_bound(delta))
                threshold = rational_cos_bound(AngleSpec(Fraction(1, t), -delta))
                for a, b in combinations(frame.lines, 2):
                    self.assertTrue(crossing_angle_at_least(a.dir, b.dir, threshold))
                arrangement = frame_cover(t, delta, 6 * frame.q, frame)
                self.assertEqual(len(arrangement.cover_points), (6 * frame.q) ** 2)
                certificate = certify_coverage(arrangement, t)
                self.assertTrue(certificate.passed)
                self.assertGreaterEqual(certificate.min_incidence, t)

    def test_four_line_frame(self):
        frame = t_frame(4, Fraction(1, 10))
        self.assertEqual(frame.points, ((1, 0), (1, 1), (0, 1), (-1, 1)))
        self.assertEqual(frame.q, 1)

    def test_rotation_keeps_incidences(self):
        arrangement = lattice_lines("axes+diagonals", 3)
        turned = rotate_arrangement(arrangement, Fraction(3, 5), Fraction(4, 5))
        self.assertEqual(len(turned.lines), len(arrangement.lines))
        self.assertTrue(certify_coverage(turned, 4).passed)
        self.assertNotIn((1, 1), {tuple(line.dir) for line in turned.lines})
        self.assertEqual(lemma_convert_build(turned, 4, 3).m, lemma_convert_build(arrangement, 4, 3).m)


class FullPipelineTests(unittest.TestCase):
    def test_construct_for_small_t(self):
        for t, eps, r in ((2, Fraction(1, 5), 4), (3, Fraction(2, 5), 4), (4, Fraction(1, 5), 3)):
            with self.subTest(t=t):
                g, certificate = construct_alpha_ac(t, eps, r)
                self.assertTrue(certificate.verdict)
                self.assertEqual(certificate.m, certificate.enumerated_edges)
                self.assertEqual(g.n, r**3)
                threshold = rational_cos_bound(AngleSpec(Fraction(1, t), -eps))
                self.assertTrue(is_alpha_ac(g, threshold).verdict)

    def test_four_directions_are_turned_off_the_projection_axis(self):
        g, _ = construct_alpha_ac(4, Fraction(1, 5), 3)
        self.assertEqual(g.metadata["arrangementRotation"], ["3/5", "4/5"])

    def test_lattice_source(self):
        arrangement = build_arrangement(3, Fraction(1, 5), 3, source="lattice")
        self.assertEqual(arrangement.metadata["kind"], "triangular")
        g, certificate = construct_alpha_ac(3, Fraction(2, 5), 3, source="lattice")
        self.assertTrue(certificate.verdict)
        self.assertEqual(certificate.source, "lattice")


def flattened_mesh(g):
    p = planarize(flatten_to_2d(g).graph)
    mesh = build_mesh(p)
    return p, mesh, face_metrics(mesh)


def generated_instances():
    # flattened coordinates are snapped; check against 2pi/5 plus a margin
    margin = rational_cos_bound("2pi/5+1/100")
    instances = [(f"stacked r={r}", project(stacked_grids(r), Fraction(1, 100)), margin) for r in (3, 4, 6)]
    for eps in (Fraction(1, 10), Fraction(1, 5)):
        g, _ = construct_alpha_ac(2, eps, 4)
        instances.append((f"full t=2 eps={eps}", g, margin))
    return instances


class ChargingPipelineTests(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.generated = generated_instances()

    def test_generated_graphs_keep_the_charge_identity(self):
        for label, g, _ in self.generated:
            with self.subTest(instance=label):
                p, mesh, metrics = flattened_mesh(g)
                self.assertEqual(p.multi_crossing_nodes, [])
                check = charge_sum_check(initial_charges(mesh, metrics), mesh)
                self.assertTrue(check.verdict)
                self.assertEqual(check.total, 4 * g.n - 8)

    def test_discharging_above_two_pi_fifths(self):
        instances = list(self.generated)
        for name in ("plane_triangle", "x_cross", "k4_square", "one_triangle_wedge", "quad_ladder"):
            instances.append((name, load_fixture(name), None))
        self.assertEqual(len(instances), 10)
        for label, g, threshold in instances:
            with self.subTest(instance=label):
                p, mesh, metrics = flattened_mesh(g)
                ledger = discharge_six_n(mesh, metrics)
                report = verify_discharged(ledger, metrics, mesh, threshold)
                self.assertTrue(report.precondition_ok)
                self.assertTrue(report.conserved)
                self.assertEqual(report.total_final, 4 * g.n - 8)
                self.assertEqual(report.below_claim, ())
                self.assertEqual(report.bad_exit_arcs, ())
                self.assertEqual(report.leaving_violations, ())
                self.assertLessEqual(g.m, report.edge_bound)
                self.assertEqual(report.edge_bound, 6 * g.n - 12)
                self.assertTrue(report.verdict)
                for record in ledger.transfers:
                    arc = p.arcs[record.exit_arc]
                    self.assertFalse(p.is_original(arc.u))
                    self.assertFalse(p.is_original(arc.v))


if __name__ == "__main__":
    unittest.main()
