import unittest
from fractions import Fraction
from functools import cmp_to_key

from hypothesis import given, settings, strategies as st

from acgraph.errors import CollinearOverlapError, GeometryError, PrecisionError
from acgraph.exact_geom import (
    AngleSpec,
    CosThreshold,
    Orientation,
    Segment,
    SegmentRelation,
    ThresholdSide,
    canonical_direction,
    compare_angles,
    compare_full_angle,
    cos2_below_two_pi_fifths,
    cos2_between,
    crossing_angle_at_least,
    crossing_point,
    direction_of,
    integer_scaled,
    orient2d,
    parse_angle,
    pi_bounds,
    properly_cross,
    rational_cos_bound,
    rational_sqrt_floor,
    segment_relation,
    sign_of_radical_sum,
    sign_plus_root3,
)

small = st.integers(min_value=-20, max_value=20)


class PredicateTests(unittest.TestCase):
    def test_orientation(self):
        self.assertEqual(orient2d((0, 0), (1, 0), (0, 1)), Orientation.LEFT)
        self.assertEqual(orient2d((0, 0), (0, 1), (1, 0)), Orientation.RIGHT)
        self.assertEqual(orient2d((0, 0), (1, 1), (Fraction(5, 2), Fraction(5, 2))), Orientation.COLLINEAR)

    def test_segment_relations(self):
        self.assertEqual(segment_relation((0, 0), (2, 2), (0, 2), (2, 0)), SegmentRelation.CROSSING)
        self.assertEqual(segment_relation((0, 0), (2, 0), (1, 0), (1, 1)), SegmentRelation.TOUCHING)
        self.assertEqual(segment_relation((0, 0), (2, 0), (2, 0), (3, 1)), SegmentRelation.TOUCHING)
        self.assertEqual(segment_relation((0, 0), (2, 0), (1, 0), (3, 0)), SegmentRelation.OVERLAPPING)
        self.assertEqual(segment_relation((0, 0), (1, 0), (2, 0), (3, 0)), SegmentRelation.DISJOINT)
        self.assertEqual(segment_relation((0, 0), (1, 1), (0, 1), (-1, 2)), SegmentRelation.DISJOINT)

    def test_properly_cross_rejects_overlap(self):
        s1 = Segment((Fraction(0), Fraction(0)), (Fraction(2), Fraction(0)))
        s2 = Segment((Fraction(1), Fraction(0)), (Fraction(3), Fraction(0)))
        with self.assertRaises(CollinearOverlapError) as caught:
            properly_cross(s1, s2)
        self.assertEqual(caught.exception.segments, (s1, s2))

    def test_shared_endpoint_is_not_a_crossing(self):
        s1 = Segment((0, 0), (2, 0))
        s2 = Segment((0, 0), (0, 2))
        self.assertFalse(properly_cross(s1, s2))

    def test_crossing_point_is_exact(self):
        point = crossing_point(Segment((0, 0), (3, 1)), Segment((0, 1), (3, 0)))
        self.assertEqual(point, (Fraction(3, 2), Fraction(1, 2)))

    def test_degenerate_segment(self):
        with self.assertRaises(GeometryError):
            Segment((1, 1), (1, 1))

    @given(small, small, small, small, small, small, small, small)
    @settings(max_examples=200, deadline=None)
    def test_relation_is_symmetric_and_scale_invariant(self, ax, ay, bx, by, cx, cy, dx, dy):
        a, b, c, d = (ax, ay), (bx, by), (cx, cy), (dx, dy)
        if a == b or c == d:
            return
        relation = segment_relation(a, b, c, d)
        self.assertEqual(segment_relation(c, d, a, b), relation)
        self.assertEqual(segment_relation(b, a, d, c), relation)
        scaled = [tuple(Fraction(value, 7) for value in p) for p in (a, b, c, d)]
        self.assertEqual(segment_relation(*scaled), relation)


class AngleThresholdTests(unittest.TestCase):
    def test_crossing_angle_against_thresholds(self):
        right = CosThreshold("pi/2", Fraction(0), ThresholdSide.EXACT)
        self.assertTrue(crossing_angle_at_least((1, 0), (0, 1), right))
        self.assertFalse(crossing_angle_at_least((1, 0), (1, 1), right))
        # cos^2 = 1/5 sits above (4/9)^2 and below (1/2)^2
        self.assertFalse(crossing_angle_at_least((1, 0), (1, 2), CosThreshold("x", Fraction(4, 9))))
        self.assertTrue(crossing_angle_at_least((1, 0), (1, 2), CosThreshold("x", Fraction(1, 2))))

    def test_cos2_between(self):
        self.assertEqual(cos2_between((1, 0), (1, 2)), Fraction(1, 5))
        self.assertEqual(cos2_between((1, 0, 0), (1, 1, 0)), Fraction(1, 2))
        with self.assertRaises(GeometryError):
            cos2_between((0, 0), (1, 0))

    def test_threshold_bounds_are_checked(self):
        with self.assertRaises(GeometryError):
            CosThreshold("bad", Fraction(3, 2))

    def test_cos2_below_two_pi_fifths(self):
        self.assertTrue(cos2_below_two_pi_fifths(Fraction(0)))
        self.assertTrue(cos2_below_two_pi_fifths(Fraction(9, 100)))
        self.assertFalse(cos2_below_two_pi_fifths(Fraction(1, 10)))
        self.assertFalse(cos2_below_two_pi_fifths(Fraction(1, 4)))


class DirectionTests(unittest.TestCase):
    def test_canonical_direction(self):
        self.assertEqual(canonical_direction((-2, -4)), (1, 2))
        self.assertEqual(canonical_direction((-3, 0)), (1, 0))
        self.assertEqual(canonical_direction((Fraction(1, 2), Fraction(-1, 3))), (-3, 2))
        with self.assertRaises(GeometryError):
            canonical_direction((0, 0))

    def test_direction_of_ignores_orientation(self):
        forward = Segment((Fraction(0), Fraction(0)), (Fraction(-2), Fraction(-4)))
        backward = Segment(forward.b, forward.a)
        self.assertEqual(direction_of(forward), (1, 2))
        self.assertEqual(direction_of(backward), (1, 2))
        with self.assertRaises(GeometryError):
            direction_of(Segment((0, 0, 0), (1, 1, 1)))

    def test_full_angle_order(self):
        expected = [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
        shuffled = [expected[index] for index in (4, 0, 6, 2, 5, 1, 3)]
        self.assertEqual(sorted(shuffled, key=cmp_to_key(compare_full_angle)), expected)

    def test_radical_sums(self):
        self.assertEqual(sign_of_radical_sum(1, 1, -1, 1), 0)
        self.assertEqual(sign_of_radical_sum(1, 4, -1, 1), -1)
        self.assertEqual(sign_of_radical_sum(3, 4, -1, 1), 1)
        self.assertEqual(sign_of_radical_sum(0, 5, 2, 7), 1)
        self.assertEqual(sign_plus_root3(-2, 1), -1)
        self.assertEqual(sign_plus_root3(-1, 1), 1)
        self.assertEqual(sign_plus_root3(0, 0), 0)

    def test_integer_scaling(self):
        common, rows = integer_scaled([(Fraction(1, 2), Fraction(1, 3)), (1, 0)])
        self.assertEqual(common, 6)
        self.assertEqual(rows, [(3, 2), (6, 0)])

    def test_rational_sqrt_floor(self):
        root = rational_sqrt_floor(Fraction(2), 10)
        self.assertEqual(root, Fraction(1448, 1024))
        self.assertLessEqual(root * root, 2)
        self.assertGreater((root + Fraction(1, 1024)) ** 2, 2)
        self.assertEqual(rational_sqrt_floor(Fraction(9, 4), 5), Fraction(3, 2))


class AngleSpecTests(unittest.TestCase):
    def test_parse_forms(self):
        self.assertEqual(parse_angle("pi/2"), AngleSpec(Fraction(1, 2)))
        self.assertEqual(parse_angle("2pi/5+1/100"), AngleSpec(Fraction(2, 5), Fraction(1, 100)))
        self.assertEqual(parse_angle("pi/2-1/10"), AngleSpec(Fraction(1, 2), Fraction(-1, 10)))
        self.assertEqual(parse_angle("2/3"), AngleSpec(Fraction(0), Fraction(2, 3)))
        self.assertEqual(parse_angle("π/3"), AngleSpec(Fraction(1, 3)))
        self.assertEqual(parse_angle("pi"), AngleSpec(Fraction(1)))

    def test_parse_errors(self):
        for text in ("", "pi/0", "abc", "2pi/x"):
            with self.subTest(text=text):
                with self.assertRaises(ValueError):
                    parse_angle(text)

    def test_string_form_round_trips(self):
        for text in ("pi/2", "2pi/5+1/100", "pi/2-1/10", "2/3", "3pi/4"):
            with self.subTest(text=text):
                self.assertEqual(str(parse_angle(text)), text)

    def test_compare_angles(self):
        self.assertEqual(compare_angles(parse_angle("pi/3"), parse_angle("1")), 1)
        self.assertEqual(compare_angles(parse_angle("pi/2"), parse_angle("pi/2")), 0)
        self.assertEqual(compare_angles(parse_angle("3"), parse_angle("pi")), -1)
        self.assertEqual(compare_angles(parse_angle("pi/5"), parse_angle("pi/6")), 1)
        # 355/113 exceeds pi by less than 3e-7
        self.assertEqual(compare_angles(parse_angle("pi"), parse_angle("355/113")), -1)
        self.assertEqual(compare_angles(parse_angle("pi/4"), parse_angle("3/4")), 1)

    def test_pi_bounds(self):
        low, high = pi_bounds(64)
        self.assertLess(low, Fraction(3141592653589794, 10**15))
        self.assertGreater(high, Fraction(3141592653589793, 10**15))
        self.assertLess(high - low, Fraction(1, 2**60))


class CosBoundTests(unittest.TestCase):
    def test_exact_special_angles(self):
        right = rational_cos_bound("pi/2")
        self.assertEqual(right.cos_bound, 0)
        self.assertEqual(right.side, ThresholdSide.EXACT)
        third = rational_cos_bound("pi/3")
        self.assertEqual(third.cos_bound, Fraction(1, 2))
        self.assertEqual(third.side, ThresholdSide.EXACT)

    def test_quarter_turn_bound_is_tight_from_below(self):
        threshold = rational_cos_bound("pi/4", 64)
        bound = threshold.cos_bound
        self.assertEqual(threshold.side, ThresholdSide.LOWER_BOUND_OF_COS)
        self.assertLess(bound * bound, Fraction(1, 2))
        self.assertGreater((bound + Fraction(1, 2**64)) ** 2, Fraction(1, 2))

    @given(st.integers(min_value=4, max_value=120))
    @settings(max_examples=40, deadline=None)
    def test_sixth_turn_bound_for_any_precision(self, bits):
        bound = rational_cos_bound("pi/6", bits).cos_bound
        self.assertLess(bound * bound, Fraction(3, 4))
        self.assertGreater((bound + Fraction(1, 2**bits)) ** 2, Fraction(3, 4))

    def test_rejects_out_of_range(self):
        with self.assertRaises(GeometryError):
            rational_cos_bound("0")
        with self.assertRaises(GeometryError):
            rational_cos_bound("pi")
        with self.assertRaises(GeometryError):
            rational_cos_bound("pi/2+1/100")
        with self.assertRaises(PrecisionError):
            rational_cos_bound("pi/4", 0)
        with self.assertRaises(PrecisionError):
            rational_cos_bound("pi/4", 1 << 20)

    def test_bound_is_monotone_in_the_angle(self):
        wide = rational_cos_bound("pi/2-1/10").cos_bound
        narrow = rational_cos_bound("pi/2-1/5").cos_bound
        self.assertLess(wide, narrow)


if __name__ == "__main__":
    unittest.main()
