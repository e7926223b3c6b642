import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from scipy.spatial.transform import Rotation

from .motion import MotionPair, crossing_during_motion, distance_at
from .proximity import (
    Segment,
    joined_min_distance,
    joined_min_distance_batch,
    segment_min_distance,
    segment_min_distance_batch,
)


coordinate = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)
point = st.tuples(coordinate, coordinate, coordinate)
segment = st.builds(Segment.from_points, point, point)


def seg(start, end):
    return Segment.from_points(start, end)


def grid_min(a, b, n=50):
    s = np.linspace(0.0, 1.0, n)
    pa = a.start + s[:, None] * a.direction
    pb = b.start + s[:, None] * b.direction
    return float(np.linalg.norm(pa[:, None, :] - pb[None, :, :], axis=2).min())


def dense_oracle(pair, samples=10001):
    """Minimum distance over a uniform k grid, evaluated with the batched kernel"""
    k = np.linspace(0.0, 1.0, samples)[:, None]
    blend = lambda begin, end: (1.0 - k) * begin + k * end
    batch = joined_min_distance_batch if pair.joined else segment_min_distance_batch
    return float(batch(
        blend(pair.seg_a_begin.start, pair.seg_a_end.start),
        blend(pair.seg_a_begin.end, pair.seg_a_end.end),
        blend(pair.seg_b_begin.start, pair.seg_b_end.start),
        blend(pair.seg_b_begin.end, pair.seg_b_end.end),
    ).min())


class SegmentMinDistanceTests(SimpleTestCase):
    def test_parallel_offset_segments(self):
        result = segment_min_distance(seg((0, 0, 0), (1, 0, 0)), seg((0, 0, 1), (1, 0, 1)))
        self.assertAlmostEqual(result.distance, 1.0, places=12)
        self.assertAlmostEqual(result.s_star, result.t_star, places=12)

    def test_crossing_x(self):
        result = segment_min_distance(seg((-1, 0, 0), (1, 0, 0)), seg((0, -1, 0), (0, 1, 0)))
        self.assertAlmostEqual(result.distance, 0.0, places=12)
        self.assertAlmostEqual(result.s_star, 0.5, places=12)
        self.assertAlmostEqual(result.t_star, 0.5, places=12)

    def test_skew_perpendicular(self):
        result = segment_min_distance(seg((0, 0, 0), (1, 0, 0)), seg((0.5, -1, 2), (0.5, 1, 2)))
        self.assertAlmostEqual(result.distance, 2.0, places=12)
        self.assertAlmostEqual(result.s_star, 0.5, places=12)
        self.assertAlmostEqual(result.t_star, 0.5, places=12)

    def test_clamped_region_is_walked(self):
        # independent clamping of s and t would report sqrt(1.25) here
        a = seg((0, 0, 0), (1, 0, 0))
        b = seg((0.5, 1, 0), (1.5, 2, 0))
        result = segment_min_distance(a, b)
        self.assertAlmostEqual(result.distance, 1.0, places=12)
        self.assertAlmostEqual(result.s_star, 0.5, places=12)
        self.assertEqual(result.t_star, 0.0)

    def test_zero_length_segments(self):
        point_a = seg((0, 0, 1), (0, 0, 1))
        line = seg((-1, 0, 0), (1, 0, 0))
        result = segment_min_distance(point_a, line)
        self.assertEqual(result.s_star, 0.0)
        self.assertAlmostEqual(result.t_star, 0.5)
        self.assertAlmostEqual(result.distance, 1.0)
        both = segment_min_distance(point_a, seg((3, 4, 1), (3, 4, 1)))
        self.assertAlmostEqual(both.distance, 5.0)

    def test_collinear_overlap(self):
        result = segment_min_distance(seg((0, 0, 0), (2, 0, 0)), seg((1, 0, 0), (3, 0, 0)))
        self.assertAlmostEqual(result.distance, 0.0, places=12)

    def test_non_finite_point_rejected(self):
        with self.assertRaises(ValueError):
            seg((0, 0, np.nan), (1, 0, 0))

    @settings(max_examples=300, deadline=None)
    @given(segment, segment)
    def test_matches_grid_oracle(self, a, b):
        result = segment_min_distance(a, b)
        reference = grid_min(a, b)
        self.assertLessEqual(result.distance, reference + 1e-12)
        self.assertLessEqual(reference - result.distance, (a.length + b.length) / 98.0 + 1e-12)
        attained = np.linalg.norm(a.point_at(result.s_star) - b.point_at(result.t_star))
        self.assertAlmostEqual(result.distance, attained, places=12)
        self.assertTrue(0.0 <= result.s_star <= 1.0)
        self.assertTrue(0.0 <= result.t_star <= 1.0)

    @settings(max_examples=300, deadline=None)
    @given(segment, segment)
    def test_swap_symmetry(self, a, b):
        forward = segment_min_distance(a, b)
        backward = segment_min_distance(b, a)
        self.assertAlmostEqual(forward.distance, backward.distance, delta=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(segment, segment, st.integers(min_value=0, max_value=2**32 - 1))
    def test_rigid_transform_invariance(self, a, b, seed):
        rng = np.random.default_rng(seed)
        rotation = Rotation.from_rotvec(rng.uniform(-np.pi, np.pi, 3)).as_matrix()
        shift = rng.uniform(-5.0, 5.0, 3)
        move = lambda s: Segment(rotation @ s.start + shift, rotation @ s.end + shift)
        self.assertAlmostEqual(
            segment_min_distance(a, b).distance,
            segment_min_distance(move(a), move(b)).distance,
            delta=1e-9,
        )

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(7)
        ends = rng.uniform(-1.0, 1.0, (500, 4, 3))
        # parallel and degenerate rows
        ends[:50, 3] = ends[:50, 2] + 2.0 * (ends[:50, 1] - ends[:50, 0])
        ends[50:60, 1] = ends[50:60, 0]
        ends[60:70, 3] = ends[60:70, 2]
        batch = segment_min_distance_batch(ends[:, 0], ends[:, 1], ends[:, 2], ends[:, 3])
        for row, expected in zip(ends, batch):
            scalar = segment_min_distance(Segment(row[0], row[1]), Segment(row[2], row[3])).distance
            self.assertAlmostEqual(scalar, expected, delta=1e-12)


class JoinedMinDistanceTests(SimpleTestCase):
    def test_exact_fold_overlaps(self):
        relay = (0.1, 0.0, 0.4)
        anchor = (0.05, 0.05, 0.0)
        result = joined_min_distance(seg(relay, anchor), seg(relay, anchor))
        self.assertAlmostEqual(result.distance, 0.0, places=12)

    def test_partial_overlap_along_ray(self):
        result = joined_min_distance(seg((0, 0, 0), (1, 0, 0)), seg((0, 0, 0), (3, 0, 0)))
        self.assertAlmostEqual(result.distance, 0.0, places=12)

    def test_open_fold_is_separated(self):
        result = joined_min_distance(seg((0, 0, 0), (1, 0, 0)), seg((0, 0, 0), (0, 1, 0)))
        self.assertAlmostEqual(result.distance, 1.0, places=12)

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(11)
        rows = rng.uniform(-1.0, 1.0, (100, 3, 3))
        batch = joined_min_distance_batch(rows[:, 0], rows[:, 1], rows[:, 0], rows[:, 2])
        for row, expected in zip(rows, batch):
            scalar = joined_min_distance(Segment(row[0], row[1]), Segment(row[0], row[2])).distance
            self.assertAlmostEqual(scalar, expected, delta=1e-12)


class MotionTests(SimpleTestCase):
    def setUp(self):
        self.sweep = MotionPair(
            seg((-1, 0, -1), (1, 0, -1)),
            seg((-1, 0, 1), (1, 0, 1)),
            seg((0, -1, 0), (0, 1, 0)),
            seg((0, -1, 0), (0, 1, 0)),
        )
        self.static = MotionPair.static(seg((0, 0, 0), (1, 0, 0)), seg((0, 0, 1), (1, 0, 1)))

    def test_constant_motion_matches_static_distance(self):
        for k in (0.0, 0.3, 1.0):
            self.assertAlmostEqual(distance_at(self.static, k).distance, 1.0, places=12)

    def test_k_zero_is_begin_configuration(self):
        expected = segment_min_distance(self.sweep.seg_a_begin, self.sweep.seg_b_begin)
        self.assertEqual(distance_at(self.sweep, 0.0), expected)

    def test_sweep_touches_at_midpoint(self):
        self.assertAlmostEqual(distance_at(self.sweep, 0.5).distance, 0.0, places=12)
        ks = np.arange(0.0, 1.0 + 1e-12, 1e-4)
        distances = [distance_at(self.sweep, k).distance for k in ks]
        self.assertAlmostEqual(ks[int(np.argmin(distances))], 0.5, places=9)

    def test_k_out_of_range_rejected(self):
        with self.assertRaises(ValueError):
            distance_at(self.sweep, 1.5)
        with self.assertRaises(ValueError):
            distance_at(self.sweep, -0.1)

    def test_static_separated_pair_does_not_cross(self):
        report = crossing_during_motion(self.static, 1e-4)
        self.assertFalse(report.crossed)
        self.assertAlmostEqual(report.d_min, 1.0, places=12)

    def test_sweep_crosses_near_midpoint(self):
        report = crossing_during_motion(self.sweep, 1e-4)
        self.assertTrue(report.crossed)
        self.assertAlmostEqual(report.k_min, 0.5, delta=1e-3)
        self.assertLess(report.d_min, 1e-4)

    def test_crossing_at_start_reported_at_k_zero(self):
        pair = MotionPair(
            seg((-1, 0, 0), (1, 0, 0)),
            seg((-1, 0, 1), (1, 0, 1)),
            seg((0, -1, 0), (0, 1, 0)),
            seg((0, -1, 0), (0, 1, 0)),
        )
        report = crossing_during_motion(pair, 1e-4)
        self.assertTrue(report.crossed)
        self.assertEqual(report.k_min, 0.0)

    def test_off_grid_crossing_found(self):
        # the wires touch at k = 0.3, between pre-scan samples
        pair = MotionPair(
            seg((-1, 0, -0.3), (1, 0, -0.3)),
            seg((-1, 0, 0.7), (1, 0, 0.7)),
            seg((0, -1, 0), (0, 1, 0)),
            seg((0, -1, 0), (0, 1, 0)),
        )
        report = crossing_during_motion(pair, 1e-4)
        self.assertTrue(report.crossed)
        self.assertAlmostEqual(report.k_min, 0.3, delta=1e-3)

    def narrow_dip_pair(self, miss):
        # a short wire slides past the z axis; the gap dips to `miss` at k = 0.4971
        return MotionPair(
            seg((-0.4971, miss, -0.01), (-0.4971, miss, 0.01)),
            seg((0.5029, miss, -0.01), (0.5029, miss, 0.01)),
            seg((0, 0, -1), (0, 0, 1)),
            seg((0, 0, -1), (0, 0, 1)),
        )

    def test_narrow_dip_inside_brent_bracket_found(self):
        # the dip sits inside the Brent bracket of the k = 0.5 pre-scan sample
        report = crossing_during_motion(self.narrow_dip_pair(1e-5), 1e-4, max_iter=2)
        self.assertTrue(report.crossed)
        self.assertLess(report.d_min, 1e-4)
        self.assertAlmostEqual(report.k_min, 0.4971, delta=1e-4)

    def test_narrow_near_miss_inside_brent_bracket_not_crossed(self):
        report = crossing_during_motion(self.narrow_dip_pair(2e-4), 1e-4, max_iter=2)
        self.assertFalse(report.crossed)
        self.assertGreaterEqual(report.d_min, 2e-4 - 1e-12)

    def test_reversed_motion_gives_same_verdict(self):
        self.assertEqual(
            crossing_during_motion(self.sweep, 1e-4).crossed,
            crossing_during_motion(self.sweep.reversed(), 1e-4).crossed,
        )

    def test_epsilon_must_be_positive(self):
        with self.assertRaises(ValueError):
            crossing_during_motion(self.static, 0.0)

    @settings(max_examples=150, deadline=None)
    @given(
        st.integers(min_value=0, max_value=2**32 - 1),
        st.floats(min_value=0.05, max_value=1.0),
        st.booleans(),
    )
    def test_guard_band_agreement_with_dense_oracle(self, seed, k0, force_contact):
        rng = np.random.default_rng(seed)
        a0, a1, b0, b1 = (rng.uniform(-0.3, 0.3, (2, 3)) for _ in range(4))
        if force_contact:
            # shift the k=1 configuration of `a` so both wires meet at k0
            s0, t0 = rng.uniform(0.0, 1.0, 2)
            a_k0 = (1.0 - k0) * a0 + k0 * a1
            b_k0 = (1.0 - k0) * b0 + k0 * b1
            gap = (b_k0[0] + t0 * (b_k0[1] - b_k0[0])) - (a_k0[0] + s0 * (a_k0[1] - a_k0[0]))
            a1 = a1 + gap / k0
        pair = MotionPair(Segment(*a0), Segment(*a1), Segment(*b0), Segment(*b1))
        epsilon = 1e-4
        report = crossing_during_motion(pair, epsilon)
        oracle = dense_oracle(pair)
        if report.crossed:
            self.assertLess(report.d_min, epsilon)
        if oracle < epsilon / 2:
            self.assertTrue(report.crossed)
        if oracle > 2 * epsilon:
            self.assertFalse(report.crossed)
