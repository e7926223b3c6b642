import json
import math

import numpy as np
from django.test import SimpleTestCase

from mechanism.exceptions import ConfigurationError
from mechanism.kinematics import anchor_world_positions, decode_genome, fold_design
from mechanism.types import DesignParams, MechanismConfig
from torque_space.polytope import TensionBounds

from .crossings import collect_check_pairs, count_crossings_segment
from .evaluation import evaluate, validate_design
from .oracle import oracle_min_distances, oracle_report
from .types import CheckPair, Evaluation, Trajectory

R = 0.2
L = 0.2
EPSILON = 1e-4
R_MIN = 1e-3
BOUNDS = TensionBounds(1.0, 200.0)
TRAJECTORY_2DOF = Trajectory.from_degrees([(30, 30), (-30, 30), (-30, -30), (30, -30)])
TRAJECTORY_3DOF = Trajectory.from_degrees([
    (20, 20, 30), (20, 20, -30), (-20, 20, -30), (-20, 20, 30),
    (-20, -20, 30), (-20, -20, -30), (20, -20, -30), (20, -20, 30),
])


def make_config(axes=('roll', 'yaw'), wires=3, points=2, clearance=0.0):
    return MechanismConfig(R, L, axes, wires, points, clearance)


def random_design(rng, cfg):
    return decode_genome(rng.uniform(-1.0, 1.0, cfg.genome_length), cfg)


def straight_design(points):
    """Wires anchored at the same disc coordinates on both discs"""
    return DesignParams([[point, point] for point in points])


def pairs_at_rest(cfg, design):
    return collect_check_pairs(cfg, anchor_world_positions(cfg, design, np.zeros(cfg.dof_count)))


class TrajectoryTests(SimpleTestCase):
    def test_degrees_are_converted(self):
        np.testing.assert_allclose(TRAJECTORY_2DOF.waypoints[0], [np.pi / 6, np.pi / 6])

    def test_needs_two_finite_waypoints(self):
        with self.assertRaises(ConfigurationError):
            Trajectory([[0.0, 0.0]])
        with self.assertRaises(ConfigurationError):
            Trajectory([[0.0, 0.0], [np.nan, 0.0]])

    def test_steps(self):
        self.assertEqual(TRAJECTORY_2DOF.steps, [(0, 1), (1, 2), (2, 3)])
        closed = Trajectory(TRAJECTORY_2DOF.waypoints, close_loop=True)
        self.assertEqual(closed.steps, [(0, 1), (1, 2), (2, 3), (3, 0)])


class EvaluationTests(SimpleTestCase):
    def test_e_torque_is_exp_of_log(self):
        self.assertAlmostEqual(Evaluation(0, math.log(2.5)).e_torque, 2.5, places=12)

    def test_e_torque_underflow_is_none(self):
        self.assertIsNone(Evaluation(0, -800.0).e_torque)

    def test_e_torque_overflow_is_none(self):
        result = Evaluation(0, 800.0)
        self.assertIsNone(result.e_torque)
        payload = json.loads(json.dumps(result.as_dict(), allow_nan=False))
        self.assertEqual(payload['log_e_torque'], 800.0)


class CollectCheckPairsTests(SimpleTestCase):
    def test_three_two_point_wires(self):
        cfg = make_config(wires=3, points=2)
        pairs = pairs_at_rest(cfg, random_design(np.random.default_rng(1), cfg))
        kinds = [pair.kind for pair in pairs]
        self.assertEqual(len(pairs), 9)
        self.assertEqual(kinds.count('wire'), 3)
        self.assertEqual(kinds.count('link'), 6)

    def test_three_fold_wires_match_brute_force(self):
        cfg = make_config(wires=3, points=3)
        pairs = pairs_at_rest(cfg, random_design(np.random.default_rng(2), cfg))
        segments = [(wire, segment) for wire in range(3) for segment in range(2)]
        inter = sum(1 for a in segments for b in segments if a < b and a[0] != b[0])
        intra = sum(1 for a in segments for b in segments if a < b and a[0] == b[0])
        links = 2 * len(segments)
        self.assertEqual((inter, intra, links), (12, 3, 12))
        kinds = [pair.kind for pair in pairs]
        self.assertEqual(kinds.count('wire'), inter)
        self.assertEqual(kinds.count('fold'), intra)
        self.assertEqual(kinds.count('link'), links)
        self.assertEqual(len(pairs), 27)

    def test_single_wire(self):
        cfg = make_config(wires=1, points=2)
        pairs = pairs_at_rest(cfg, DesignParams([[[0.1, 0.0], [0.0, -0.1]]]))
        self.assertEqual([pair.second for pair in pairs], ['base', 'moving'])

    def test_fold_pair_is_joined(self):
        cfg = make_config(wires=1, points=3)
        pairs = pairs_at_rest(cfg, random_design(np.random.default_rng(3), cfg))
        self.assertIn(CheckPair((0, 0), (0, 1), joined=True), pairs)

    def test_wires_sharing_an_anchor_are_not_paired(self):
        cfg = make_config(wires=2, points=2)
        design = DesignParams([[[0.1, 0.0], [0.0, 0.1]], [[0.1, 0.0], [-0.1, 0.05]]])
        self.assertEqual([pair.kind for pair in pairs_at_rest(cfg, design)].count('wire'), 0)

    def test_centre_wire_is_not_paired_with_the_links(self):
        cfg = make_config(wires=1, points=2)
        self.assertEqual(pairs_at_rest(cfg, DesignParams(np.zeros((1, 2, 2)))), [])

    def test_clearance_forces_link_pairs(self):
        cfg = make_config(wires=1, points=2, clearance=0.01)
        pairs = pairs_at_rest(cfg, DesignParams(np.zeros((1, 2, 2))))
        self.assertEqual(len(pairs), 2)
        self.assertTrue(all(pair.forced for pair in pairs))


class CountCrossingsTests(SimpleTestCase):
    def test_static_pose_without_crossings(self):
        cfg = make_config(wires=4)
        design = straight_design([(0.12, 0.12), (-0.12, 0.12), (-0.12, -0.12), (0.12, -0.12)])
        q = np.radians([10.0, 20.0])
        self.assertEqual(count_crossings_segment(cfg, design, q, q, EPSILON), 0)

    def test_opposite_wires_swept_through_each_other(self):
        cfg = make_config(wires=2)
        design = straight_design([(R, 0.0), (-R, 0.0)])
        q_a, q_b = np.radians([0.0, -90.0]), np.radians([0.0, 90.0])
        self.assertGreaterEqual(count_crossings_segment(cfg, design, q_a, q_b, EPSILON), 1)
        closest = min(distance for _, distance, _ in oracle_min_distances(cfg, design, q_a, q_b))
        self.assertLess(closest, EPSILON / 2)

    def test_wire_through_joint_centre_meets_both_links(self):
        cfg = make_config(wires=1)
        design = DesignParams([[[0.1, 0.0], [-0.1, 0.0]]])
        q = np.zeros(2)
        self.assertEqual(count_crossings_segment(cfg, design, q, q, EPSILON), 2)

    def test_centre_wire_never_crosses(self):
        cfg = make_config(wires=1)
        design = DesignParams(np.zeros((1, 2, 2)))
        for i, j in TRAJECTORY_2DOF.steps:
            q_a, q_b = TRAJECTORY_2DOF.waypoints[i], TRAJECTORY_2DOF.waypoints[j]
            self.assertEqual(count_crossings_segment(cfg, design, q_a, q_b, EPSILON), 0)

    def test_centre_wire_inside_clearance_counts_on_every_step(self):
        cfg = make_config(wires=1, clearance=0.01)
        design = DesignParams(np.zeros((1, 2, 2)))
        evaluation = evaluate(cfg, design, TRAJECTORY_2DOF, BOUNDS, EPSILON, R_MIN)
        self.assertEqual(evaluation.per_segment_crossings, [2, 2, 2])


class EvaluateTests(SimpleTestCase):
    def setUp(self):
        self.cfg = make_config(wires=3, points=2)
        self.rng = np.random.default_rng(41)

    def assertConsistent(self, evaluation):
        self.assertEqual(evaluation.e_cross, sum(evaluation.per_segment_crossings))
        self.assertAlmostEqual(evaluation.log_e_torque, sum(math.log(r) for r in evaluation.per_waypoint_radius), places=12)
        self.assertTrue(all(r >= R_MIN for r in evaluation.per_waypoint_radius))

    def test_symmetric_four_wire_design_is_crossing_free(self):
        cfg = make_config(wires=4)
        design = straight_design([(0.12, 0.12), (-0.12, 0.12), (-0.12, -0.12), (0.12, -0.12)])
        evaluation = evaluate(cfg, design, TRAJECTORY_2DOF, BOUNDS, EPSILON, R_MIN)
        self.assertEqual(evaluation.e_cross, 0)
        self.assertConsistent(evaluation)
        records = oracle_report(cfg, design, TRAJECTORY_2DOF, EPSILON)
        self.assertGreater(min(record.oracle_min for record in records), 2 * EPSILON)

    def test_two_wires_never_surround_the_origin(self):
        cfg = make_config(wires=2)
        evaluation = evaluate(cfg, random_design(self.rng, cfg), TRAJECTORY_2DOF, BOUNDS, EPSILON, R_MIN)
        self.assertEqual(evaluation.per_waypoint_radius, [R_MIN] * 4)
        self.assertAlmostEqual(evaluation.log_e_torque, 4 * math.log(R_MIN), places=12)

    def test_fold_doubles_every_radius(self):
        for cfg, traj in ((self.cfg, TRAJECTORY_2DOF), (make_config(axes=('roll', 'pitch', 'yaw'), wires=5), TRAJECTORY_3DOF)):
            design = random_design(self.rng, cfg)
            plain = evaluate(cfg, design, traj, BOUNDS, EPSILON, R_MIN)
            folded = evaluate(cfg.with_points_per_wire(3), fold_design(design), traj, BOUNDS, EPSILON, R_MIN)
            self.assertConsistent(folded)
            for before, after in zip(plain.per_waypoint_radius, folded.per_waypoint_radius):
                if before > R_MIN:
                    self.assertAlmostEqual(after / before, 2.0, delta=1e-9)
            if all(r > R_MIN for r in plain.per_waypoint_radius):
                self.assertAlmostEqual(folded.log_e_torque - plain.log_e_torque, len(traj) * math.log(2), delta=1e-9)
            self.assertGreaterEqual(folded.e_cross, plain.e_cross)

    def test_wire_permutation_invariance(self):
        cfg = make_config(wires=4, points=3)
        design = random_design(self.rng, cfg)
        base = evaluate(cfg, design, TRAJECTORY_2DOF, BOUNDS, EPSILON, R_MIN)
        permuted = evaluate(cfg, design.permuted([2, 0, 3, 1]), TRAJECTORY_2DOF, BOUNDS, EPSILON, R_MIN)
        self.assertEqual(permuted.e_cross, base.e_cross)
        self.assertAlmostEqual(permuted.log_e_torque, base.log_e_torque, delta=1e-9)

    def test_reversed_trajectory_has_the_same_crossings(self):
        for seed in range(5):
            design = random_design(np.random.default_rng(seed), self.cfg)
            forward = evaluate(self.cfg, design, TRAJECTORY_2DOF, BOUNDS, EPSILON, R_MIN)
            backward = evaluate(self.cfg, design, TRAJECTORY_2DOF.reversed(), BOUNDS, EPSILON, R_MIN)
            self.assertEqual(backward.e_cross, forward.e_cross)
            self.assertEqual(backward.per_segment_crossings, forward.per_segment_crossings[::-1])

    def test_crossings_are_bounded_by_pairs_times_steps(self):
        cfg = make_config(wires=4, points=3)
        for _ in range(5):
            design = random_design(self.rng, cfg)
            evaluation = evaluate(cfg, design, TRAJECTORY_2DOF, BOUNDS, EPSILON, R_MIN)
            self.assertLessEqual(evaluation.e_cross, len(pairs_at_rest(cfg, design)) * len(TRAJECTORY_2DOF.steps))
            self.assertConsistent(evaluation)

    def test_deterministic(self):
        design = random_design(self.rng, self.cfg)
        first = evaluate(self.cfg, design, TRAJECTORY_2DOF, BOUNDS, EPSILON, R_MIN)
        second = evaluate(self.cfg, design, TRAJECTORY_2DOF, BOUNDS, EPSILON, R_MIN)
        self.assertEqual(first.as_dict(), second.as_dict())

    def test_close_loop_adds_the_wrap_around_step(self):
        design = random_design(self.rng, self.cfg)
        closed = Trajectory(TRAJECTORY_2DOF.waypoints, close_loop=True)
        evaluation = evaluate(self.cfg, design, closed, BOUNDS, EPSILON, R_MIN)
        self.assertEqual(len(evaluation.per_segment_crossings), 4)

    def test_dimension_mismatch(self):
        with self.assertRaises(ConfigurationError):
            evaluate(self.cfg, random_design(self.rng, self.cfg), TRAJECTORY_3DOF, BOUNDS, EPSILON, R_MIN)


class OracleTests(SimpleTestCase):
    def test_static_separated_pair(self):
        cfg = make_config(wires=2)
        design = straight_design([(0.15, 0.0), (-0.15, 0.0)])
        q = np.zeros(2)
        for pair, distance, _ in oracle_min_distances(cfg, design, q, q, samples=11):
            self.assertGreater(distance, 0.1)

    def test_needs_two_samples(self):
        cfg = make_config(wires=1)
        with self.assertRaises(ConfigurationError):
            oracle_min_distances(cfg, DesignParams([[[0.1, 0.0], [0.0, 0.1]]]), np.zeros(2), np.ones(2), samples=1)

    def test_no_guard_band_violations_on_random_designs(self):
        rng = np.random.default_rng(57)
        cfg = make_config(wires=3, points=3)
        for _ in range(3):
            records = oracle_report(cfg, random_design(rng, cfg), TRAJECTORY_2DOF, EPSILON)
            self.assertEqual([r.as_dict(EPSILON) for r in records if r.violates_guard_band(EPSILON)], [])


class ValidateDesignTests(SimpleTestCase):
    def test_all_centre_design_touches_links(self):
        cfg = make_config(wires=2)
        contacts = validate_design(cfg, DesignParams(np.zeros((2, 2, 2))))
        self.assertEqual(len(contacts), 4)
        self.assertEqual({contact['disc'] for contact in contacts}, {'base', 'moving'})

    def test_shape_mismatch(self):
        with self.assertRaises(ConfigurationError):
            validate_design(make_config(wires=3), DesignParams(np.zeros((2, 2, 2))))
