import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from scipy.spatial.transform import Rotation

from .exceptions import ConfigurationError
from .kinematics import (
    anchor_world_positions,
    decode_genome,
    encode_design,
    fold_design,
    link_contacts,
    muscle_jacobian,
    wire_lengths,
)
from .types import DesignParams, MechanismConfig

R = 0.2
L = 0.2


def make_config(axes=('roll', 'yaw'), wires=3, points=2, clearance=0.0):
    return MechanismConfig(R, L, axes, wires, points, clearance)


def random_design(rng, cfg):
    return decode_genome(rng.uniform(-1.0, 1.0, cfg.genome_length), cfg)


def finite_difference_jacobian(cfg, design, q, h=1e-6):
    q = np.asarray(q, dtype=float)
    columns = []
    for j in range(cfg.dof_count):
        step = np.zeros_like(q)
        step[j] = h
        columns.append((wire_lengths(cfg, design, q + step) - wire_lengths(cfg, design, q - step)) / (2 * h))
    return np.stack(columns, axis=1)


def homogeneous(rotation=np.eye(3), translation=(0.0, 0.0, 0.0)):
    transform = np.eye(4)
    transform[:3, :3] = rotation
    transform[:3, 3] = translation
    return transform


class MechanismConfigTests(SimpleTestCase):
    def test_rejects_invalid_values(self):
        with self.assertRaises(ConfigurationError):
            MechanismConfig(0.0, L, ('roll', 'yaw'), 3, 2)
        with self.assertRaises(ConfigurationError):
            MechanismConfig(R, L, ('roll', 'yaw'), 3, 4)
        with self.assertRaises(ConfigurationError):
            MechanismConfig(R, L, ('roll',), 3, 2)
        with self.assertRaises(ConfigurationError):
            MechanismConfig(R, L, ('roll', 'twist'), 3, 2)
        with self.assertRaises(ConfigurationError):
            MechanismConfig(R, L, ('roll', 'yaw'), 0, 2)

    def test_genome_length(self):
        self.assertEqual(make_config(wires=4, points=3).genome_length, 24)


class DecodeGenomeTests(SimpleTestCase):
    def setUp(self):
        self.cfg = make_config(wires=1, points=2)

    def test_centre(self):
        design = decode_genome([0.0, 0.0, 0.0, 0.0], self.cfg)
        np.testing.assert_array_equal(design.points[0, 0], [0.0, 0.0])

    def test_boundary_collapse(self):
        design = decode_genome([1.0, 0.7, -1.0, -0.3], self.cfg)
        np.testing.assert_allclose(design.points[0, 0], [R, 0.0], atol=1e-15)
        np.testing.assert_allclose(design.points[0, 1], [-R, 0.0], atol=1e-15)

    def test_interior_point(self):
        design = decode_genome([0.5, 0.5, 0.0, 0.0], self.cfg)
        self.assertAlmostEqual(design.points[0, 0, 0], 0.1, places=15)
        self.assertAlmostEqual(design.points[0, 0, 1], 0.5 * np.sqrt(0.04 - 0.01), places=15)

    def test_length_mismatch(self):
        with self.assertRaises(ConfigurationError):
            decode_genome([0.0, 0.0, 0.0], self.cfg)

    def test_out_of_box_values(self):
        with self.assertRaises(ConfigurationError):
            decode_genome([1.5, 0.0, 0.0, 0.0], self.cfg)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(min_value=-1.0, max_value=1.0), min_size=12, max_size=12))
    def test_decoded_points_stay_on_disc(self, values):
        cfg = make_config(wires=2, points=3)
        design = decode_genome(values, cfg)
        self.assertTrue(np.all(np.sum(design.points ** 2, axis=2) <= R * R * (1 + 1e-12)))
        design.check(cfg)

    def test_encode_inverts_decode(self):
        cfg = make_config(wires=4, points=3)
        design = random_design(np.random.default_rng(3), cfg)
        np.testing.assert_allclose(decode_genome(encode_design(design, cfg), cfg).points, design.points, atol=1e-15)

    def test_design_outside_disc_rejected(self):
        with self.assertRaises(ConfigurationError):
            DesignParams([[[0.3, 0.0], [0.0, 0.0]]]).check(self.cfg)


class AnchorPositionTests(SimpleTestCase):
    def setUp(self):
        self.cfg = make_config(wires=2, points=3)
        self.design = DesignParams([
            [[0.05, 0.1], [-0.12, 0.03], [0.0, -0.15]],
            [[0.1, 0.1], [0.02, -0.18], [-0.1, 0.05]],
        ])

    def test_zero_angles(self):
        paths = anchor_world_positions(self.cfg, self.design, [0.0, 0.0])
        for path, wire in zip(paths, self.design.points):
            np.testing.assert_allclose(path.anchors[0], [wire[0, 0], wire[0, 1], 0.0])
            np.testing.assert_allclose(path.anchors[1], [wire[1, 0], wire[1, 1], 2 * L])
            np.testing.assert_allclose(path.anchors[2], [wire[2, 0], wire[2, 1], 0.0])
            self.assertEqual(len(path.segments), 2)

    def test_two_point_wires_have_one_segment(self):
        cfg = make_config(wires=1, points=2)
        paths = anchor_world_positions(cfg, DesignParams([[[0.0, 0.1], [0.1, 0.0]]]), [0.1, 0.2])
        self.assertEqual(len(paths[0].segments), 1)

    def test_pure_yaw(self):
        phi = np.radians(40.0)
        paths = anchor_world_positions(self.cfg, self.design, [0.0, phi])
        p_x, p_y = self.design.points[0, 1]
        np.testing.assert_allclose(
            paths[0].anchors[1],
            [p_x * np.cos(phi) - p_y * np.sin(phi), p_x * np.sin(phi) + p_y * np.cos(phi), 2 * L],
            atol=1e-15,
        )

    def test_matches_homogeneous_transform(self):
        roll, yaw = np.radians(30.0), np.radians(30.0)
        paths = anchor_world_positions(self.cfg, self.design, [roll, yaw])
        rotation = Rotation.from_euler('ZX', [yaw, roll]).as_matrix()
        world_from_disc = homogeneous(translation=(0, 0, L)) @ homogeneous(rotation) @ homogeneous(translation=(0, 0, L))
        for path, wire in zip(paths, self.design.points):
            expected = world_from_disc @ np.array([wire[1, 0], wire[1, 1], 0.0, 1.0])
            np.testing.assert_allclose(path.anchors[1], expected[:3], atol=1e-15)

    def test_three_axis_composition(self):
        cfg = make_config(axes=('roll', 'pitch', 'yaw'), wires=2, points=3)
        q = np.radians([20.0, -20.0, 30.0])
        paths = anchor_world_positions(cfg, self.design, q)
        rotation = Rotation.from_euler('ZYX', [q[2], q[1], q[0]]).as_matrix()
        local = np.array([self.design.points[1, 1, 0], self.design.points[1, 1, 1], L])
        np.testing.assert_allclose(paths[1].anchors[1], [0, 0, L] + rotation @ local, atol=1e-15)

    def test_wrong_angle_count(self):
        with self.assertRaises(ConfigurationError):
            anchor_world_positions(self.cfg, self.design, [0.0, 0.0, 0.0])


class WireLengthTests(SimpleTestCase):
    def test_centre_wire(self):
        cfg = make_config(wires=1, points=2)
        lengths = wire_lengths(cfg, DesignParams(np.zeros((1, 2, 2))), [0.0, 0.0])
        self.assertAlmostEqual(lengths[0], 2 * L, places=15)

    def test_fold_doubles_length(self):
        cfg = make_config(wires=3, points=2)
        design = random_design(np.random.default_rng(5), cfg)
        q = np.radians([25.0, -10.0])
        folded = wire_lengths(cfg.with_points_per_wire(3), fold_design(design), q)
        np.testing.assert_allclose(folded, 2 * wire_lengths(cfg, design, q), rtol=1e-15)

    def test_matches_direct_recomputation(self):
        cfg = make_config(wires=4, points=3)
        design = random_design(np.random.default_rng(9), cfg)
        q = np.radians([20.0, -30.0])
        paths = anchor_world_positions(cfg, design, q)
        expected = [
            sum(np.linalg.norm(path.anchors[j + 1] - path.anchors[j]) for j in range(len(path.anchors) - 1))
            for path in paths
        ]
        np.testing.assert_allclose(wire_lengths(cfg, design, q), expected, rtol=1e-15)


class MuscleJacobianTests(SimpleTestCase):
    def test_centre_design_has_no_yaw_moment_arm(self):
        cfg = make_config(wires=2, points=2)
        design = DesignParams(np.zeros((2, 2, 2)))
        for q in ([0.0, 0.0], np.radians([30.0, -30.0])):
            jacobian = muscle_jacobian(cfg, design, q)
            np.testing.assert_allclose(jacobian[:, 1], 0.0, atol=1e-15)

    def test_fold_doubles_rows(self):
        rng = np.random.default_rng(17)
        for axes in (('roll', 'yaw'), ('roll', 'pitch', 'yaw')):
            cfg = make_config(axes=axes, wires=4, points=2)
            design = random_design(rng, cfg)
            q = rng.uniform(-np.pi / 4, np.pi / 4, cfg.dof_count)
            jacobian = muscle_jacobian(cfg, design, q)
            folded = muscle_jacobian(cfg.with_points_per_wire(3), fold_design(design), q)
            np.testing.assert_allclose(folded, 2 * jacobian, rtol=1e-12, atol=1e-18)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(23)
        worst = 0.0
        for sample in range(200):
            axes = ('roll', 'yaw') if sample % 2 else ('roll', 'pitch', 'yaw')
            cfg = make_config(axes=axes, wires=int(rng.integers(1, 6)), points=int(rng.integers(2, 4)))
            design = random_design(rng, cfg)
            q = rng.uniform(-np.pi / 4, np.pi / 4, cfg.dof_count)
            error = np.abs(muscle_jacobian(cfg, design, q) - finite_difference_jacobian(cfg, design, q))
            worst = max(worst, float(error.max()))
        self.assertLess(worst, 1e-6)

    def test_coincident_anchors_contribute_nothing(self):
        # a half-turn of roll brings the moving disc centre down onto the base disc centre
        cfg = make_config(wires=1, points=2)
        jacobian = muscle_jacobian(cfg, DesignParams(np.zeros((1, 2, 2))), [np.pi, 0.0])
        np.testing.assert_array_equal(jacobian, np.zeros((1, 2)))

    def test_wire_permutation_permutes_rows(self):
        cfg = make_config(axes=('roll', 'pitch', 'yaw'), wires=5, points=3)
        rng = np.random.default_rng(31)
        design = random_design(rng, cfg)
        q = rng.uniform(-0.5, 0.5, 3)
        order = [3, 0, 4, 1, 2]
        np.testing.assert_allclose(
            muscle_jacobian(cfg, design.permuted(order), q),
            muscle_jacobian(cfg, design, q)[order],
        )
        np.testing.assert_allclose(
            wire_lengths(cfg, design.permuted(order), q),
            wire_lengths(cfg, design, q)[order],
        )


class LinkContactTests(SimpleTestCase):
    def test_centre_anchor_is_reported(self):
        cfg = make_config(wires=2, points=2)
        design = DesignParams([[[0.0, 0.0], [0.1, 0.0]], [[0.1, 0.1], [-0.1, 0.1]]])
        contacts = link_contacts(cfg, design)
        self.assertEqual(contacts, [{'wire': 0, 'anchor': 0, 'disc': 'base', 'radius': 0.0}])

    def test_clearance_widens_contact_zone(self):
        cfg = make_config(wires=1, points=2, clearance=0.05)
        design = DesignParams([[[0.03, 0.0], [0.1, 0.0]]])
        self.assertEqual(len(link_contacts(cfg, design)), 1)
        self.assertEqual(link_contacts(make_config(wires=1, points=2), design), [])
