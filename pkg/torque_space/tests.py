import numpy as np
from django.test import SimpleTestCase

from mechanism.exceptions import ConfigurationError

from .polytope import (
    DegenerateHull,
    TensionBounds,
    build_hull,
    inscribed_radius,
    project_to_torque,
    tension_vertices,
    torque_score,
)

DEFAULT_BOUNDS = TensionBounds(1.0, 200.0)
R_MIN = 1e-3


def centred_jacobian(rng, wires, dof):
    """Random G whose zonotope is centred on the origin, so the origin is interior"""
    jacobian = rng.normal(scale=0.05, size=(wires, dof))
    return jacobian - jacobian.mean(axis=0)


def ray_exit_radius(hull, directions=3600):
    """Shortest distance from the origin to the hull boundary along evenly spread rays (D=2)"""
    angles = np.linspace(0.0, 2 * np.pi, directions, endpoint=False)
    rays = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    along = rays @ hull.normals.T
    with np.errstate(divide='ignore'):
        exits = np.where(along > 0, hull.offsets / along, np.inf)
    return float(exits.min(axis=1).min())


def fibonacci_sphere(samples=1000):
    index = np.arange(samples) + 0.5
    polar = np.arccos(1 - 2 * index / samples)
    azimuth = np.pi * (1 + 5 ** 0.5) * index
    return np.stack([np.cos(azimuth) * np.sin(polar), np.sin(azimuth) * np.sin(polar), np.cos(polar)], axis=1)


def support(points, direction):
    return float((points @ direction).max())


class TensionVertexTests(SimpleTestCase):
    def test_single_wire(self):
        np.testing.assert_array_equal(tension_vertices(1, DEFAULT_BOUNDS), [[1.0], [200.0]])

    def test_two_wires_binary_order(self):
        np.testing.assert_array_equal(
            tension_vertices(2, DEFAULT_BOUNDS),
            [[1.0, 1.0], [1.0, 200.0], [200.0, 1.0], [200.0, 200.0]],
        )

    def test_six_wires(self):
        vertices = tension_vertices(6, DEFAULT_BOUNDS)
        self.assertEqual(vertices.shape, (64, 6))
        self.assertTrue(np.all(np.isin(vertices, [1.0, 200.0])))
        self.assertEqual(len({tuple(v) for v in vertices}), 64)

    def test_guard_on_wire_count(self):
        with self.assertRaises(ConfigurationError):
            tension_vertices(13, DEFAULT_BOUNDS)

    def test_invalid_bounds(self):
        with self.assertRaises(ConfigurationError):
            TensionBounds(5.0, 5.0)
        with self.assertRaises(ConfigurationError):
            TensionBounds(-1.0, 5.0)


class ProjectionTests(SimpleTestCase):
    def test_zero_tension(self):
        np.testing.assert_array_equal(project_to_torque(np.ones((3, 2)), np.zeros(3)), np.zeros(2))

    def test_single_row(self):
        np.testing.assert_allclose(project_to_torque([[0.1, -0.2, 0.3]], [4.0]), [-0.4, 0.8, -1.2])

    def test_matches_explicit_product(self):
        rng = np.random.default_rng(2)
        jacobian = rng.normal(size=(5, 3))
        tension = rng.uniform(1.0, 200.0, 5)
        expected = np.zeros(3)
        for j in range(3):
            for i in range(5):
                expected[j] -= jacobian[i, j] * tension[i]
        np.testing.assert_allclose(project_to_torque(jacobian, tension), expected, rtol=1e-12)

    def test_shape_mismatch(self):
        with self.assertRaises(ConfigurationError):
            project_to_torque(np.ones((3, 2)), np.ones(4))


class BuildHullTests(SimpleTestCase):
    def test_square_with_interior_points(self):
        points = [[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5], [0.2, 0.7]]
        hull = build_hull(points)
        self.assertEqual(len(hull.facets), 4)
        self.assertEqual(len(hull.vertices), 4)
        self.assertAlmostEqual(hull.volume, 1.0)

    def test_cube(self):
        corners = np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], dtype=float)
        hull = build_hull(corners)
        self.assertIn(len(hull.facets), (6, 12))
        for corner in corners:
            self.assertTrue(hull.contains(corner))
        np.testing.assert_allclose(np.linalg.norm(hull.normals, axis=1), 1.0, atol=1e-12)

    def test_collinear_points_are_degenerate(self):
        with self.assertRaises(DegenerateHull):
            build_hull([[0, 0], [1, 1], [2, 2], [3, 3]])
        with self.assertRaises(DegenerateHull):
            build_hull([[0, 0], [1, 1]])

    def test_coplanar_points_are_degenerate(self):
        with self.assertRaises(DegenerateHull):
            build_hull([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0], [0.5, 0.2, 0]])

    def test_containment_of_projected_vertices(self):
        rng = np.random.default_rng(4)
        for dof in (2, 3):
            jacobian = rng.normal(scale=0.05, size=(6, dof))
            points = project_to_torque(jacobian, tension_vertices(6, DEFAULT_BOUNDS))
            hull = build_hull(points)
            slack = points @ hull.normals.T - hull.offsets
            self.assertLessEqual(slack.max(), 1e-9)

    def test_area_matches_rasterization(self):
        rng = np.random.default_rng(8)
        points = project_to_torque(rng.normal(scale=0.05, size=(6, 2)), tension_vertices(6, DEFAULT_BOUNDS))
        hull = build_hull(points)
        lo, hi = points.min(axis=0), points.max(axis=0)
        n = 600
        xs = lo[0] + (np.arange(n) + 0.5) * (hi[0] - lo[0]) / n
        ys = lo[1] + (np.arange(n) + 0.5) * (hi[1] - lo[1]) / n
        grid = np.stack(np.meshgrid(xs, ys), axis=-1).reshape(-1, 2)
        inside = np.all(grid @ hull.normals.T <= hull.offsets, axis=1)
        estimate = inside.mean() * (hi[0] - lo[0]) * (hi[1] - lo[1])
        self.assertAlmostEqual(estimate / hull.volume, 1.0, delta=0.01)


class InscribedRadiusTests(SimpleTestCase):
    def setUp(self):
        self.square = np.array([[1, 1], [-1, 1], [-1, -1], [1, -1]], dtype=float)

    def test_centred_square(self):
        score = inscribed_radius(build_hull(self.square), R_MIN)
        self.assertTrue(score.origin_interior)
        self.assertAlmostEqual(score.radius, 1.0, places=12)

    def test_translated_square_scores_r_min(self):
        score = inscribed_radius(build_hull(self.square + [3.0, 0.0]), R_MIN)
        self.assertFalse(score.origin_interior)
        self.assertEqual(score.radius, R_MIN)

    def test_origin_on_facet_is_not_interior(self):
        score = inscribed_radius(build_hull(self.square + [1.0, 0.0]), R_MIN)
        self.assertFalse(score.origin_interior)
        self.assertEqual(score.radius, R_MIN)

    def test_degenerate_hull_scores_r_min(self):
        self.assertEqual(inscribed_radius(DegenerateHull('flat'), R_MIN).radius, R_MIN)
        self.assertEqual(inscribed_radius(None, R_MIN).radius, R_MIN)

    def test_sphere_center_hook(self):
        score = inscribed_radius(build_hull(self.square), R_MIN, sphere_center=[0.5, 0.0])
        self.assertAlmostEqual(score.radius, 0.5, places=12)

    def test_matches_ray_casting_in_two_dimensions(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            jacobian = centred_jacobian(rng, int(rng.integers(3, 7)), 2)
            score, hull = torque_score(jacobian, DEFAULT_BOUNDS, R_MIN)
            self.assertTrue(score.origin_interior)
            self.assertAlmostEqual(score.radius / ray_exit_radius(hull), 1.0, delta=1e-5)

    def test_ball_fits_inside_hull(self):
        rng = np.random.default_rng(13)
        circle = np.linspace(0.0, 2 * np.pi, 360, endpoint=False)
        directions = {
            2: np.stack([np.cos(circle), np.sin(circle)], axis=1),
            3: fibonacci_sphere(),
        }
        for dof in (2, 3):
            for _ in range(20):
                score, hull = torque_score(centred_jacobian(rng, 6, dof), DEFAULT_BOUNDS, R_MIN)
                self.assertTrue(score.origin_interior)
                ball = score.radius * directions[dof]
                self.assertLessEqual((ball @ hull.normals.T - hull.offsets).max(), 1e-9)

    def test_support_function_certificate_in_three_dimensions(self):
        # R_B is a lower bound of the support function everywhere and is attained at a facet normal
        rng = np.random.default_rng(14)
        for _ in range(20):
            jacobian = centred_jacobian(rng, int(rng.integers(4, 7)), 3)
            points = project_to_torque(jacobian, tension_vertices(jacobian.shape[0], DEFAULT_BOUNDS))
            score, hull = torque_score(jacobian, DEFAULT_BOUNDS, R_MIN)
            supports = (points @ fibonacci_sphere().T).max(axis=0)
            self.assertGreaterEqual(supports.min(), score.radius * (1 - 1e-9))
            attained = min(abs(support(points, normal) - score.radius) for normal in hull.normals)
            self.assertLessEqual(attained, 1e-5 * score.radius)

    def test_scaling_the_jacobian_scales_the_radius(self):
        rng = np.random.default_rng(15)
        for dof in (2, 3):
            jacobian = centred_jacobian(rng, 5, dof)
            base = torque_score(jacobian, DEFAULT_BOUNDS, R_MIN)[0].radius
            for factor in (2.0, 0.37, 16.0):
                scaled = torque_score(factor * jacobian, DEFAULT_BOUNDS, R_MIN)[0].radius
                self.assertAlmostEqual(scaled / (factor * base), 1.0, delta=1e-9)

    def test_widening_tension_never_shrinks_radius(self):
        rng = np.random.default_rng(16)
        for _ in range(20):
            jacobian = centred_jacobian(rng, 5, 2)
            narrow = torque_score(jacobian, TensionBounds(20.0, 150.0), R_MIN)[0]
            wide = torque_score(jacobian, DEFAULT_BOUNDS, R_MIN)[0]
            self.assertGreaterEqual(wide.radius, narrow.radius - 1e-12)

    def test_rank_deficient_jacobian_scores_r_min(self):
        row = np.array([0.05, -0.02])
        jacobian = np.outer([1.0, -2.0, 0.5], row)
        score, hull = torque_score(jacobian, DEFAULT_BOUNDS, R_MIN)
        self.assertIsNone(hull)
        self.assertEqual(score.radius, R_MIN)
