"""
Long-running end-to-end checks. Excluded from the fast suite with
`python manage.py test --exclude-tag=acceptance`.
"""
import dataclasses
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, tag

from mechanism.kinematics import decode_genome, fold_design, muscle_jacobian
from mechanism.tests import finite_difference_jacobian
from moo.nsga2 import non_dominated_sort
from moo.tests import brute_force_fronts
from objectives.evaluation import evaluate
from objectives.oracle import DEFAULT_SAMPLES, oracle_report
from objectives.types import Trajectory
from torque_space.polytope import (
    TensionBounds,
    build_hull,
    inscribed_radius,
    project_to_torque,
    tension_vertices,
    torque_score,
)
from torque_space.tests import centred_jacobian, fibonacci_sphere, ray_exit_radius, support

from .config import load_config
from .services import run_experiment

PRESETS = [
    '2dof_m3_n2', '2dof_m3_n3', '2dof_m4_n2', '2dof_m4_n3',
    '3dof_m4_n2', '3dof_m4_n3', '3dof_m5_n2', '3dof_m5_n3', '3dof_m6_n2', '3dof_m6_n3',
]


def random_design(rng, cfg):
    return decode_genome(rng.uniform(-1.0, 1.0, cfg.genome_length), cfg)


def waypoint_radii(experiment, design):
    cfg = experiment.mechanism
    return [
        torque_score(muscle_jacobian(cfg, design, q), experiment.bounds, experiment.r_min)[0].radius
        for q in experiment.trajectory.waypoints
    ]


def with_budget(experiment, population, generations):
    return dataclasses.replace(
        experiment, ga=dataclasses.replace(experiment.ga, population_size=population, generations=generations)
    )


@tag('acceptance')
class FoldDoublingAcceptanceTests(SimpleTestCase):
    def assertFoldMultipliesTorque(self, preset, designs, seed):
        experiment = load_config(preset)
        cfg = experiment.mechanism
        rng = np.random.default_rng(seed)
        checked = attempts = 0
        while checked < designs and attempts < 20000:
            attempts += 1
            design = random_design(rng, cfg)
            if min(waypoint_radii(experiment, design)) <= experiment.r_min:
                continue
            plain = evaluate(cfg, design, experiment.trajectory, experiment.bounds, experiment.epsilon, experiment.r_min)
            folded = evaluate(
                cfg.with_points_per_wire(3), fold_design(design), experiment.trajectory,
                experiment.bounds, experiment.epsilon, experiment.r_min,
            )
            gain = folded.log_e_torque - plain.log_e_torque
            self.assertAlmostEqual(gain, len(experiment.trajectory) * math.log(2), delta=1e-9)
            checked += 1
        self.assertEqual(checked, designs)

    def test_two_axis_fold_gains_sixteen_times(self):
        self.assertFoldMultipliesTorque('2dof_m3_n2', 20, seed=101)

    def test_three_axis_fold_gains_256_times(self):
        self.assertFoldMultipliesTorque('3dof_m6_n2', 20, seed=102)


@tag('acceptance')
class CrossingOracleAcceptanceTests(SimpleTestCase):
    def test_detector_agrees_with_dense_grid(self):
        rng = np.random.default_rng(103)
        experiments = [load_config(name) for name in PRESETS]
        checks = violations = 0
        for case in range(1000):
            experiment = experiments[case % len(experiments)]
            traj = experiment.trajectory
            i, j = traj.steps[int(rng.integers(len(traj.steps)))]
            step = Trajectory(traj.waypoints[[i, j]])
            design = random_design(rng, experiment.mechanism)
            records = oracle_report(experiment.mechanism, design, step, experiment.epsilon, DEFAULT_SAMPLES)
            checks += len(records)
            violations += sum(record.violates_guard_band(experiment.epsilon) for record in records)
        self.assertGreater(checks, 1000)
        self.assertEqual(violations, 0)


@tag('acceptance')
class JacobianAcceptanceTests(SimpleTestCase):
    def test_matches_central_differences(self):
        rng = np.random.default_rng(104)
        experiments = [load_config(name) for name in PRESETS]
        worst = 0.0
        for sample in range(1000):
            cfg = experiments[sample % len(experiments)].mechanism
            design = random_design(rng, cfg)
            q = rng.uniform(-np.pi / 4, np.pi / 4, cfg.dof_count)
            error = np.abs(muscle_jacobian(cfg, design, q) - finite_difference_jacobian(cfg, design, q, h=1e-6))
            worst = max(worst, float(error.max()))
        self.assertLess(worst, 1e-6)


@tag('acceptance')
class InscribedRadiusAcceptanceTests(SimpleTestCase):
    bounds = TensionBounds(1.0, 200.0)
    r_min = 1e-3

    def test_planar_radius_matches_ray_casting(self):
        rng = np.random.default_rng(105)
        for _ in range(200):
            score, hull = torque_score(centred_jacobian(rng, int(rng.integers(3, 9)), 2), self.bounds, self.r_min)
            self.assertTrue(score.origin_interior)
            self.assertAlmostEqual(score.radius / ray_exit_radius(hull), 1.0, delta=1e-5)

    def test_spatial_radius_matches_support_function(self):
        rng = np.random.default_rng(106)
        directions = fibonacci_sphere()
        for _ in range(200):
            jacobian = centred_jacobian(rng, int(rng.integers(4, 9)), 3)
            points = project_to_torque(jacobian, tension_vertices(jacobian.shape[0], self.bounds))
            score, hull = torque_score(jacobian, self.bounds, self.r_min)
            self.assertTrue(score.origin_interior)
            self.assertGreaterEqual((points @ directions.T).max(axis=0).min(), score.radius * (1 - 1e-9))
            attained = min(abs(support(points, normal) - score.radius) for normal in hull.normals)
            self.assertLessEqual(attained, 1e-5 * score.radius)

    def test_origin_outside_scores_exactly_r_min(self):
        rng = np.random.default_rng(107)
        for sample in range(200):
            dof = 2 + sample % 2
            jacobian = centred_jacobian(rng, int(rng.integers(dof + 1, 9)), dof)
            points = project_to_torque(jacobian, tension_vertices(jacobian.shape[0], self.bounds))
            direction = rng.normal(size=dof)
            shift = 3.0 * np.abs(points).max() * direction / np.linalg.norm(direction)
            score = inscribed_radius(build_hull(points + shift), self.r_min)
            self.assertFalse(score.origin_interior)
            self.assertEqual(score.radius, 1.0e-3)


@tag('acceptance')
class SortAcceptanceTests(SimpleTestCase):
    def test_matches_pairwise_dominance(self):
        rng = np.random.default_rng(108)
        for _ in range(500):
            size = int(rng.integers(1, 60))
            # integer-valued first objective produces ties like E_cross does
            objectives = np.stack([rng.integers(0, 6, size).astype(float), rng.normal(size=size)], axis=1)
            fronts = non_dominated_sort(objectives)
            self.assertEqual([sorted(front) for front in fronts], [sorted(front) for front in brute_force_fronts(objectives)])


@tag('acceptance')
class OptimizationAcceptanceTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.tmp = tempfile.TemporaryDirectory()
        experiment = with_budget(load_config('2dof_m3_n2'), 50, 100)
        cls.first = run_experiment(experiment, Path(cls.tmp.name) / 'first')
        cls.second = run_experiment(experiment, Path(cls.tmp.name) / 'second')

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()
        super().tearDownClass()

    def test_budget_is_spent(self):
        self.assertEqual(len(self.first.samples), 5000)
        lines = (self.first.out_dir / 'samples.csv').read_text().splitlines()
        self.assertEqual(len(lines), 5001)

    def test_crossing_free_design_with_full_torque_exists(self):
        crossing_free = [
            entry for entry in self.first.archive
            if entry.result.e_cross == 0 and min(entry.result.per_waypoint_radius) > 1e-3
        ]
        self.assertTrue(crossing_free)
        strongest = max(self.first.archive, key=lambda entry: entry.result.log_e_torque)
        self.assertGreaterEqual(strongest.result.log_e_torque, crossing_free[0].result.log_e_torque)
        self.assertEqual(self.first.design_1.result.e_cross, 0)

    def test_repeat_run_is_byte_identical(self):
        for name in ('samples.csv', 'pareto.json'):
            self.assertEqual((self.first.out_dir / name).read_bytes(), (self.second.out_dir / name).read_bytes())


@tag('acceptance')
class PresetSmokeAcceptanceTests(SimpleTestCase):
    def test_every_preset_completes_a_short_run(self):
        with tempfile.TemporaryDirectory() as tmp:
            for name in PRESETS:
                bundle = run_experiment(with_budget(load_config(name), 10, 10), Path(tmp) / name)
                self.assertEqual(len(bundle.samples), 100)
                self.assertTrue((bundle.out_dir / 'design_1.json').is_file())
