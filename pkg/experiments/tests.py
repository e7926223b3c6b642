import csv
import dataclasses
import importlib
import inspect
import json
import math
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
import yaml
from django.apps import apps
from django.core.management import call_command
from django.core.management.base import CommandError
from django.db import connections
from django.test import SimpleTestCase

from mechanism.exceptions import ConfigurationError
from mechanism.kinematics import decode_genome
from moo.nsga2 import ParetoArchive, Sample
from objectives.types import Evaluation, Trajectory

from .config import load_config, parse_config, preset_names
from .designs import design_from_dict, design_to_dict, write_json
from .rendering import render_design, torque_panel
from .services import run_experiment, select_designs

SMOKE = """\
name: tiny
mechanism:
  disc_radius: 0.2
  link_length: 0.2
  joint_axes: [roll, yaw]
  wire_count: 3
  points_per_wire: 2
tension:
  f_min: 1.0
  f_max: 200.0
trajectory:
  waypoints:
    - [30, 30]
    - [-30, 30]
"""

SYMMETRIC_POINTS = [[[0.12, 0.12]] * 2, [[-0.12, 0.12]] * 2, [[-0.12, -0.12]] * 2, [[0.12, -0.12]] * 2]
PRESETS = [
    '2dof_m3_n2', '2dof_m3_n3', '2dof_m4_n2', '2dof_m4_n3',
    '3dof_m4_n2', '3dof_m4_n3', '3dof_m5_n2', '3dof_m5_n3', '3dof_m6_n2', '3dof_m6_n3',
]


def fake_sample(trial, e_cross, log_e_torque):
    return Sample(trial, 1, np.zeros(4), (float(e_cross), -log_e_torque), Evaluation(e_cross, log_e_torque))


class ConfigTests(SimpleTestCase):
    def test_all_presets_parse(self):
        self.assertEqual(preset_names(), sorted(PRESETS + ['smoke']))
        for name in PRESETS:
            experiment = load_config(name)
            self.assertEqual(experiment.name, name)
            self.assertEqual(experiment.bounds.f_max, 200.0)
            self.assertEqual(experiment.ga.evaluations, 30000)
            self.assertEqual(len(experiment.trajectory), 4 if name.startswith('2dof') else 8)

    def test_degrees_become_radians(self):
        experiment = load_config('3dof_m4_n2')
        np.testing.assert_allclose(experiment.trajectory.waypoints[0], np.radians([20, 20, 30]))
        self.assertEqual(experiment.mechanism.joint_axes, ('roll', 'pitch', 'yaw'))

    def test_defaults_fill_missing_sections(self):
        experiment = parse_config(SMOKE)
        self.assertEqual(experiment.epsilon, 1e-4)
        self.assertEqual(experiment.r_min, 1e-3)
        self.assertEqual(experiment.ga.population_size, 50)
        self.assertEqual(experiment.design_2_policy, 'global')
        self.assertFalse(experiment.trajectory.close_loop)
        self.assertIsNone(experiment.sphere_center)

    def test_errors_carry_line_numbers(self):
        text = SMOKE.replace('wire_count: 3', 'wire_count: 0')
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(text, 'bad.yaml')
        self.assertIn('bad.yaml:6: mechanism.wire_count:', str(ctx.exception))

    def test_waypoint_errors_point_at_the_waypoint(self):
        text = SMOKE.replace('- [-30, 30]', '- [-30, oops]')
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(text, 'bad.yaml')
        self.assertIn('bad.yaml:14: trajectory.waypoints.1.1:', str(ctx.exception))

    def test_waypoint_dimension_must_match_joint_axes(self):
        text = SMOKE.replace('[30, 30]', '[30, 30, 0]').replace('[-30, 30]', '[-30, 30, 0]')
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(text, 'bad.yaml')
        self.assertIn('trajectory.waypoints', str(ctx.exception))

    def test_yaml_syntax_error(self):
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config('mechanism:\n  disc_radius: [0.2\n', 'broken.yaml')
        self.assertIn('broken.yaml:', str(ctx.exception))
        self.assertIn('invalid YAML', str(ctx.exception))

    def test_unknown_preset(self):
        with self.assertRaises(ConfigurationError):
            load_config('no_such_preset')


class DesignFileTests(SimpleTestCase):
    def setUp(self):
        self.cfg = parse_config(SMOKE).mechanism

    def test_points_and_genome_agree(self):
        genome = np.random.default_rng(4).uniform(-1, 1, self.cfg.genome_length)
        design = decode_genome(genome, self.cfg)
        data = json.loads(json.dumps(design_to_dict(self.cfg, design, genome)))
        np.testing.assert_array_equal(design_from_dict(data, self.cfg).points, design.points)
        del data['points']
        np.testing.assert_array_equal(design_from_dict(data, self.cfg).points, design.points)

    def test_dimension_mismatch(self):
        with self.assertRaises(ConfigurationError):
            design_from_dict({'points': SYMMETRIC_POINTS}, self.cfg)
        with self.assertRaises(ConfigurationError):
            design_from_dict({}, self.cfg)


class SelectDesignsTests(SimpleTestCase):
    def setUp(self):
        self.archive = ParetoArchive()
        for sample in (fake_sample(0, 0, -20.0), fake_sample(1, 2, -12.0), fake_sample(2, 5, -9.0), fake_sample(3, 0, -18.0)):
            self.archive.add(sample)

    def test_global_policy(self):
        design_1, design_2 = select_designs(self.archive)
        self.assertEqual((design_1.trial, design_2.trial), (3, 2))

    def test_crossing_policy_falls_back_to_global(self):
        archive = ParetoArchive()
        archive.add(fake_sample(0, 0, -7.0))
        self.assertEqual(select_designs(archive, 'crossing')[1].trial, 0)
        self.assertEqual(select_designs(self.archive, 'crossing')[1].trial, 2)


class RenderingTests(SimpleTestCase):
    def test_square_torque_polygon(self):
        context = torque_panel(0, 0, [[1, 1], [-1, 1], [-1, -1], [1, -1], [0.2, 0.1]], 1.0)
        self.assertEqual(len(context['outline'].split()), 4)
        reach = 1.1
        self.assertAlmostEqual(context['circle']['r'], (300 - 48) / (2 * reach), places=2)

    def test_rest_pose_draws_each_wire_in_both_views(self):
        experiment = parse_config(SMOKE)
        design = decode_genome(np.zeros(experiment.mechanism.genome_length), experiment.mechanism)
        experiment = dataclasses.replace(experiment, trajectory=Trajectory(np.zeros((2, 2))))
        svg = render_design(experiment, design, waypoints=[0])['waypoint_1.svg']
        self.assertTrue(svg.startswith('<svg'))
        self.assertEqual(svg.count('<polyline'), 2 * experiment.mechanism.wire_count)
        for points in svg.split('<polyline points="')[1:]:
            self.assertEqual(len(points.split('"')[0].split()), 2)

    def test_three_axis_projection_drops_pitch(self):
        experiment = load_config('3dof_m4_n2')
        design = decode_genome(np.full(experiment.mechanism.genome_length, 0.3), experiment.mechanism)
        svg = render_design(experiment, design, waypoints=[2])['waypoint_3.svg']
        self.assertIn('torque (roll, yaw)', svg)
        self.assertIn('Waypoint 3', svg)


class CommandTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def call(self, *args, **options):
        out, err = StringIO(), StringIO()
        call_command(*args, stdout=out, stderr=err, **options)
        return out.getvalue(), err.getvalue()

    def design_file(self, points, name='design.json'):
        return str(write_json(self.dir / name, {'points': points}))

    def test_evaluate_symmetric_design(self):
        out, _ = self.call('evaluate', self.design_file(SYMMETRIC_POINTS), config='2dof_m4_n2')
        result = json.loads(out)
        self.assertEqual(result['e_cross'], 0)
        self.assertEqual(len(result['per_waypoint_radius']), 4)
        self.assertEqual(result['link_contacts'], [])

    def test_evaluate_flags_centre_anchors(self):
        out, err = self.call('evaluate', self.design_file([[[0.0, 0.0]] * 2] * 3), config='smoke')
        self.assertEqual(len(json.loads(out)['link_contacts']), 6)
        self.assertIn('touches', err)

    def test_fold_doubles_radii(self):
        rng = np.random.default_rng(6)
        experiment = load_config('2dof_m4_n2')
        design = decode_genome(rng.uniform(-1, 1, experiment.mechanism.genome_length), experiment.mechanism)
        path = self.design_file(design.points.tolist())
        plain = json.loads(self.call('evaluate', path, config='2dof_m4_n2')[0])
        folded = json.loads(self.call('evaluate', path, config='2dof_m4_n2', fold=True)[0])
        for before, after in zip(plain['per_waypoint_radius'], folded['per_waypoint_radius']):
            if before > 1e-3:
                self.assertAlmostEqual(after / before, 2.0, delta=1e-9)

    def test_dimension_mismatch_exits_with_config_error(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('evaluate', self.design_file(SYMMETRIC_POINTS), config='smoke')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_invalid_config_exits_with_config_error(self):
        bad = self.dir / 'bad.yaml'
        bad.write_text(SMOKE.replace('f_max: 200.0', 'f_max: -1'))
        with self.assertRaises(CommandError) as ctx:
            self.call('run', config=str(bad), out=str(self.dir / 'out'))
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('bad.yaml:8: tension', str(ctx.exception))

    def test_unwritable_output_exits_with_runtime_error(self):
        blocker = self.dir / 'file'
        blocker.write_text('')
        with self.assertRaises(CommandError) as ctx:
            self.call('run', config='smoke', out=str(blocker / 'out'))
        self.assertEqual(ctx.exception.returncode, 3)

    def test_run_smoke_preset(self):
        out_dir = self.dir / 'run'
        out, _ = self.call('run', config='smoke', out=str(out_dir), seed=7)
        self.assertIn('40 evaluations', out)
        with open(out_dir / 'samples.csv', newline='') as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ['trial', 'e_cross', 'log_e_torque'] + [f"g{i}" for i in range(12)])
        self.assertEqual(len(rows), 41)
        pareto = json.loads((out_dir / 'pareto.json').read_text())
        self.assertGreaterEqual(len(pareto['entries']), 1)
        for name in ('pareto_scatter.svg', 'design_1.json', 'design_2.json', 'design_1_waypoint_1.svg', 'design_2_waypoint_4.svg'):
            self.assertTrue((out_dir / name).is_file(), name)

        design_1 = json.loads((out_dir / 'design_1.json').read_text())
        best = min(pareto['entries'], key=lambda e: (e['evaluation']['e_cross'], -e['evaluation']['log_e_torque']))
        self.assertEqual(design_1['trial'], best['trial'])
        reevaluated = json.loads(self.call('evaluate', str(out_dir / 'design_1.json'), config='smoke')[0])
        self.assertEqual(reevaluated['e_cross'], design_1['evaluation']['e_cross'])
        self.assertEqual(reevaluated['log_e_torque'], design_1['evaluation']['log_e_torque'])

    def test_run_is_deterministic(self):
        experiment = load_config('smoke')
        first = run_experiment(experiment, self.dir / 'a')
        second = run_experiment(experiment, self.dir / 'b')
        for name in ('samples.csv', 'pareto.json'):
            self.assertEqual((first.out_dir / name).read_bytes(), (second.out_dir / name).read_bytes())
        self.assertEqual(len(first.samples), experiment.ga.evaluations)

    def test_oracle_reports_no_violations(self):
        out, _ = self.call('oracle', self.design_file(SYMMETRIC_POINTS), config='2dof_m4_n2', samples=2001)
        report = json.loads(out)
        self.assertEqual(report['violations'], 0)
        self.assertTrue(all(record['oracle_min'] > 2e-4 for record in report['records']))

    def test_oracle_needs_two_samples(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('oracle', self.design_file(SYMMETRIC_POINTS), config='2dof_m4_n2', samples=1)
        self.assertEqual(ctx.exception.returncode, 2)

    def test_render_writes_every_waypoint(self):
        path = self.design_file(SYMMETRIC_POINTS, 'symmetric.json')
        self.call('render', path, config='2dof_m4_n2', out=str(self.dir / 'svg'))
        self.assertEqual(sorted(p.name for p in (self.dir / 'svg').iterdir()), [f"symmetric_waypoint_{i}.svg" for i in range(1, 5)])
        self.call('render', path, config='2dof_m4_n2', waypoint='2', out=str(self.dir / 'one'))
        self.assertEqual([p.name for p in (self.dir / 'one').iterdir()], ['symmetric_waypoint_2.svg'])


class EvaluateDesignViewTests(SimpleTestCase):
    def test_evaluates_design(self):
        body = {'config': yaml.safe_load(SMOKE), 'design': {'genome': [0.3, -0.2, -0.4, 0.1, 0.5, 0.5, -0.6, -0.3, 0.0, 0.9, 0.2, -0.8]}}
        response = self.client.post('/api/designs/evaluate/', data=json.dumps(body), content_type='application/json')
        self.assertEqual(response.status_code, 200)
        result = response.json()
        self.assertEqual(result['e_cross'], sum(result['per_segment_crossings']))
        self.assertAlmostEqual(result['log_e_torque'], sum(math.log(r) for r in result['per_waypoint_radius']), places=12)

    def test_rejects_bad_config(self):
        body = {'config': {'mechanism': {}}, 'design': {'genome': []}}
        response = self.client.post('/api/designs/evaluate/', data=json.dumps(body), content_type='application/json')
        self.assertEqual(response.status_code, 400)
        self.assertIn('mechanism', response.json()['error'])


PROJECT_MODULES = [
    'geometry.motion', 'geometry.proximity',
    'mechanism.exceptions', 'mechanism.kinematics', 'mechanism.types',
    'torque_space.polytope',
    'objectives.crossings', 'objectives.evaluation', 'objectives.oracle', 'objectives.types',
    'moo.nsga2',
    'experiments.config', 'experiments.designs', 'experiments.rendering', 'experiments.serializers',
    'experiments.services', 'experiments.views', 'experiments.management.base',
    'experiments.management.commands.evaluate', 'experiments.management.commands.oracle',
    'experiments.management.commands.render', 'experiments.management.commands.run',
    'tendon_design.settings',
]


def documented_objects(module):
    yield module.__name__, module
    for name, obj in vars(module).items():
        if getattr(obj, '__module__', None) != module.__name__:
            continue
        if inspect.isfunction(obj):
            yield f"{module.__name__}.{name}", obj
        elif inspect.isclass(obj):
            yield f"{module.__name__}.{name}", obj
            for attr, member in vars(obj).items():
                if isinstance(member, property):
                    member = member.fget
                elif isinstance(member, (staticmethod, classmethod)):
                    member = member.__func__
                if inspect.isfunction(member):
                    yield f"{module.__name__}.{name}.{attr}", member


class ProjectSetupTests(SimpleTestCase):
    def test_experiments_app_declares_no_models(self):
        config = apps.get_app_config('experiments')
        self.assertEqual(list(config.get_models()), [])
        self.assertNotIn('default_auto_field', vars(type(config)))

    def test_no_database_is_configured(self):
        self.assertEqual(connections['default'].settings_dict['ENGINE'], 'django.db.backends.dummy')
        self.assertFalse(apps.is_installed('django.contrib.auth'))
        self.assertFalse(apps.is_installed('django.contrib.contenttypes'))

    def test_single_line_docstrings_have_no_trailing_period(self):
        offenders = []
        for module_name in PROJECT_MODULES:
            for qualname, obj in documented_objects(importlib.import_module(module_name)):
                doc = obj.__doc__
                if doc and '\n' not in doc and doc.rstrip().endswith('.'):
                    offenders.append(qualname)
        self.assertEqual(offenders, [])
