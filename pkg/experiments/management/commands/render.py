from pathlib import Path

from mechanism.exceptions import ConfigurationError
from objectives.evaluation import evaluate

from ...rendering import render_design
from ...services import OutputError, prepare_output_dir
from ..base import CONFIG_ERROR, RUNTIME_ERROR, ExperimentCommand


class Command(ExperimentCommand):
    help = 'Renders side view, top view and torque polygon of a design at its waypoints as SVG'

    def add_arguments(self, parser):
        parser.add_argument('design', help='Design JSON file')
        self.add_config_argument(parser)
        parser.add_argument('--waypoint', default='all', help='1-based waypoint index, or "all"')
        parser.add_argument('--out', default='.', help='Output directory')

    def waypoints(self, value, count):
        if value == 'all':
            return None
        try:
            index = int(value)
        except ValueError:
            index = 0
        if not 1 <= index <= count:
            self.fail(f"--waypoint must be 'all' or an index in 1..{count}, got {value}", CONFIG_ERROR)
        return [index - 1]

    def handle(self, *args, **options):
        experiment = self.load_experiment(options)
        design = self.load_design(options['design'], experiment.mechanism)
        waypoints = self.waypoints(options['waypoint'], len(experiment.trajectory))
        try:
            evaluation = evaluate(
                experiment.mechanism, design, experiment.trajectory, experiment.bounds,
                experiment.epsilon, experiment.r_min, experiment.sphere_center,
            )
            out_dir = prepare_output_dir(options['out'])
        except ConfigurationError as exc:
            self.fail(str(exc), CONFIG_ERROR)
        except OutputError as exc:
            self.fail(str(exc), RUNTIME_ERROR)

        stem = Path(options['design']).stem
        for name, svg in render_design(experiment, design, evaluation, waypoints).items():
            path = out_dir / f"{stem}_{name}"
            try:
                path.write_text(svg)
            except OSError as exc:
                self.fail(f"Cannot write {path}: {exc}", RUNTIME_ERROR)
            self.stdout.write(self.style.SUCCESS(f"Wrote {path}"))
