from mechanism.exceptions import ConfigurationError
from objectives.oracle import DEFAULT_SAMPLES, oracle_report

from ..base import CONFIG_ERROR, ExperimentCommand


class Command(ExperimentCommand):
    help = 'Dense k-grid minimum distance of every check pair on every trajectory step'

    def add_arguments(self, parser):
        parser.add_argument('design', help='Design JSON file')
        self.add_config_argument(parser)
        parser.add_argument('--samples', type=int, default=DEFAULT_SAMPLES, help='k samples per trajectory step')

    def handle(self, *args, **options):
        experiment = self.load_experiment(options)
        design = self.load_design(options['design'], experiment.mechanism)
        try:
            records = oracle_report(
                experiment.mechanism, design, experiment.trajectory, experiment.epsilon, options['samples']
            )
        except ConfigurationError as exc:
            self.fail(str(exc), CONFIG_ERROR)

        rows = [record.as_dict(experiment.epsilon) for record in records]
        violations = sum(row['violation'] for row in rows)
        self.write_json({
            'epsilon': experiment.epsilon,
            'samples': options['samples'],
            'violations': violations,
            'records': rows,
        })
        if violations:
            self.stderr.write(self.style.WARNING(f"{violations} guard-band violation(s)"))
