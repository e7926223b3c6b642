from mechanism.exceptions import ConfigurationError
from moo.nsga2 import EvolutionError

from ...services import OutputError, run_experiment
from ..base import CONFIG_ERROR, RUNTIME_ERROR, ExperimentCommand


class Command(ExperimentCommand):
    help = 'Optimizes a wire arrangement and writes samples, Pareto archive, selected designs and SVGs'

    def add_arguments(self, parser):
        self.add_config_argument(parser)
        parser.add_argument('--out', help='Output directory (defaults to the config\'s output entry)')
        parser.add_argument('--seed', type=int, help='Overrides ga.seed')

    def handle(self, *args, **options):
        experiment = self.load_experiment(options)
        out_dir = options['out'] or experiment.output
        if not out_dir:
            self.fail('No output directory: pass --out or set output in the config', CONFIG_ERROR)
        if options['seed'] is not None and options['seed'] < 0:
            self.fail(f"--seed must be non-negative, got {options['seed']}", CONFIG_ERROR)

        try:
            bundle = run_experiment(experiment, out_dir, options['seed'])
        except ConfigurationError as exc:
            self.fail(str(exc), CONFIG_ERROR)
        except (OutputError, EvolutionError) as exc:
            self.fail(str(exc), RUNTIME_ERROR)

        d1, d2 = bundle.design_1.result, bundle.design_2.result
        self.stdout.write(f"{len(bundle.samples)} evaluations, {len(bundle.archive)} archived designs")
        self.stdout.write(f"Design-1: E_cross={d1.e_cross}, ln E_torque={d1.log_e_torque:.6f}")
        self.stdout.write(f"Design-2: E_cross={d2.e_cross}, ln E_torque={d2.log_e_torque:.6f}")
        self.stdout.write(self.style.SUCCESS(f"Results written to {bundle.out_dir}"))
