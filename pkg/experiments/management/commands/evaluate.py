import dataclasses

from mechanism.exceptions import ConfigurationError
from mechanism.kinematics import fold_design
from objectives.evaluation import evaluate, validate_design

from ..base import CONFIG_ERROR, ExperimentCommand


class Command(ExperimentCommand):
    help = 'Evaluates one design over the configured trajectory and prints the result as JSON'

    def add_arguments(self, parser):
        parser.add_argument('design', help='Design JSON file')
        self.add_config_argument(parser)
        parser.add_argument('--fold', action='store_true', help='Evaluate the exact-fold N=3 variant of an N=2 design')

    def handle(self, *args, **options):
        experiment = self.load_experiment(options)
        cfg = experiment.mechanism
        design = self.load_design(options['design'], cfg)
        try:
            if options['fold']:
                design = fold_design(design)
                cfg = cfg.with_points_per_wire(3)
            contacts = validate_design(cfg, design)
            evaluation = evaluate(
                cfg, design, experiment.trajectory, experiment.bounds,
                experiment.epsilon, experiment.r_min, experiment.sphere_center,
            )
        except ConfigurationError as exc:
            self.fail(str(exc), CONFIG_ERROR)

        for contact in contacts:
            self.stderr.write(self.style.WARNING(
                f"Anchor {contact['anchor']} of wire {contact['wire']} touches the {contact['disc']} link axis"
            ))
        self.write_json(dataclasses.replace(evaluation, link_contacts=contacts).as_dict())
