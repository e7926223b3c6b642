import json
import logging

from django.core.management.base import BaseCommand, CommandError

from mechanism.exceptions import ConfigurationError

from ..config import load_config
from ..designs import load_design

logger = logging.getLogger(__name__)

CONFIG_ERROR = 2
RUNTIME_ERROR = 3


class ExperimentCommand(BaseCommand):
    """Shared --config handling and exit codes for the experiment commands"""

    def add_config_argument(self, parser):
        parser.add_argument('--config', required=True, help='Config file path or preset name')

    def fail(self, message, returncode):
        logger.error(message)
        raise CommandError(message, returncode=returncode)

    def load_experiment(self, options):
        try:
            return load_config(options['config'])
        except ConfigurationError as exc:
            self.fail(str(exc), CONFIG_ERROR)

    def load_design(self, path, cfg):
        try:
            return load_design(path, cfg)
        except ConfigurationError as exc:
            self.fail(str(exc), CONFIG_ERROR)

    def write_json(self, data):
        self.stdout.write(json.dumps(data, indent=2))
