import json

from django.core.management.base import CommandError

from rannlr.exceptions import ConfigurationError
from rannlr.management.base import EXIT_CONFIGURATION, RannlrCommand
from rannlr.registry import problems
from rannlr.rescaling import DEFAULT_TAU, make_extrapolated
from rannlr.solver import SolverConfig, solve


class Command(RannlrCommand):
    help = ('Solves the problem described by a JSON configuration file with keys "instance" '
            '({"name": ..., "params": {...}}), "psi" ({"kind": ..., "tau": ...}) and "solver" (SolverConfig fields).')

    def add_arguments(self, parser):
        parser.add_argument('config', help='Path to the JSON configuration.')
        parser.add_argument('--out', help='Write the JSON report here instead of stdout.')
        parser.add_argument('--csv', help='Write the trajectory CSV here.')

    def handle(self, *args, **options):
        try:
            with open(options['config']) as fp:
                config = json.load(fp)
        except (OSError, ValueError) as e:
            raise CommandError('Cannot read configuration %s: %s' % (options['config'], e),
                               returncode=EXIT_CONFIGURATION)
        if not isinstance(config, dict) or 'instance' not in config:
            raise CommandError('The configuration needs an "instance" section.', returncode=EXIT_CONFIGURATION)

        instance = config['instance']
        try:
            problem = problems.build(instance['name'], **instance.get('params', {}))
            psi_options = config.get('psi', {})
            psi = make_extrapolated(psi_options.get('kind', 'exp'), psi_options.get('tau', DEFAULT_TAU))
            cfg = SolverConfig.from_dict(config.get('solver', {}))
        except (KeyError, TypeError, ConfigurationError) as e:
            raise CommandError('Invalid configuration: %s' % e, returncode=EXIT_CONFIGURATION)

        self.execute_run(lambda: solve(problem, psi, cfg), out=options['out'], csv=options['csv'])
