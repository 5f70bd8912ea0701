"""
Shared parts of the ``rannlr`` management commands: exit codes, logging verbosity, report output and the options
that select a benchmark instance and configure the solver.
"""
from __future__ import unicode_literals

import json
import logging

from django.core.management.base import BaseCommand, CommandError

from rannlr.conf import get_setting
from rannlr.exceptions import ConfigurationError, EvaluationError, SolverAbort
from rannlr.registry import problems
from rannlr.solver import SolverConfig
from rannlr.subroutines import SubroutineSpec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIGURATION = 2
EXIT_ABORT = 3

VERBOSITY_LEVELS = {0: logging.ERROR, 2: logging.INFO, 3: logging.DEBUG}


class RannlrCommand(BaseCommand):
    """
    A management command of the ``rannlr`` app. Library configuration errors leave with exit code 2.

    ``--verbosity`` sets the level of the ``rannlr`` loggers: 0 errors, 1 the ``log_level`` setting, 2 outer
    iterations, 3 inner stationarity checks.
    """
    requires_system_checks = []

    def execute(self, *args, **options):
        self.configure_logging(options.get('verbosity', 1))
        try:
            return super(RannlrCommand, self).execute(*args, **options)
        except ConfigurationError as e:
            raise CommandError('Configuration error: %s' % e, returncode=EXIT_CONFIGURATION)

    def configure_logging(self, verbosity):
        level = VERBOSITY_LEVELS.get(int(verbosity))
        if level is None:
            level = getattr(logging, str(get_setting('log_level')).upper(), logging.WARNING)
        logging.getLogger('rannlr').setLevel(level)

    def write_json(self, data):
        self.stdout.write(json.dumps(data, indent=2, sort_keys=True))

    def execute_run(self, run, out=None, csv=None, include_timing=True):
        """
        Call ``run()`` for a :py:class:`rannlr.report.RunReport`, write it and map library errors to exit codes.
        A run aborted by the stall rule still writes its partial report.
        """
        try:
            report = run()
        except ConfigurationError as e:
            raise CommandError(str(e), returncode=EXIT_CONFIGURATION)
        except SolverAbort as e:
            if e.report is not None:
                self.emit_report(e.report, out, csv, include_timing)
            raise CommandError('Solver aborted: %s' % e, returncode=EXIT_ABORT)
        except EvaluationError as e:
            logger.exception("Run failed")
            raise CommandError('Evaluation failed: %s' % e, returncode=EXIT_ABORT)
        self.emit_report(report, out, csv, include_timing)
        return report

    def emit_report(self, report, out=None, csv=None, include_timing=True):
        report.write(json_path=out, csv_path=csv, include_timing=include_timing)
        if out is None:
            self.stdout.write(report.to_json())
        self.stderr.write('%s' % report)


class BenchmarkCommand(RannlrCommand):
    """
    A command that runs on one of the benchmark instances, selected by a positional ``sip`` or ``alp``.
    """

    def add_arguments(self, parser):
        parser.add_argument('instance', choices=['sip', 'alp'])
        parser.add_argument('--m', type=int, help='Number of SIP constraints (required for sip).')
        parser.add_argument('--precision', type=float, default=0.2, help='ALP grid step.')
        parser.add_argument('--beta', type=float, default=None,
                            help='Constraint normalization (default 1 for sip, 600 for alp).')
        parser.add_argument('--tikhonov', type=float, default=0.0, help='ALP strong convexity term.')
        parser.add_argument('--raw-variables', dest='raw_variables', action='store_true',
                            help='Solve the ALP in the value function weights instead of normalized variables.')
        parser.add_argument('--out', help='Write the JSON report here instead of stdout.')
        parser.add_argument('--csv', help='Write the trajectory CSV here.')
        parser.add_argument('--no-timing', dest='no_timing', action='store_true',
                            help='Leave the wall_ms column out of the CSV so reruns compare byte for byte.')

    def build_instance(self, options):
        if options['instance'] == 'sip':
            if options['m'] is None:
                raise CommandError('--m is required for the sip instance.', returncode=EXIT_CONFIGURATION)
            beta = 1.0 if options['beta'] is None else options['beta']
            return problems.build('sip', m=options['m'], beta=beta)

        beta = 600.0 if options['beta'] is None else options['beta']
        return problems.build('alp', h=options['precision'], beta=beta, tikhonov=options['tikhonov'],
                              normalized=not options['raw_variables'])

    def run_benchmark(self, run, options):
        return self.execute_run(run, out=options['out'], csv=options['csv'],
                                include_timing=not options['no_timing'])


class SolverCommand(BenchmarkCommand):
    """
    A benchmark command that also configures the randomized solver.
    """

    def add_arguments(self, parser):
        super(SolverCommand, self).add_arguments(parser)
        parser.add_argument('--subroutine', choices=['sgd', 'svrg', 'full'], default='svrg')
        parser.add_argument('--scaling-N', dest='scaling_N', type=float, default=100.0)
        parser.add_argument('--eps', type=float, default=1e-4, help='Inner stationarity tolerance.')
        parser.add_argument('--epoch-M', dest='epoch_M', type=int, default=20, help='SVRG epoch length.')
        parser.add_argument('--step', type=float, default=1e-4, help='Constant inner step size.')
        parser.add_argument('--K', type=int, default=50, help='Outer iterations.')
        parser.add_argument('--max-inner', dest='max_inner', type=int, default=100000)
        parser.add_argument('--check-interval', dest='check_interval', type=int, default=None)
        parser.add_argument('--lambda0', type=float, default=None,
                            help='Initial value of every dual, 1 by default.')
        parser.add_argument('--sampling', choices=['dual', 'uniform'], default='dual')
        parser.add_argument('--cold-start', dest='cold_start', action='store_true')
        parser.add_argument('--seed', type=int, default=0)

    def solver_config(self, options):
        spec = SubroutineSpec(
            kind=options['subroutine'],
            step_mode='constant',
            constant_step=options['step'],
            epoch_length=options['epoch_M'],
            check_interval=options['check_interval'],
            max_inner_iters=options['max_inner'],
        )
        return SolverConfig(
            N=options['scaling_N'],
            K=options['K'],
            eps=options['eps'],
            subroutine=spec,
            lambda0=options['lambda0'],
            master_seed=options['seed'],
            sampling=options['sampling'],
            warm_start=not options['cold_start'],
        )
