from django.core.management.base import CommandError

from rannlr.management.base import RannlrCommand
from rannlr.rescaling import DEFAULT_TAU, grid_points, make_extrapolated, verify_properties


class Command(RannlrCommand):
    help = 'Checks the defining properties of a built-in rescaling function on a grid and prints the result as JSON.'

    def add_arguments(self, parser):
        parser.add_argument('--kind', choices=['exp', 'log', 'fraction'], default='exp')
        parser.add_argument('--tau', type=float, default=DEFAULT_TAU)
        parser.add_argument('--lo', '--grid-lo', dest='lo', type=float, default=-10.0)
        parser.add_argument('--hi', '--grid-hi', dest='hi', type=float, default=10.0)
        parser.add_argument('--grid-step', '--step', dest='grid_step', type=float, default=0.01)

    def handle(self, *args, **options):
        psi = make_extrapolated(options['kind'], options['tau'])
        report = verify_properties(psi, grid_points(options['lo'], options['hi'], options['grid_step']))

        data = report.as_dict()
        data['coeffs'] = list(psi.coeffs)
        self.write_json(data)
        if not report.passed:
            failed = sorted(name for name, ok in report.checks.items() if not ok)
            raise CommandError('Failed checks: %s' % ', '.join(failed), returncode=1)
