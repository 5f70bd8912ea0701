import os

from django.core.management.base import CommandError

from rannlr.management.base import EXIT_CONFIGURATION, SolverCommand
from rannlr.rescaling import default_rescaling
from rannlr.sampling import scaled_distribution
from rannlr.solver import solve


class Command(SolverCommand):
    help = ('Runs the solver and writes the dual-proportional sampling distribution after the given outer '
            'iterations, one constraint_index,prob CSV per iteration.')

    def add_arguments(self, parser):
        super(Command, self).add_arguments(parser)
        parser.add_argument('--at-iters', dest='at_iters', default='5,80',
                            help='Comma separated outer iterations, 0 is the initial distribution.')
        parser.add_argument('--out-dir', dest='out_dir', default='.')

    def handle(self, *args, **options):
        try:
            wanted = sorted({int(k) for k in options['at_iters'].split(',') if k.strip()})
        except ValueError:
            raise CommandError('--at-iters must be a comma separated list of integers, got %r.'
                               % options['at_iters'], returncode=EXIT_CONFIGURATION)
        if not wanted or wanted[0] < 0:
            raise CommandError('--at-iters needs at least one non-negative iteration.',
                               returncode=EXIT_CONFIGURATION)

        problem = self.build_instance(options)
        cfg = self.solver_config(options)
        if cfg.K < wanted[-1]:
            cfg.K = wanted[-1]
        written = []

        def dump(k, x, dual):
            if k in wanted:
                path = os.path.join(options['out_dir'], 'sampling_k%d.csv' % k)
                scaled_distribution(dual).to_csv(path)
                written.append(path)

        self.run_benchmark(lambda: solve(problem, default_rescaling(), cfg, callbacks=[dump]), options)
        for path in written:
            self.stderr.write('Wrote %s' % path)
