from rannlr.bench.baseline import baseline_primal_dual
from rannlr.management.base import BenchmarkCommand


class Command(BenchmarkCommand):
    help = 'Runs the projected primal-dual subgradient baseline on a benchmark instance.'

    def add_arguments(self, parser):
        super(Command, self).add_arguments(parser)
        parser.add_argument('--steps', type=int, default=30000)
        parser.add_argument('--step', type=float, default=1e-4)
        parser.add_argument('--record-every', dest='record_every', type=int, default=1000)

    def handle(self, *args, **options):
        problem = self.build_instance(options)
        self.run_benchmark(
            lambda: baseline_primal_dual(problem, options['steps'], options['step'],
                                         record_every=options['record_every']),
            options,
        )
