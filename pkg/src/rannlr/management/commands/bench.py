from rannlr.management.base import SolverCommand
from rannlr.rescaling import default_rescaling
from rannlr.solver import solve


class Command(SolverCommand):
    help = 'Runs the randomized nonlinear rescaling solver on a benchmark instance.'

    def handle(self, *args, **options):
        problem = self.build_instance(options)
        cfg = self.solver_config(options)
        precompute_ms = float(problem.metadata.get('precompute_ms', 0.0))

        def run():
            report = solve(problem, default_rescaling(), cfg)
            report.precompute_ms = precompute_ms
            return report

        self.run_benchmark(run, options)
