import io
import json
import os
import tempfile
import time
from unittest import TestCase, mock, skipUnless

import numpy as np
from django.core.management import CommandError, call_command, get_commands
from scipy import optimize

from rannlr.bench.alp import (DEFAULT_COSTS, FULL_SCALE_OPTIMUM, AlpInstance, build_alp, demand_pmf, lp_max_2d,
                              lp_reference)
from rannlr.bench.baseline import METHOD_NAME, baseline_primal_dual
from rannlr.bench.sip import X2_MAX, build_sip, sip_coefficients, sip_reference
from rannlr.exceptions import ConfigurationError, DivergenceError, UnboundedProblem
from rannlr.management import execute_from_command_line
from rannlr.problem import DualState, max_violation
from rannlr.report import RunReport
from rannlr.rescaling import default_rescaling
from rannlr.sampling import scaled_distribution
from rannlr.solver import SolverConfig, solve
from rannlr.subroutines import SubroutineSpec
from rannlr_tests.problems import BrokenProblem, interior_problem

BENCHMARKS = os.environ.get('RANNLR_BENCHMARKS')


def sip_continuous_optimum():
    """The optimum for the continuous constraint set, by maximizing ``a(u)`` over ``(0, 1]``."""
    result = optimize.minimize_scalar(
        lambda u: -5.0 * np.sin(np.pi * np.sqrt(u)) / (1.0 + u * u),
        bounds=(1e-6, 1.0), method='bounded', options={'xatol': 1e-12},
    )
    return float(np.sqrt(X2_MAX / -result.fun))


class SipTest(TestCase):
    def test_coefficients(self):
        a = sip_coefficients(10000)
        self.assertEqual(a.shape, (10000,))
        self.assertAlmostEqual(a[-1], 0.0, places=12)
        self.assertAlmostEqual(a[2499], 5.0 / 1.0625, places=6)
        self.assertAlmostEqual(a[2499], 4.705882, places=6)
        self.assertTrue(np.all(a >= -1e-12))

    def test_reference_optimum(self):
        sip = build_sip(10000)
        x1, x2 = sip.reference['x']
        self.assertAlmostEqual(x1, 0.20523677, delta=1e-6)
        self.assertEqual(x2, X2_MAX)
        self.assertAlmostEqual(sip.reference_value, 3.221, delta=1e-3)
        self.assertAlmostEqual(x1, sip_continuous_optimum(), delta=1e-6)

    def test_reference_is_feasible_and_maximal(self):
        for m in (7, 100, 10000):
            sip = build_sip(m)
            x_star = np.array(sip.reference['x'])
            violation, _ = max_violation(sip, x_star)
            self.assertLessEqual(violation, 1e-12, msg=m)
            self.assertAlmostEqual(sip.objective(x_star), sip.reference_value, places=12)

            further = x_star + np.array([1e-6, 0.0])
            self.assertGreater(max_violation(sip, further)[0], 0.0, msg=m)

    def test_oracles(self):
        sip = build_sip(4, beta=2.0)
        x = np.array([0.5, 0.1])
        a = sip.coefficients
        np.testing.assert_allclose(sip.constraint_values(x), (0.1 - a * 0.25) / 2.0)
        np.testing.assert_allclose(sip.constraint_grads(x), np.column_stack([-a, np.ones(4)]) / 2.0)
        np.testing.assert_allclose(sip.constraint_values(x, [2]), [(0.1 - a[2] * 0.25) / 2.0])
        np.testing.assert_allclose(sip.objective_grad(x), [-3.0, -0.2])
        self.assertIn('sign_convention', sip.metadata)

    def test_invalid_size(self):
        with self.assertRaises(ConfigurationError):
            build_sip(0)

    def test_reference_reduction(self):
        x_star, f_star = sip_reference(np.array([0.0, 0.05]))
        self.assertEqual(x_star[0], 1.0)
        self.assertEqual(f_star, 1.0)


class AlpTest(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.alp = build_alp(h=0.5)

    def test_pmf(self):
        for h in (0.02, 0.2, 0.5, 1.0):
            demands = np.linspace(0.0, 10.0, int(round(10.0 / h)) + 1)
            pmf = demand_pmf(demands, h)
            self.assertAlmostEqual(pmf.sum(), 1.0, delta=1e-10)
            self.assertTrue(np.all(pmf > 0.0))
        self.assertAlmostEqual(self.alp.pmf.sum(), 1.0, delta=1e-10)

    def test_sizes(self):
        self.assertIsInstance(self.alp, AlpInstance)
        self.assertEqual(self.alp.m, 41 * 41)
        self.assertEqual(build_alp(h=0.2).m, 101 * 101)
        self.assertEqual(self.alp.constraint_matrix().shape, (self.alp.m, 2))

    def test_precision_must_divide_ranges(self):
        with self.assertRaises(ConfigurationError):
            build_alp(h=0.3)
        with self.assertRaises(ConfigurationError):
            build_alp(h=0.5, beta=0.0)

    def test_expectations(self):
        """Cost and expected next state of one pair, computed directly."""
        alp = self.alp
        s_index = int(np.argmin(np.abs(alp.states - 0.0)))
        a_index = int(np.argmin(np.abs(alp.actions - 5.0)))
        j = s_index * alp.actions.size + a_index
        self.assertEqual(alp.state_of[j], 0.0)
        self.assertEqual(alp.action_of[j], 5.0)

        c_p, c_h, c_b, c_d, c_l = DEFAULT_COSTS
        unclipped = 5.0 - alp.demands
        next_state = np.clip(unclipped, -10.0, 10.0)
        expected_cost = c_p * 5.0 + alp.pmf @ (
            c_h * np.maximum(next_state, 0.0) + c_b * np.maximum(-next_state, 0.0)
            + c_d * np.maximum(unclipped - 10.0, 0.0) + c_l * np.maximum(-10.0 - unclipped, 0.0)
        )
        self.assertAlmostEqual(alp.cost[j], expected_cost, places=10)
        self.assertAlmostEqual(alp.expected_next_state[j], alp.pmf @ next_state, places=12)

    def test_cost_table(self):
        self.assertTrue(np.all(np.isfinite(self.alp.cost)))
        self.assertTrue(np.all(self.alp.cost >= DEFAULT_COSTS[0] * self.alp.action_of - 1e-12))

    def test_reference_matches_linprog(self):
        theta, value = lp_reference(self.alp)
        G, c = self.alp.constraint_matrix(), self.alp.cost
        result = optimize.linprog(-self.alp.objective_weights, A_ub=G, b_ub=c, bounds=[(None, None)] * 2,
                                  method='highs')
        self.assertEqual(result.status, 0)
        self.assertAlmostEqual(value, -result.fun, delta=1e-6 * max(1.0, abs(value)))
        self.assertLessEqual(np.max(G @ theta - c), 1e-9 * max(1.0, float(np.max(np.abs(c)))))

    def test_problem_conversion(self):
        p = self.alp.problem(normalized=False)
        theta, value = lp_reference(self.alp)
        self.assertEqual(p.m, self.alp.m)
        self.assertAlmostEqual(p.reference_value, -value)
        self.assertAlmostEqual(p.objective(theta), -value, places=6)
        self.assertEqual(p.mu_f, 0.0)
        np.testing.assert_allclose(
            p.constraint_values(theta), (self.alp.cost - self.alp.constraint_matrix() @ theta) / self.alp.beta)
        self.assertEqual(self.alp.problem(tikhonov=0.5).mu_f, 0.5)

    def test_normalized_variables(self):
        raw, p = self.alp.problem(normalized=False), self.alp.problem()
        theta, value = lp_reference(self.alp)
        z = theta * self.alp.variable_scale
        np.testing.assert_allclose(self.alp.variable_scale, [0.05, 10.0])
        np.testing.assert_allclose(self.alp.theta(z), theta, rtol=1e-14)
        self.assertAlmostEqual(p.reference_value, -0.05 * value, places=9)
        self.assertAlmostEqual(p.objective(z), 0.05 * raw.objective(theta), places=9)
        np.testing.assert_allclose(p.constraint_values(z), raw.constraint_values(theta), rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(p.lower, [-500.0, -1e4])
        np.testing.assert_allclose(p.upper, [500.0, 1e4])
        self.assertTrue(p.metadata['normalized'])
        self.assertFalse(raw.metadata['normalized'])

    def test_normalization_keeps_feasible_set(self):
        raw, normalized = build_alp(h=1.0, beta=1.0).problem(normalized=False), build_alp(h=1.0, beta=600.0)
        theta_star = lp_reference(build_alp(h=1.0))[0]
        rng = np.random.default_rng(0)
        points = theta_star + rng.normal(scale=[50.0, 5.0], size=(1000, 2))
        for variables in (normalized.problem(normalized=False), normalized.problem()):
            scale = np.asarray(variables.metadata['variable_scale'])
            agree = [np.all(raw.constraint_values(t) >= 0.0) == np.all(variables.constraint_values(t * scale) >= 0.0)
                     for t in points]
            self.assertTrue(all(agree))

    def test_full_scale_reference(self):
        grid = np.zeros(1001)
        alp = AlpInstance(h=0.02, beta=600.0, discount=0.95, costs=DEFAULT_COSTS, states=grid, actions=grid,
                          demands=np.zeros(501), pmf=np.zeros(501), cost=np.zeros(1), expected_next_state=np.zeros(1))
        self.assertEqual(alp.m, 1002001)
        self.assertEqual(alp.reference_value(), FULL_SCALE_OPTIMUM)
        self.assertEqual(alp.reference_value(), 2146.94)

        other = AlpInstance(h=0.02, beta=600.0, discount=0.9, costs=DEFAULT_COSTS, states=grid, actions=grid,
                            demands=np.zeros(501), pmf=np.zeros(501), cost=np.zeros(1), expected_next_state=np.zeros(1))
        self.assertIsNone(other.reference_value())


class LinearProgramTest(TestCase):
    def test_single_constraint(self):
        theta, value = lp_max_2d([1.0, 2.0], [[1.0, 2.0]], [3.0])
        np.testing.assert_allclose(theta, [3.0, 0.0])
        self.assertEqual(value, 3.0)

    def test_unbounded(self):
        with self.assertRaises(UnboundedProblem):
            lp_max_2d([1.0, 1.0], [[1.0, 0.0]], [1.0])

    def test_envelope_against_linprog(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            m = int(rng.integers(2, 40))
            G = np.column_stack([rng.uniform(0.1, 2.0, m), rng.uniform(-3.0, 3.0, m)])
            G[0], G[1] = [1.0, -2.0], [1.0, 2.0]
            c = rng.uniform(-5.0, 5.0, m)
            w = np.array([rng.uniform(0.5, 2.0), rng.uniform(-0.5, 0.5)])
            theta, value = lp_max_2d(w, G, c)
            result = optimize.linprog(-w, A_ub=G, b_ub=c, bounds=[(None, None)] * 2, method='highs')
            self.assertEqual(result.status, 0)
            self.assertAlmostEqual(value, -result.fun, delta=1e-6 * max(1.0, abs(value)))
            self.assertLessEqual(np.max(G @ theta - c), 1e-9)

    def test_size_limit(self):
        with self.assertRaises(ConfigurationError):
            lp_reference(build_alp(h=1.0), max_constraints=10)


class BaselineTest(TestCase):
    def test_zero_duals_reduce_to_projected_gradient(self):
        p = interior_problem()
        report = baseline_primal_dual(p, 50, 0.1, record_every=10)
        x = np.zeros(2)
        for _ in range(50):
            x = p.project(x - 0.1 * p.objective_grad(x))
        np.testing.assert_allclose(report.x, x, rtol=1e-14, atol=1e-14)
        self.assertTrue(all(record.lam_l1 == 0.0 for record in report.iterations))

    def test_records(self):
        report = baseline_primal_dual(build_sip(20), 2500, 1e-3)
        self.assertEqual(report.method, METHOD_NAME)
        self.assertEqual([record.k for record in report.iterations], [1000, 2000, 2500])
        self.assertEqual([record.inner_iters for record in report.iterations], [1000, 1000, 500])
        self.assertTrue(all(record.lam_min >= 0.0 for record in report.iterations))
        self.assertIsNotNone(report.relative_gap)

    def test_divergence(self):
        with self.assertRaises(DivergenceError) as cm:
            baseline_primal_dual(BrokenProblem(), 10, 0.1)
        self.assertEqual(cm.exception.iteration, 0)

    def test_invalid(self):
        with self.assertRaises(ConfigurationError):
            baseline_primal_dual(build_sip(5), 10, 0.0)
        with self.assertRaises(ConfigurationError):
            baseline_primal_dual(build_sip(5), 10, 0.1, lambda0=[-1.0] * 5)


class CommandLineTest(TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)

    def path(self, name):
        return os.path.join(self.directory.name, name)

    def call(self, *args):
        """Run a management command in process: the exit code, stdout and stderr including the error message."""
        stdout, stderr = io.StringIO(), io.StringIO()
        try:
            call_command(*args, stdout=stdout, stderr=stderr)
        except CommandError as e:
            stderr.write('%s' % e)
            return e.returncode, stdout.getvalue(), stderr.getvalue()
        return 0, stdout.getvalue(), stderr.getvalue()

    def run_command_line(self, *args):
        """Run ``rannlr <args>`` the way the console script does."""
        stdout, stderr = io.StringIO(), io.StringIO()
        code = 0
        with mock.patch('sys.stdout', stdout), mock.patch('sys.stderr', stderr):
            try:
                execute_from_command_line(['rannlr'] + list(args))
            except SystemExit as e:
                code = e.code or 0
        return code, stdout.getvalue(), stderr.getvalue()

    def test_commands(self):
        commands = get_commands()
        for name in ('baseline', 'bench', 'check_psi', 'dump_sampling', 'solve'):
            self.assertEqual(commands[name], 'rannlr', msg=name)

    def test_help(self):
        code, stdout, _ = self.run_command_line('help')
        self.assertEqual(code, 0)
        self.assertIn('[rannlr]', stdout)
        self.assertIn('check_psi', stdout)
        code, stdout, _ = self.run_command_line('help', 'bench')
        self.assertEqual(code, 0)
        self.assertIn('--scaling-N', stdout)
        self.assertIn('--no-timing', stdout)

    def test_unknown_command(self):
        code, _, stderr = self.run_command_line('optimize')
        self.assertEqual(code, 2)
        self.assertIn('Unknown command', stderr)

    def test_missing_m(self):
        code, _, stderr = self.call('bench', 'sip')
        self.assertEqual(code, 2)
        self.assertIn('--m', stderr)
        self.assertEqual(self.run_command_line('bench', 'sip')[0], 2)

    def test_unknown_flag(self):
        code, _, stderr = self.run_command_line('bench', 'sip', '--m', '5', '--bogus')
        self.assertEqual(code, 2)
        self.assertIn('usage:', stderr)

    def test_hyphenated_subcommand(self):
        code, stdout, stderr = self.run_command_line('check-psi', '--kind', 'exp', '--step', '0.1')
        self.assertEqual(code, 0, msg=stderr)
        self.assertTrue(json.loads(stdout)['passed'])
        code, stdout, _ = self.run_command_line('help', 'dump-sampling')
        self.assertEqual(code, 0)
        self.assertIn('--at-iters', stdout)

    def test_check_psi(self):
        code, stdout, _ = self.call('check_psi', '--kind', 'exp', '--tau', '-0.5', '--grid-lo', '-5',
                                    '--grid-hi', '5', '--step', '0.01')
        self.assertEqual(code, 0)
        data = json.loads(stdout)
        self.assertTrue(data['passed'])
        self.assertEqual(data['grid_size'], 1001)
        self.assertEqual(len(data['coeffs']), 3)

    def test_bench(self):
        code, _, stderr = self.call('bench', 'sip', '--m', '50', '--subroutine', 'full', '--step', '1e-3',
                                    '--max-inner', '2000', '--K', '2', '--out', self.path('report.json'),
                                    '--csv', self.path('report.csv'))
        self.assertEqual(code, 0, msg=stderr)
        with open(self.path('report.json')) as fp:
            report = RunReport.from_json(fp.read())
        self.assertEqual(report.method, 'NLR-full-gradient')
        self.assertEqual(report.outer_iterations, 2)
        with open(self.path('report.csv')) as fp:
            header = 'k,f,max_violation,stationarity,inner_iters,cum_inner_iters,wall_ms'
            self.assertEqual(fp.readline().strip(), header)

    def test_csv_without_timing(self):
        """Reruns with --no-timing produce byte-identical trajectories."""
        contents = []
        for name in ('first.csv', 'second.csv'):
            code, _, stderr = self.call('bench', 'sip', '--m', '30', '--subroutine', 'svrg', '--step', '1e-3',
                                        '--max-inner', '500', '--K', '2', '--seed', '7', '--no-timing',
                                        '--out', self.path('report.json'), '--csv', self.path(name))
            self.assertEqual(code, 0, msg=stderr)
            with open(self.path(name), 'rb') as fp:
                contents.append(fp.read())
        self.assertEqual(contents[0].splitlines()[0], b'k,f,max_violation,stationarity,inner_iters,cum_inner_iters')
        self.assertEqual(contents[0], contents[1])

    def test_initial_duals(self):
        code, _, stderr = self.call('bench', 'sip', '--m', '20', '--subroutine', 'full', '--step', '1e-3',
                                    '--max-inner', '200', '--K', '1', '--lambda0', '0.05',
                                    '--out', self.path('report.json'))
        self.assertEqual(code, 0, msg=stderr)
        with open(self.path('report.json')) as fp:
            report = RunReport.from_json(fp.read())
        self.assertEqual(report.config['lambda0'], 0.05)
        self.assertAlmostEqual(report.iterations[0].lam_l1, 1.0, places=12)
        self.assertEqual(self.call('bench', 'sip', '--m', '20', '--lambda0', '-1')[0], 2)

    def test_stall_exits_with_abort_code(self):
        code, _, stderr = self.call('bench', 'sip', '--m', '50', '--subroutine', 'sgd', '--step', '1e-9',
                                    '--max-inner', '10', '--check-interval', '5', '--K', '5', '--eps', '1e-12',
                                    '--out', self.path('aborted.json'), '-v', '0')
        self.assertEqual(code, 3)
        self.assertIn('aborted', stderr)
        with open(self.path('aborted.json')) as fp:
            self.assertTrue(RunReport.from_json(fp.read()).aborted)

    def test_baseline(self):
        code, stdout, _ = self.call('baseline', 'sip', '--m', '20', '--steps', '300', '--step', '1e-3',
                                    '--record-every', '100')
        self.assertEqual(code, 0)
        report = RunReport.from_json(stdout)
        self.assertEqual(report.outer_iterations, 3)

    def test_solve(self):
        config = {
            'instance': {'name': 'test-kkt'},
            'psi': {'kind': 'exp', 'tau': -0.5},
            'solver': {'N': 10.0, 'K': 5, 'eps': 1e-8,
                       'subroutine': {'kind': 'full', 'constant_step': 0.01, 'max_inner_iters': 200000}},
        }
        with open(self.path('config.json'), 'w') as fp:
            json.dump(config, fp)
        code, _, stderr = self.call('solve', self.path('config.json'), '--out', self.path('report.json'))
        self.assertEqual(code, 0, msg=stderr)
        with open(self.path('report.json')) as fp:
            report = RunReport.from_json(fp.read())
        np.testing.assert_allclose(report.x, [1.0, 1.0], atol=1e-3)

    def test_malformed_config(self):
        with open(self.path('broken.json'), 'w') as fp:
            fp.write('{"instance": ')
        self.assertEqual(self.call('solve', self.path('broken.json'))[0], 2)

        for config in ({'solver': {}}, {'instance': {'name': 'nonexistent'}},
                       {'instance': {'name': 'test-kkt'}, 'solver': {'N': -1.0, 'K': 1}},
                       {'instance': {'name': 'test-kkt'}, 'solver': {'K': 1, 'unknown': 3}}):
            with open(self.path('config.json'), 'w') as fp:
                json.dump(config, fp)
            self.assertEqual(self.call('solve', self.path('config.json'))[0], 2, msg=repr(config))

    def test_dump_sampling(self):
        code, _, stderr = self.call('dump_sampling', 'sip', '--m', '20', '--subroutine', 'full', '--step', '1e-3',
                                    '--max-inner', '200', '--K', '1', '--at-iters', '0,2',
                                    '--out-dir', self.directory.name, '--out', self.path('report.json'))
        self.assertEqual(code, 0, msg=stderr)
        for k in (0, 2):
            with open(self.path('sampling_k%d.csv' % k)) as fp:
                lines = fp.read().splitlines()
            self.assertEqual(lines[0], 'constraint_index,prob')
            self.assertEqual(len(lines), 21)
            self.assertAlmostEqual(sum(float(line.split(',')[1]) for line in lines[1:]), 1.0, places=12)
        with open(self.path('sampling_k0.csv')) as fp:
            self.assertEqual(fp.read().splitlines()[1], '0,0.050000000000000003')

    def test_dump_sampling_bad_iterations(self):
        code, _, _ = self.call('dump_sampling', 'sip', '--m', '5', '--at-iters', 'five')
        self.assertEqual(code, 2)


class SipSolveTest(TestCase):
    """SIP solves with a thousand constraints, small enough for every test run."""

    @classmethod
    def setUpClass(cls):
        cls.sip = build_sip(1000)
        cls.psi = default_rescaling()
        cls.report, cls.duals = cls.run_svrg(100.0, 20, 124)

    @classmethod
    def run_svrg(cls, N, M, K, lambda0=None):
        spec = SubroutineSpec(kind='svrg', constant_step=1e-4, epoch_length=M, check_interval=1000)
        duals = []
        report = solve(cls.sip, cls.psi, SolverConfig(N=N, K=K, eps=1e-4, subroutine=spec, lambda0=lambda0),
                       callbacks=[lambda k, x, d: duals.append(d)])
        return report, duals

    def test_small_scaling(self):
        self.assertFalse(self.report.aborted)
        self.assertEqual(self.report.outer_iterations, 124)
        self.assertLess(self.report.relative_gap, 1e-3)

    def test_large_scaling(self):
        """Large scaling parameters start from duals of unit total mass."""
        report, _ = self.run_svrg(1000.0, 400, 8, lambda0=1e-3)
        self.assertFalse(report.aborted)
        self.assertLess(report.relative_gap, 1e-3)

    def test_sampling_concentrates(self):
        probs = scaled_distribution(self.duals[-1]).probs
        top = np.sort(probs)[::-1][:len(probs) // 100]
        self.assertGreater(top.sum(), 0.5)

    def test_inactive_duals_decay(self):
        """Duals of constraints with a wide margin at the optimum only shrink once the iterates settle."""
        far = self.sip.constraint_values(np.array(self.sip.reference['x'])) >= 0.05
        self.assertGreater(np.count_nonzero(far), 100)
        settled = self.duals[len(self.duals) // 2:]
        for before, after in zip(settled, settled[1:]):
            floor = np.finfo(float).tiny * max(1.0, after.l1_norm)
            self.assertTrue(np.all(after.lam[far] <= np.maximum(before.lam[far], floor)))
        self.assertLess(self.duals[-1].lam[far].max(), 1e-10)


class AlpSolveTest(TestCase):
    def test_coarse_grid(self):
        alp = build_alp(h=1.0, beta=600.0)
        problem = alp.problem()
        value = lp_reference(alp)[1]
        self.assertAlmostEqual(problem.reference_value, -0.05 * value, places=9)

        spec = SubroutineSpec(kind='svrg', constant_step=0.05, epoch_length=1000, check_interval=1000)
        report = solve(problem, default_rescaling(), SolverConfig(N=1000.0, K=10, eps=1e-2, subroutine=spec))
        self.assertFalse(report.aborted)
        self.assertLess(report.relative_gap, 1e-3)
        theta = alp.theta(report.x)
        self.assertLess(abs(theta @ alp.objective_weights - value) / value, 1e-3)


@skipUnless(BENCHMARKS, 'Set RANNLR_BENCHMARKS to run the benchmark reproductions')
class SipBenchmarkTest(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.sip = build_sip(10000)
        cls.psi = default_rescaling()

    def run_svrg(self, N, M, K, lambda0=None):
        spec = SubroutineSpec(kind='svrg', constant_step=1e-4, epoch_length=M)
        duals = []
        started = time.perf_counter()
        report = solve(self.sip, self.psi, SolverConfig(N=N, K=K, eps=1e-4, subroutine=spec, lambda0=lambda0),
                       callbacks=[lambda k, x, d: duals.append(d)])
        return report, duals, time.perf_counter() - started

    def test_svrg_small_scaling(self):
        report, _, _ = self.run_svrg(100.0, 20, 124)
        self.assertLess(report.relative_gap, 1e-3)

    def test_svrg_large_scaling(self):
        report, _, _ = self.run_svrg(1000.0, 400, 8, lambda0=1e-4)
        self.assertLess(report.relative_gap, 1e-3)

    def test_baseline_and_comparison(self):
        started = time.perf_counter()
        baseline = baseline_primal_dual(self.sip, 30000, 1e-4)
        baseline_seconds = time.perf_counter() - started
        self.assertLessEqual(baseline.relative_gap, 1e-2)

        report, _, seconds = self.run_svrg(1000.0, 400, 8, lambda0=1e-4)
        self.assertLess(report.relative_gap, baseline.relative_gap)
        self.assertLess(seconds, baseline_seconds)

    def test_sampling_concentrates(self):
        """The dual-proportional distribution ends up concentrated on the most active constraints."""
        _, duals, _ = self.run_svrg(100.0, 20, 124)
        probs = scaled_distribution(duals[-1]).probs
        top = np.sort(probs)[::-1][:len(probs) // 100]
        self.assertGreater(top.sum(), 0.5)
        self.assertTrue(all(isinstance(d, DualState) and d.lam.min() > 0.0 for d in duals))


@skipUnless(BENCHMARKS, 'Set RANNLR_BENCHMARKS to run the benchmark reproductions')
class AlpBenchmarkTest(TestCase):
    def test_desk_scale(self):
        problem = build_alp(h=0.2, beta=600.0).problem()
        psi = default_rescaling()
        for spec in (SubroutineSpec(kind='sgd', constant_step=0.005, check_interval=1000),
                     SubroutineSpec(kind='svrg', constant_step=0.005, epoch_length=1000, check_interval=1000)):
            started = time.perf_counter()
            report = solve(problem, psi, SolverConfig(N=1000.0, K=30, eps=1e-2, subroutine=spec))
            self.assertLessEqual(report.relative_gap, 1e-3, msg=spec.kind)
            self.assertLess(time.perf_counter() - started, 60.0, msg=spec.kind)
