import io
import json
import math
import os
import tempfile
from unittest import TestCase, mock, skipUnless

import numpy as np
from django.test import override_settings

from rannlr import conf
from rannlr.exceptions import ConfigurationError, EvaluationError, SolverAbort
from rannlr.problem import (DualState, QuadraticProblem, augmented_lagrangian, component_lipschitz_bound,
                            component_operator, component_operators, estimate_lipschitz,
                            grad_augmented_lagrangian, max_violation, stationarity_norm)
from rannlr.registry import ProblemRegistry, problems
from rannlr.report import CSV_HEADER, IterationRecord, RunReport
from rannlr.rescaling import (EXP, FRACTION, LOG, branch_mismatch, default_rescaling, grid_points, make_custom,
                              make_extrapolated, psi_d1, verify_properties)
from rannlr.sampling import (ALIAS, CUMULATIVE, SamplingDistribution, custom_distribution, draw_indices,
                             scaled_distribution, stream_for, uniform_distribution, variance_ratio)
from rannlr.solver import (SolverConfig, TheoryConstants, dual_update, inner_eps_for, outer_iterations_for, solve,
                           theory_budget)
from rannlr.subroutines import (EstimatorState, SubroutineSpec, gradient_estimator, project_box, run_inner,
                                scaled_operator, sgd_stepsize, svrg_contraction, svrg_stepsize)
from rannlr_tests.problems import (BrokenProblem, anchor_problem, bound_problem, branch_problem, interior_problem,
                                   kkt_problem, random_quadratic, tiny_problem)

E_HALF = math.exp(0.5)


def constant_constraint_problem(values):
    """Constraints ``g_i(x) = values[i]`` everywhere."""
    values = np.asarray(values, dtype=float)
    return QuadraticProblem(Q=[[1.0]], c=[0.0], A=np.zeros((values.size, 1)), b=values, lower=[-1.0], upper=[1.0])


def branch_minimizer(psi):
    a2, a1, _ = psi.coeffs
    return (10.0 * a2 - a1) / (1.0 - 2.0 * a2)


class RescalingTest(TestCase):
    def setUp(self):
        self.psi = default_rescaling()

    def test_exponential_coefficients(self):
        """The quadratic branch of the exponential kind matches the closed form."""
        a2, a1, a0 = self.psi.coeffs
        self.assertAlmostEqual(a2, -0.5 * E_HALF, places=14)
        self.assertAlmostEqual(a1, 0.5 * E_HALF, places=14)
        self.assertAlmostEqual(a0, 1.0 - 0.625 * E_HALF, places=14)
        self.assertEqual(self.psi.kind, EXP)
        self.assertEqual(self.psi.tau, -0.5)

    def test_values(self):
        self.assertEqual(self.psi.value(0.0), 0.0)
        self.assertAlmostEqual(self.psi.d1(0.0), 1.0, places=15)
        self.assertAlmostEqual(self.psi.value(1.0), 1.0 - math.exp(-1.0), places=15)
        self.assertAlmostEqual(self.psi.value(-1.0), 1.0 - 1.625 * E_HALF, places=12)
        self.assertAlmostEqual(self.psi.d2(-3.0), -E_HALF, places=12)
        self.assertAlmostEqual(self.psi.curvature_bound, E_HALF, places=12)

    def test_scalar_and_vector(self):
        self.assertIsInstance(self.psi.value(0.3), float)
        values = self.psi.value(np.array([-2.0, 0.0, 2.0]))
        self.assertEqual(values.shape, (3,))
        self.assertAlmostEqual(values[0], self.psi.value(-2.0), places=15)

    def test_branch_continuity(self):
        """psi, psi' and psi'' are continuous at the branch point for every kind."""
        for kind in ('exp', 'log', 'fraction'):
            psi = make_extrapolated(kind)
            self.assertLessEqual(branch_mismatch(psi), 1e-12, msg=kind)
            below, above = psi.tau - 1e-9, psi.tau + 1e-9
            self.assertAlmostEqual(psi.d2(below), psi.d2(above), places=6, msg=kind)

    def test_verify_builtin_kinds(self):
        grid = grid_points(-10.0, 10.0, 0.01)
        for kind, name in (('exp', EXP), ('log', LOG), ('fraction', FRACTION)):
            report = verify_properties(make_extrapolated(kind), grid)
            self.assertTrue(report.passed, msg='%s: %r' % (kind, report.checks))
            self.assertEqual(report.kind, name)
            self.assertGreater(report.a, 0.0)
            self.assertTrue(np.isfinite(report.d1) and np.isfinite(report.d2))

    def test_concave_on_random_pairs(self):
        rng = np.random.default_rng(11)
        for kind in ('exp', 'log', 'fraction'):
            psi = make_extrapolated(kind, tau=-0.3)
            t1, t2 = rng.uniform(-10.0, 10.0, (2, 1000))
            theta = rng.uniform(0.0, 1.0, 1000)
            chord = theta * psi.value(t1) + (1.0 - theta) * psi.value(t2)
            self.assertTrue(np.all(psi.value(theta * t1 + (1.0 - theta) * t2) >= chord - 1e-12), msg=kind)

    def test_second_derivative_consistency(self):
        """psi'' agrees with central differences of psi' away from the branch point."""
        psi = self.psi
        grid = grid_points(-3.0, 3.0, 0.05)
        grid = grid[np.abs(grid - psi.tau) > 1e-3]
        h = 1e-6
        central = (psi.d1(grid + h) - psi.d1(grid - h)) / (2.0 * h)
        np.testing.assert_allclose(central, psi.d2(grid), rtol=1e-6, atol=1e-8)

    def test_invalid_parameters(self):
        with self.assertRaises(ConfigurationError):
            make_extrapolated('exp', tau=-1.0)
        with self.assertRaises(ConfigurationError):
            make_extrapolated('exp', tau=0.0)
        with self.assertRaises(ConfigurationError):
            make_extrapolated('cosh')

    def test_custom_function(self):
        linear = make_custom(lambda t: t, lambda t: np.ones_like(t), lambda t: np.zeros_like(t))
        self.assertEqual(linear.value(2.0), 2.0)
        self.assertIsNone(linear.curvature_bound)

        report = verify_properties(linear, grid_points(-1.0, 1.0, 0.1))
        self.assertFalse(report.checks['concave'])
        self.assertFalse(report.passed)
        self.assertNotIn('branch_match', report.checks)

    def test_custom_matches_builtin(self):
        custom = make_custom(self.psi.value, self.psi.d1, self.psi.d2)
        grid = grid_points(-2.0, 2.0, 0.25)
        np.testing.assert_array_equal(custom.value(grid), self.psi.value(grid))
        self.assertTrue(verify_properties(custom, grid).passed)

    def test_empty_grid(self):
        with self.assertRaises(ValueError):
            verify_properties(self.psi, [])

    def test_module_functions(self):
        self.assertEqual(psi_d1(self.psi, 0.5), self.psi.d1(0.5))


class ProblemTest(TestCase):
    def setUp(self):
        self.psi = default_rescaling()

    def test_tiny_values(self):
        """Augmented Lagrangian and gradient of min x^2 s.t. 1 - x >= 0 at x = 0, lam = 2, N = 1."""
        p = tiny_problem()
        d = DualState([2.0])
        self.assertAlmostEqual(augmented_lagrangian(p, self.psi, [0.0], d, 1.0), -1.264241, places=6)
        gradient = grad_augmented_lagrangian(p, self.psi, [0.0], d, 1.0)
        self.assertAlmostEqual(gradient[0], 0.735759, places=6)
        self.assertAlmostEqual(stationarity_norm(p, self.psi, [0.0], d, 1.0), 0.735759, places=6)

    def test_stationarity_on_a_bound(self):
        """At a minimizer on the box boundary only the projected gradient vanishes."""
        p = bound_problem()
        d = DualState([1.0])
        self.assertAlmostEqual(grad_augmented_lagrangian(p, self.psi, [1.0], d, 1.0)[0], -1.0 + math.exp(-2.0),
                               places=12)
        self.assertEqual(stationarity_norm(p, self.psi, [1.0], d, 1.0), 0.0)
        self.assertAlmostEqual(stationarity_norm(p, self.psi, [0.5], d, 1.0), 0.5, places=12)

    def test_gradient_matches_finite_differences(self):
        p = random_quadratic()
        d = DualState(np.linspace(0.5, 2.0, p.m))
        rng = np.random.default_rng(3)
        h = 1e-6
        for _ in range(5):
            x = rng.uniform(-1.0, 1.0, p.n)
            gradient = grad_augmented_lagrangian(p, self.psi, x, d, 3.0)
            central = np.array([
                (augmented_lagrangian(p, self.psi, x + h * e, d, 3.0)
                 - augmented_lagrangian(p, self.psi, x - h * e, d, 3.0)) / (2.0 * h)
                for e in np.eye(p.n)
            ])
            np.testing.assert_allclose(gradient, central, rtol=1e-5, atol=1e-5)

    def test_strongly_monotone_gradient(self):
        """The augmented Lagrangian keeps the strong convexity of the objective."""
        p = random_quadratic(seed=6)
        rng = np.random.default_rng(6)
        for _ in range(50):
            d = DualState(rng.uniform(0.1, 5.0, p.m))
            N = float(rng.uniform(0.5, 20.0))
            x1, x2 = rng.uniform(-3.0, 3.0, (2, p.n))
            difference = (grad_augmented_lagrangian(p, self.psi, x1, d, N)
                          - grad_augmented_lagrangian(p, self.psi, x2, d, N))
            self.assertGreaterEqual(difference @ (x1 - x2), p.mu_f * float((x1 - x2) @ (x1 - x2)) - 1e-9)

    def test_finite_sum_identity(self):
        """The dual-proportional average of the component operators is the full gradient."""
        p = random_quadratic(seed=1)
        d = DualState(np.arange(1.0, p.m + 1.0))
        x = np.array([0.2, -0.4, 0.7])
        components = component_operators(p, self.psi, np.arange(p.m), x, d, 2.0)
        weights = d.lam / d.l1_norm
        np.testing.assert_allclose(weights @ components, grad_augmented_lagrangian(p, self.psi, x, d, 2.0),
                                   rtol=1e-10, atol=1e-10)
        np.testing.assert_allclose(component_operator(p, self.psi, 3, x, d, 2.0), components[3])

    def test_component_index_range(self):
        p = tiny_problem()
        with self.assertRaises(IndexError):
            component_operator(p, self.psi, 1, [0.0], DualState([1.0]), 1.0)
        with self.assertRaises(IndexError):
            component_operator(p, self.psi, -1, [0.0], DualState([1.0]), 1.0)

    def test_dual_state(self):
        d = DualState([1.0, 2.0, 3.0])
        self.assertEqual(d.l1_norm, 6.0)
        self.assertEqual(len(d), 3)
        self.assertEqual(d.summary(), {'min': 1.0, 'max': 3.0, 'l1': 6.0})
        with self.assertRaises(ValueError):
            d.lam[0] = 5.0
        for invalid in ([1.0, 0.0], [1.0, -1.0], [], [np.inf]):
            with self.assertRaises(ConfigurationError, msg=repr(invalid)):
                DualState(invalid)

    def test_box_and_beta(self):
        p = QuadraticProblem(Q=np.eye(2), c=[0.0, 0.0], A=[[2.0, 0.0]], b=[4.0], lower=[0.0, 0.0],
                             upper=[1.0, 1.0], beta=4.0)
        np.testing.assert_array_equal(p.project([2.0, -1.0]), [1.0, 0.0])
        np.testing.assert_allclose(p.constraint_values([1.0, 0.0]), [1.5])
        np.testing.assert_allclose(p.constraint_grads([1.0, 0.0]), [[0.5, 0.0]])
        self.assertEqual(p.box_diameter, 1.0)
        with self.assertRaises(ConfigurationError):
            QuadraticProblem(Q=np.eye(1), c=[0.0], A=[[1.0]], b=[0.0], lower=[1.0], upper=[0.0])
        with self.assertRaises(ValueError):
            QuadraticProblem(Q=np.eye(2), c=[0.0], A=[[1.0]], b=[0.0], lower=[0.0], upper=[1.0])

    def test_max_violation(self):
        p = constant_constraint_problem([0.5, -0.25, -1.5, 0.0])
        self.assertEqual(max_violation(p, [0.0]), (1.5, 2))
        self.assertEqual(max_violation(constant_constraint_problem([1.0, 2.0]), [0.0]), (0.0, 0))

    def test_non_finite_constraint(self):
        p = BrokenProblem()
        with self.assertRaises(EvaluationError) as cm:
            grad_augmented_lagrangian(p, self.psi, [0.0], DualState.ones(2), 1.0)
        self.assertEqual(cm.exception.index, 1)
        with self.assertRaises(EvaluationError) as cm:
            component_operators(p, self.psi, [1], [0.0], DualState.ones(2), 1.0)
        self.assertEqual(cm.exception.index, 1)
        with self.assertRaises(EvaluationError) as cm:
            max_violation(p, [0.0])
        self.assertEqual(cm.exception.index, 1)

    def test_blocks(self):
        p = constant_constraint_problem(np.zeros(5))
        self.assertEqual(p.blocks(2), [slice(0, 2), slice(2, 4), slice(4, 5)])

    def test_blocked_and_threaded_sums_agree(self):
        p = random_quadratic(m=11, seed=2)
        d = DualState(np.linspace(0.1, 3.0, p.m))
        x = np.array([0.3, 0.1, -0.2])
        expected = grad_augmented_lagrangian(p, self.psi, x, d, 5.0)
        with override_settings(RANNLR={'chunk_size': 3, 'workers': 3}):
            blocked = grad_augmented_lagrangian(p, self.psi, x, d, 5.0)
            value = augmented_lagrangian(p, self.psi, x, d, 5.0)
        np.testing.assert_allclose(blocked, expected, rtol=1e-12, atol=1e-12)
        self.assertAlmostEqual(value, augmented_lagrangian(p, self.psi, x, d, 5.0), places=10)

    def test_lipschitz_bounds(self):
        p = random_quadratic(seed=5)
        d = DualState(np.full(p.m, 0.5))
        bound = component_lipschitz_bound(p, self.psi, d, 2.0)
        expected = (np.linalg.norm(p.Q, 2)
                    + d.l1_norm * 2.0 * E_HALF * np.max(np.sum(p.A ** 2, axis=1)))
        self.assertAlmostEqual(bound, expected, places=8)

        estimate = estimate_lipschitz(p, self.psi, np.zeros(p.n), d, 2.0)
        self.assertGreater(estimate, 0.0)
        self.assertLessEqual(estimate, bound + 1e-3)

    def test_quadratic_moduli(self):
        p = QuadraticProblem(Q=np.diag([2.0, 5.0]), c=[0.0, 0.0], A=[[1.0, 0.0]], b=[0.0], lower=[-1.0, -1.0],
                             upper=[1.0, 1.0])
        self.assertAlmostEqual(p.mu_f, 2.0)
        self.assertIsNone(p.lipschitz_grad)


class SamplingTest(TestCase):
    def test_distribution(self):
        dist = SamplingDistribution([0.2, 0.3, 0.5])
        self.assertEqual(dist.m, 3)
        self.assertEqual(dist.cumulative[-1], 1.0)
        self.assertEqual(dist.method, CUMULATIVE)
        with self.assertRaises(ValueError):
            dist.probs[0] = 0.1

    def test_invalid_distributions(self):
        for probs in ([0.5, 0.6], [1.0, 0.0], [], [np.nan, 1.0], [1.5, -0.5]):
            with self.assertRaises(ValueError, msg=repr(probs)):
                SamplingDistribution(probs)
        with self.assertRaises(ValueError):
            SamplingDistribution([1.0], method='reservoir')

    def test_constructors(self):
        d = DualState([1.0, 3.0])
        np.testing.assert_allclose(scaled_distribution(d).probs, [0.25, 0.75])
        np.testing.assert_allclose(uniform_distribution(4).probs, np.full(4, 0.25))
        np.testing.assert_allclose(custom_distribution([2.0, 6.0]).probs, [0.25, 0.75])

    def test_reproducible_streams(self):
        dist = custom_distribution(np.arange(1.0, 11.0))
        first = draw_indices(dist, stream_for(7, 3), 100)
        second = draw_indices(dist, stream_for(7, 3), 100)
        np.testing.assert_array_equal(first, second)
        self.assertFalse(np.array_equal(first, draw_indices(dist, stream_for(7, 4), 100)))

    def test_single_draw(self):
        index = uniform_distribution(5).draw(stream_for(0))
        self.assertIsInstance(index, int)
        self.assertTrue(0 <= index < 5)
        self.assertIsInstance(SamplingDistribution([0.5, 0.5], method=ALIAS).draw(stream_for(0)), int)

    def test_empirical_frequencies(self):
        probs = np.array([0.05, 0.1, 0.15, 0.3, 0.4])
        for method in (CUMULATIVE, ALIAS):
            dist = SamplingDistribution(probs, method=method)
            draws = dist.draw(stream_for(11), size=200000)
            self.assertTrue(np.all((draws >= 0) & (draws < 5)))
            frequencies = np.bincount(draws, minlength=5) / draws.size
            np.testing.assert_allclose(frequencies, probs, atol=0.01, err_msg=method)

    def test_alias_table(self):
        """The alias table reproduces the distribution exactly."""
        probs = custom_distribution(np.random.default_rng(2).uniform(0.01, 1.0, 37)).probs
        dist = SamplingDistribution(probs, method=ALIAS)
        accept, alias = dist._alias_prob, dist._alias
        self.assertTrue(np.all((accept >= 0.0) & (accept <= 1.0)))
        recovered = accept.copy()
        for column in range(probs.size):
            if alias[column] != column:
                recovered[alias[column]] += 1.0 - accept[column]
        np.testing.assert_allclose(recovered / probs.size, probs, atol=1e-12)

    def test_variance_ratio(self):
        p = SamplingDistribution([0.25, 0.75])
        self.assertAlmostEqual(variance_ratio(p, uniform_distribution(2)), 1.25, places=14)
        self.assertAlmostEqual(variance_ratio(p, p), 1.0, places=12)
        with self.assertRaises(ValueError):
            variance_ratio(p, uniform_distribution(3))

    def test_variance_ratio_lower_bound(self):
        """r >= 1 for random pairs, with equality only for q == p."""
        rng = np.random.default_rng(0)
        for _ in range(10000):
            m = int(rng.integers(1, 8))
            p = custom_distribution(rng.uniform(0.01, 1.0, m))
            q = custom_distribution(rng.uniform(0.01, 1.0, m))
            r = variance_ratio(p, q)
            self.assertGreaterEqual(r, 1.0 - 1e-12)
            if np.max(np.abs(p.probs - q.probs)) > 1e-3:
                self.assertGreater(r, 1.0 + 1e-12)
            self.assertAlmostEqual(variance_ratio(p, p), 1.0, places=12)

    def test_to_csv(self):
        buffer = io.StringIO()
        SamplingDistribution([0.25, 0.75]).to_csv(buffer)
        self.assertEqual(buffer.getvalue(), 'constraint_index,prob\n0,0.25\n1,0.75\n')

        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'sampling.csv')
            uniform_distribution(3).to_csv(path)
            with open(path) as fp:
                lines = fp.read().splitlines()
        self.assertEqual(len(lines), 4)
        self.assertEqual(float(lines[1].split(',')[1]), 1.0 / 3.0)


class EstimatorTest(TestCase):
    def setUp(self):
        self.psi = default_rescaling()
        self.p = random_quadratic(n=3, m=12, seed=7)
        rng = np.random.default_rng(1)
        self.d = DualState(rng.uniform(0.1, 2.0, self.p.m))
        self.y = rng.uniform(-1.0, 1.0, self.p.n)
        self.N = 2.0
        self.dual_dist = scaled_distribution(self.d)
        self.other = custom_distribution(rng.uniform(0.1, 1.0, self.p.m))

    def full_gradient(self, x):
        return grad_augmented_lagrangian(self.p, self.psi, x, self.d, self.N)

    def test_scaled_operator_ratios(self):
        p = QuadraticProblem(Q=np.eye(1), c=[0.0], A=[[1.0], [2.0]], b=[0.5, -0.5], lower=[-1.0], upper=[1.0])
        d = DualState([1.0, 3.0])
        x = [0.1]
        b0 = component_operator(p, self.psi, 0, x, d, 1.0)
        np.testing.assert_allclose(scaled_operator(p, self.psi, 0, x, d, uniform_distribution(2), 1.0), 0.5 * b0)
        np.testing.assert_array_equal(scaled_operator(p, self.psi, 0, x, d, scaled_distribution(d), 1.0), b0)

    def test_scaled_operators_average_to_gradient(self):
        average = sum(self.other.probs[i] * scaled_operator(self.p, self.psi, i, self.y, self.d, self.other, self.N)
                      for i in range(self.p.m))
        np.testing.assert_allclose(average, self.full_gradient(self.y), rtol=1e-10, atol=1e-10)

    def test_unbiased_for_random_proxies(self):
        """The exact expectation of the estimator over the sampled index is the full gradient."""
        rng = np.random.default_rng(5)
        for q in (self.dual_dist, self.other):
            proxies = rng.standard_normal((self.p.m, self.p.n))
            state = EstimatorState.explicit(self.dual_dist, q, proxies)
            expectation = sum(q.probs[i] * gradient_estimator(self.p, self.psi, self.y, state, i, self.d, self.N)
                              for i in range(self.p.m))
            np.testing.assert_allclose(expectation, self.full_gradient(self.y), rtol=1e-10, atol=1e-10)

    def test_sgd_estimator(self):
        state = EstimatorState.sgd(self.dual_dist, self.other, self.p.n)
        for i in (0, 5, 11):
            np.testing.assert_array_equal(
                gradient_estimator(self.p, self.psi, self.y, state, i, self.d, self.N),
                scaled_operator(self.p, self.psi, i, self.y, self.d, self.other, self.N))

    def test_svrg_zero_variance_at_anchor(self):
        state = EstimatorState.svrg(self.dual_dist, self.other, self.p.n)
        full = state.refresh(self.p, self.psi, self.y, self.d, self.N)
        np.testing.assert_allclose(full, self.full_gradient(self.y), rtol=1e-10, atol=1e-10)
        anchor_sum = sum(self.other.probs[i] * state.proxy(self.p, self.psi, i, self.d, self.N)
                         for i in range(self.p.m))
        np.testing.assert_allclose(state.proxy_mean(), anchor_sum, rtol=1e-10, atol=1e-10)
        for i in range(self.p.m):
            np.testing.assert_allclose(gradient_estimator(self.p, self.psi, self.y, state, i, self.d, self.N), full,
                                       rtol=0, atol=1e-13)

    def test_variance_bound(self):
        """The conditional variance is bounded by the distance terms of the rate analysis."""
        rng = np.random.default_rng(8)
        p = random_quadratic(n=2, m=15, seed=9)
        d = DualState(rng.uniform(0.2, 1.5, p.m))
        L = component_lipschitz_bound(p, self.psi, d, self.N)
        spec = SubroutineSpec(kind='full_gradient', constant_step=1.0 / L, max_inner_iters=200000)
        x_star = run_inner(p, self.psi, d, self.N, spec, np.zeros(2), 1e-10, stream_for(0)).x
        p_dist = scaled_distribution(d)

        for q in (p_dist, custom_distribution(rng.uniform(0.1, 1.0, p.m))):
            r = variance_ratio(p_dist, q)
            for _ in range(5):
                y = rng.uniform(-2.0, 2.0, 2)
                proxies = rng.standard_normal((p.m, 2))
                state = EstimatorState.explicit(p_dist, q, proxies)
                full = grad_augmented_lagrangian(p, self.psi, y, d, self.N)
                variance = sum(q.probs[i] * np.sum((gradient_estimator(p, self.psi, y, state, i, d, self.N)
                                                    - full) ** 2) for i in range(p.m))
                proxy_term = sum(q.probs[i] * np.sum((proxies[i] - scaled_operator(p, self.psi, i, x_star, d, q,
                                                                                    self.N)) ** 2)
                                 for i in range(p.m))
                bound = 2.0 * (r * L * L * np.sum((y - x_star) ** 2) + proxy_term)
                self.assertLessEqual(variance, bound + 1e-9)

    def test_project_box(self):
        lower, upper = np.zeros(2), np.ones(2)
        np.testing.assert_array_equal(project_box(np.array([0.3, 0.7]), lower, upper), [0.3, 0.7])
        np.testing.assert_array_equal(project_box(np.array([2.0, -1.0]), lower, upper), [1.0, 0.0])
        once = project_box(np.array([5.0, 0.5]), lower, upper)
        np.testing.assert_array_equal(project_box(once, lower, upper), once)


class StepSizeTest(TestCase):
    def test_sgd_stepsize(self):
        self.assertAlmostEqual(sgd_stepsize(0, 1.0, 1.0, 1.0), 1.0 / 3.0, places=15)
        steps = [sgd_stepsize(t, 0.5, 2.0, 1.5) for t in range(50)]
        self.assertTrue(all(a > b for a, b in zip(steps, steps[1:])))
        with self.assertRaises(ConfigurationError):
            sgd_stepsize(0, 0.0, 1.0)
        with self.assertRaises(ConfigurationError):
            sgd_stepsize(0, 2.0, 1.0)

    def test_svrg_stepsize_and_contraction(self):
        gamma = svrg_stepsize(1.0, 10.0, 20, 1.0)
        self.assertAlmostEqual(gamma, 1.0 / 4300.0, places=15)
        self.assertAlmostEqual(svrg_contraction(gamma, 1.0, 10.0, 20, 1.0), 1.0 - 1.0 / 4300.0, places=12)

    def test_optimal_step_minimizes_contraction(self):
        mu, L, M = 0.5, 3.0, 10
        best = svrg_contraction(svrg_stepsize(mu, L, M), mu, L, M)
        limit = 2.0 * mu / ((3.0 + 2.0 * M) * L * L)
        for gamma in np.linspace(limit * 0.01, limit * 0.99, 97):
            self.assertLessEqual(best, svrg_contraction(gamma, mu, L, M) + 1e-15)

    def test_non_optimal_sampling_contracts_worse(self):
        mu, L, M = 1.0, 4.0, 5
        gamma = svrg_stepsize(mu, L, M, 1.0) * 0.5
        self.assertGreater(svrg_contraction(gamma, mu, L, M, r=1.7), svrg_contraction(gamma, mu, L, M, r=1.0))

    def test_inadmissible_step(self):
        limit = 2.0 / (43.0 * 100.0)
        with self.assertRaises(ConfigurationError):
            svrg_contraction(limit * 1.01, 1.0, 10.0, 20)
        with self.assertRaises(ConfigurationError):
            svrg_contraction(0.0, 1.0, 10.0, 20)
        self.assertGreaterEqual(svrg_contraction(limit * 1.01, 1.0, 10.0, 20, strict=False), 1.0)

    def test_subroutine_spec(self):
        spec = SubroutineSpec(kind='full')
        self.assertEqual(spec.kind, 'full_gradient')
        self.assertEqual(spec.check_interval, 1000)
        self.assertEqual(SubroutineSpec.from_dict(spec.as_dict()), spec)
        for invalid in ({'kind': 'saga'}, {'epoch_length': 0}, {'step_mode': 'adam'},
                        {'step_mode': 'constant', 'constant_step': 0.0}, {'max_inner_iters': 0}):
            with self.assertRaises(ConfigurationError, msg=repr(invalid)):
                SubroutineSpec(**invalid)


class InnerSolverTest(TestCase):
    def setUp(self):
        self.psi = default_rescaling()

    def test_full_gradient_matches_closed_form(self):
        p = branch_problem()
        spec = SubroutineSpec(kind='full_gradient', constant_step=0.1)
        result = run_inner(p, self.psi, DualState([1.0]), 1.0, spec, [0.0], 1e-10, stream_for(0))
        self.assertTrue(result.converged)
        self.assertLessEqual(result.achieved, 1e-10)
        self.assertAlmostEqual(result.x[0], branch_minimizer(self.psi), places=6)
        self.assertLess(-result.x[0] - 5.0, self.psi.tau, msg="Minimizer lies in the quadratic branch")

    def test_svrg_fixed_point(self):
        p = branch_problem()
        x_star = np.array([branch_minimizer(self.psi)])
        spec = SubroutineSpec(kind='svrg', constant_step=0.1, epoch_length=5)
        result = run_inner(p, self.psi, DualState([1.0]), 1.0, spec, x_star, 1e-3, stream_for(0), fixed_iters=1)
        self.assertEqual(result.inner_iters, 1)
        self.assertAlmostEqual(result.x[0], x_star[0], places=12)

    def test_sgd_theory_steps_reach_tolerance(self):
        p = tiny_problem()
        d = DualState([1.0])
        L = component_lipschitz_bound(p, self.psi, d, 1.0)
        spec = SubroutineSpec(kind='sgd', step_mode='theory', check_interval=10)
        achieved = []
        for seed in range(30):
            result = run_inner(p, self.psi, d, 1.0, spec, [5.0], 1e-3, stream_for(seed), lipschitz=L)
            achieved.append(result.achieved)
        self.assertLessEqual(float(np.median(achieved)), 1e-3)

    def test_minimizer_on_a_bound(self):
        p = bound_problem()
        for kind in ('full_gradient', 'sgd', 'svrg'):
            spec = SubroutineSpec(kind=kind, constant_step=0.1, check_interval=10)
            result = run_inner(p, self.psi, DualState([1.0]), 1.0, spec, [0.0], 1e-8, stream_for(0))
            self.assertTrue(result.converged, msg=kind)
            self.assertEqual(result.achieved, 0.0, msg=kind)
            self.assertEqual(result.x[0], 1.0, msg=kind)

    def test_budget_exhaustion(self):
        p = interior_problem()
        spec = SubroutineSpec(kind='sgd', constant_step=1e-6, max_inner_iters=20, check_interval=5)
        with self.assertLogs('rannlr.subroutines', level='WARNING'):
            result = run_inner(p, self.psi, DualState.ones(p.m), 1.0, spec, [3.0, 3.0], 1e-8, stream_for(0))
        self.assertFalse(result.converged)
        self.assertEqual(result.inner_iters, 20)
        self.assertGreater(result.achieved, 1e-8)

    def test_start_is_projected(self):
        p = interior_problem()
        spec = SubroutineSpec(kind='svrg', constant_step=1e-3)
        seen = []
        run_inner(p, self.psi, DualState.ones(p.m), 1.0, spec, [50.0, -50.0], 1e-3, stream_for(0), fixed_iters=3,
                  callback=lambda t, y: seen.append(y.copy()))
        self.assertEqual(len(seen), 3)
        self.assertTrue(all(np.all(np.abs(y) <= 5.0) for y in seen))

    def test_theory_steps_need_lipschitz(self):
        p = interior_problem()
        spec = SubroutineSpec(kind='svrg', step_mode='theory')
        with self.assertRaises(ConfigurationError):
            run_inner(p, self.psi, DualState.ones(p.m), 1.0, spec, [0.0, 0.0], 1e-3, stream_for(0))

    def test_invalid_tolerance(self):
        with self.assertRaises(ConfigurationError):
            run_inner(tiny_problem(), self.psi, DualState([1.0]), 1.0, SubroutineSpec(), [0.0], 0.0, stream_for(0))


@skipUnless(os.environ.get('RANNLR_BENCHMARKS'), 'Set RANNLR_BENCHMARKS to run the statistical rate checks')
class RateTest(TestCase):
    seeds = range(100)

    def setUp(self):
        self.psi = default_rescaling()
        self.p = interior_problem()

    def minimizer(self, d, N=1.0):
        spec = SubroutineSpec(kind='full_gradient', constant_step=0.2, max_inner_iters=100000)
        return run_inner(self.p, self.psi, d, N, spec, np.zeros(2), 1e-12, stream_for(0)).x

    def mean_square_distances(self, d, spec, marks, x_star, q=None, lipschitz=None):
        totals = dict.fromkeys(marks, 0.0)

        def record(t, y):
            if t in totals:
                totals[t] += float(np.sum((y - x_star) ** 2))

        for seed in self.seeds:
            run_inner(self.p, self.psi, d, 1.0, spec, [3.0, 3.0], 1e-12, stream_for(seed), q=q,
                      fixed_iters=max(marks), callback=record, lipschitz=lipschitz)
        return {t: total / len(self.seeds) for t, total in totals.items()}

    def test_sgd_sublinear_decay(self):
        d = DualState.ones(self.p.m)
        L = component_lipschitz_bound(self.p, self.psi, d, 1.0)
        spec = SubroutineSpec(kind='sgd', step_mode='theory')
        distances = self.mean_square_distances(d, spec, (100, 1000, 10000), self.minimizer(d), lipschitz=L)
        slope = (math.log(distances[10000]) - math.log(distances[100])) / math.log(100.0)
        self.assertLessEqual(slope, -0.8)

    def test_svrg_linear_decay(self):
        d = DualState.ones(self.p.m)
        L = component_lipschitz_bound(self.p, self.psi, d, 1.0)
        M = 20
        spec = SubroutineSpec(kind='svrg', step_mode='theory', epoch_length=M)
        alpha = svrg_contraction(svrg_stepsize(self.p.mu_f, L, M), self.p.mu_f, L, M)
        marks = tuple(M * s for s in range(1, 7))
        distances = self.mean_square_distances(d, spec, marks, self.minimizer(d), lipschitz=L)
        ratios = [distances[b] / distances[a] for a, b in zip(marks, marks[1:])]
        self.assertLessEqual(float(np.mean(ratios)), alpha + 0.05)

    def test_dual_proportional_sampling_beats_uniform(self):
        d = DualState([10.0, 0.01, 0.01, 0.01, 0.01])
        spec = SubroutineSpec(kind='svrg', constant_step=0.05, epoch_length=20)
        x_star = self.minimizer(d)
        marks = (200,)
        dual = self.mean_square_distances(d, spec, marks, x_star)
        uniform = self.mean_square_distances(d, spec, marks, x_star, q=uniform_distribution(self.p.m))
        self.assertLessEqual(dual[200], uniform[200])


def classical_nlr_duals(p, psi, lam, N, K, x):
    """Exact primal minimization by damped Newton steps followed by the multiplicative dual update."""
    trajectory = [lam.copy()]

    def value(z, lam):
        return 0.5 * z @ p.Q @ z + p.c @ z - np.sum(lam * psi.value(N * (p.A @ z + p.b))) / N

    for _ in range(K):
        for _ in range(200):
            g = p.A @ x + p.b
            gradient = p.Q @ x + p.c - (lam * psi.d1(N * g)) @ p.A
            if np.max(np.abs(gradient)) < 1e-13:
                break
            hessian = p.Q - N * (p.A.T * (lam * psi.d2(N * g))) @ p.A
            direction = np.linalg.solve(hessian, gradient)
            t, current = 1.0, value(x, lam)
            while value(x - t * direction, lam) > current + 1e-14 * abs(current) and t > 1e-12:
                t *= 0.5
            x = x - t * direction
        lam = lam * psi.d1(N * (p.A @ x + p.b))
        trajectory.append(lam.copy())
    return trajectory


class SolverTest(TestCase):
    def setUp(self):
        self.psi = default_rescaling()

    def test_dual_update(self):
        d = DualState([1.0, 2.0])
        unchanged = dual_update(d, [0.0], constant_constraint_problem([0.0, 0.0]), self.psi, 3.0)
        np.testing.assert_array_equal(unchanged.lam, d.lam)

        updated = dual_update(DualState([1.0]), [0.0], constant_constraint_problem([0.5]), self.psi, 1.0)
        self.assertAlmostEqual(updated.lam[0], math.exp(-0.5), places=12)
        self.assertAlmostEqual(updated.lam[0], 0.606531, places=6)

    def test_dual_update_stays_positive(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            values = rng.uniform(-5.0, 5.0, 6)
            d = DualState(rng.uniform(0.01, 10.0, 6))
            updated = dual_update(d, [0.0], constant_constraint_problem(values), self.psi, float(rng.uniform(1, 50)))
            self.assertGreater(updated.lam.min(), 0.0)

    def test_dual_underflow_is_floored(self):
        updated = dual_update(DualState([1.0, 1.0]), [0.0], constant_constraint_problem([1.0, 0.0]), self.psi, 1e4)
        self.assertGreater(updated.lam[0], 0.0)
        self.assertEqual(updated.lam[1], 1.0)
        self.assertGreater(scaled_distribution(updated).probs.min(), 0.0)

    def test_outer_iterations(self):
        self.assertEqual(outer_iterations_for(0.01, 10.0, 1.0, 1.0), 3)
        self.assertEqual(outer_iterations_for(5.0, 10.0, 1.0, 1.0), 1)
        counts = [outer_iterations_for(1e-6, N, 1.0, 1.0) for N in (2.0, 10.0, 100.0, 1000.0)]
        self.assertEqual(counts, sorted(counts, reverse=True))
        with self.assertRaises(ConfigurationError):
            outer_iterations_for(0.01, 1.0, 1.0, 1.0)

    def test_inner_eps(self):
        self.assertAlmostEqual(inner_eps_for(0.04, 10.0, 1.0, 1.0), 0.009, places=12)
        self.assertAlmostEqual(inner_eps_for(0.04, 1e12, 1.0, 2.0), 0.005, places=12)
        with self.assertRaises(ConfigurationError):
            inner_eps_for(0.04, 0.5, 1.0, 1.0)

    def test_theory_budget(self):
        constants = TheoryConstants(c_R=1.0, C_Phi=1.0, lambda_star_gap=1.0, A=1.0, B=1.0, x_star_gap=1.0,
                                    zeta=1.0, alpha=math.exp(-1.0))
        self.assertEqual(theory_budget(0, 1, 1.0, 0.5, constants, 'sublinear', 1.0, 1, 1.0), 6)
        self.assertEqual(theory_budget(0, 1, 1.0, 0.5, constants, 'linear', 1.0, 1, 1.0), math.ceil(math.log(4.0)))

        later = TheoryConstants(c_R=1.0, C_Phi=0.5, lambda_star_gap=2.0, A=1.0, B=0.5)
        budgets = [theory_budget(3, 10, 0.1, delta, later, 'sublinear', 4.0, 2, 3.0) for delta in (0.05, 0.2, 0.6)]
        self.assertEqual(budgets, sorted(budgets, reverse=True))
        self.assertGreaterEqual(min(budgets), 1)

    def test_theory_budget_needs_constants(self):
        constants = TheoryConstants(c_R=1.0, C_Phi=1.0, lambda_star_gap=1.0)
        with self.assertRaises(ConfigurationError):
            theory_budget(1, 2, 0.1, 0.5, constants, 'sublinear', 2.0, 1, 1.0)
        with self.assertRaises(ConfigurationError):
            theory_budget(0, 2, 0.1, 0.5, constants, 'linear', 2.0, 1, 1.0)
        with self.assertRaises(ConfigurationError):
            theory_budget(1, 2, 0.1, 0.5, constants, 'quadratic', 2.0, 1, 1.0)

    def test_theory_budget_at_the_optimum(self):
        constants = TheoryConstants(c_R=1.0, C_Phi=1.0, lambda_star_gap=0.0, x_star_gap=0.0, A=1.0, B=1.0, zeta=1.0,
                                    alpha=0.5)
        self.assertEqual(theory_budget(0, 1, 1.0, 0.5, constants, 'linear', 2.0, 1, 1.0), 1)
        self.assertEqual(theory_budget(0, 1, 1.0, 0.5, constants, 'sublinear', 2.0, 1, 1.0), 2)

    def test_scalar_lambda0(self):
        p = interior_problem()
        initial = {}
        cfg = SolverConfig(K=1, lambda0=0.25, subroutine={'kind': 'full_gradient', 'constant_step': 0.1})
        solve(p, self.psi, cfg, callbacks=[lambda k, x, d: initial.setdefault(k, d)])
        np.testing.assert_array_equal(initial[0].lam, np.full(p.m, 0.25))
        self.assertEqual(json.loads(json.dumps(cfg.to_dict()))['lambda0'], 0.25)
        with self.assertRaises(ConfigurationError):
            SolverConfig(K=1, lambda0=-1.0)

    def test_config_validation(self):
        for invalid in ({'N': 0.0, 'K': 1}, {'eps': 0.0, 'K': 1}, {'delta': 1.0, 'K': 1}, {'K': None},
                        {'K': 1, 'budget_mode': 'theory'}, {'K': 1, 'sampling': 'importance'},
                        {'K': 1, 'lambda0': [1.0, 0.0]}):
            with self.assertRaises(ConfigurationError, msg=repr(invalid)):
                SolverConfig(**invalid)

    def test_config_round_trip(self):
        cfg = SolverConfig(N=5.0, K=3, subroutine={'kind': 'sgd', 'constant_step': 0.01},
                           theory_constants={'c_R': 1.0, 'C_Phi': 2.0, 'lambda_star_gap': 1.0},
                           lambda0=np.array([1.0, 2.0]))
        self.assertIsInstance(cfg.subroutine, SubroutineSpec)
        data = json.loads(json.dumps(cfg.to_dict()))
        self.assertEqual(SolverConfig.from_dict(data), SolverConfig.from_dict(cfg.to_dict()))
        self.assertEqual(data['lambda0'], [1.0, 2.0])

    def test_zero_outer_iterations(self):
        p = kkt_problem()
        report = solve(p, self.psi, SolverConfig(K=0, x0=[0.5, -0.5]))
        self.assertEqual(report.x, [0.5, -0.5])
        self.assertEqual(report.outer_iterations, 0)

    def test_kkt_optimum(self):
        """The full gradient solver recovers the hand-solved constrained optimum."""
        p = kkt_problem()
        spec = SubroutineSpec(kind='full_gradient', constant_step=0.01, max_inner_iters=200000)
        report = solve(p, self.psi, SolverConfig(N=10.0, K=10, eps=1e-9, subroutine=spec))
        np.testing.assert_allclose(report.x, [1.0, 1.0], atol=1e-4)
        self.assertLess(report.relative_gap, 1e-4)
        self.assertEqual(report.outer_iterations, 10)

        cumulative = [record.cum_inner_iters for record in report.iterations]
        self.assertEqual(cumulative, sorted(cumulative))
        self.assertTrue(all(record.lam_min > 0.0 for record in report.iterations))

    def test_matches_classical_nlr(self):
        """With exact inner solves the dual trajectory is the classical one."""
        p = anchor_problem()
        N, K = 2.0, 5
        spec = SubroutineSpec(kind='full_gradient', step_mode='theory', max_inner_iters=500000)
        duals = []
        solve(p, self.psi, SolverConfig(N=N, K=K, eps=1e-10, subroutine=spec),
              callbacks=[lambda k, x, d: duals.append(d.lam.copy())])
        expected = classical_nlr_duals(p, self.psi, np.ones(p.m), N, K, np.zeros(p.n))
        self.assertEqual(len(duals), K + 1)
        for ours, theirs in zip(duals, expected):
            np.testing.assert_allclose(ours, theirs, rtol=0, atol=1e-6)

    def test_deterministic(self):
        p = interior_problem(m=20)
        spec = SubroutineSpec(kind='svrg', constant_step=0.05, epoch_length=10, check_interval=50)
        cfg = SolverConfig(N=2.0, K=3, eps=1e-5, subroutine=spec, master_seed=42)
        first = solve(p, self.psi, cfg)
        second = solve(p, self.psi, cfg)
        self.assertEqual(first.to_csv(include_timing=False), second.to_csv(include_timing=False))
        self.assertEqual(first.x, second.x)

    def test_sampling_and_cold_start(self):
        p = interior_problem(m=10)
        spec = SubroutineSpec(kind='sgd', constant_step=0.05, check_interval=20, max_inner_iters=2000)
        for options in ({'sampling': 'uniform'}, {'warm_start': False}):
            report = solve(p, self.psi, SolverConfig(N=1.0, K=2, eps=1e-1, subroutine=spec, **options))
            self.assertEqual(report.outer_iterations, 2)
            self.assertEqual(report.config['sampling'], options.get('sampling', 'dual'))

    def test_callbacks(self):
        p = kkt_problem()
        spec = SubroutineSpec(kind='full_gradient', constant_step=0.01)
        seen = []
        solve(p, self.psi, SolverConfig(N=10.0, K=3, eps=1e-6, subroutine=spec),
              callbacks=[lambda k, x, d: seen.append((k, d.m))])
        self.assertEqual(seen, [(0, 2), (1, 2), (2, 2), (3, 2)])

    def test_stall_abort(self):
        p = interior_problem()
        spec = SubroutineSpec(kind='svrg', constant_step=1e-9, max_inner_iters=10, check_interval=5)
        with self.assertRaises(SolverAbort) as cm:
            solve(p, self.psi, SolverConfig(N=1.0, K=5, eps=1e-12, subroutine=spec, x0=[3.0, 3.0]))
        report = cm.exception.report
        self.assertTrue(report.aborted)
        self.assertEqual(report.outer_iterations, 3)
        self.assertIsNotNone(report.x)

    def test_theory_budget_mode(self):
        p = tiny_problem()
        constants = TheoryConstants(c_R=0.5, C_Phi=1.0, lambda_star_gap=1.0, A=1e-4, B=1e-4, x_star_gap=1.0)
        spec = SubroutineSpec(kind='sgd', step_mode='theory')
        cfg = SolverConfig(N=1.0, K=2, eps=0.1, delta=0.5, budget_mode='theory', theory_constants=constants,
                           subroutine=spec)
        report = solve(p, self.psi, cfg)
        L = component_lipschitz_bound(p, self.psi, DualState.ones(1), 1.0)
        self.assertEqual(report.iterations[0].inner_iters,
                         theory_budget(0, 2, 0.1, 0.5, constants, 'sublinear', 1.0, 1, L))
        self.assertGreaterEqual(report.iterations[1].inner_iters, 1)

    def test_derived_outer_iterations(self):
        p = kkt_problem()
        constants = TheoryConstants(c_R=1.0, C_Phi=1.0, lambda_star_gap=1.0)
        spec = SubroutineSpec(kind='full_gradient', constant_step=0.01)
        report = solve(p, self.psi, SolverConfig(N=10.0, target_eps=0.01, theory_constants=constants, eps=1e-6,
                                                 subroutine=spec))
        self.assertEqual(report.outer_iterations, 3)


class ReportTest(TestCase):
    def make_report(self):
        report = RunReport(method='RanNLR-SVRG', instance='sip', seed=3, config={'N': 100.0, 'K': 2},
                           reference_value=3.221)
        report.append(IterationRecord(k=1, f=3.5, max_violation=0.1, stationarity=1e-3, inner_iters=40,
                                      cum_inner_iters=40, wall_ms=1.25, lam_min=0.5, lam_max=2.0, lam_l1=10.0))
        report.append(IterationRecord(k=2, f=1.0 / 3.0, max_violation=0.0, stationarity=1e-5, inner_iters=20,
                                      cum_inner_iters=60, wall_ms=0.75))
        report.finalize([0.2, 0.2], 3.2242)
        return report

    def test_json_round_trip(self):
        report = self.make_report()
        parsed = RunReport.from_json(report.to_json())
        self.assertEqual(parsed, report)
        self.assertIsNotNone(parsed.started_at.tzinfo)

    def test_relative_gap(self):
        report = self.make_report()
        self.assertAlmostEqual(report.relative_gap, abs(3.2242 - 3.221) / 3.221, places=15)
        self.assertEqual(report.total_inner_iters, 60)
        self.assertIn('RanNLR-SVRG', str(report))

    def test_csv(self):
        report = self.make_report()
        lines = report.to_csv().splitlines()
        self.assertEqual(lines[0], ','.join(CSV_HEADER))
        self.assertEqual(lines[0], 'k,f,max_violation,stationarity,inner_iters,cum_inner_iters,wall_ms')
        self.assertEqual(lines[2].split(',')[1], '0.33333333333333331')
        self.assertEqual(report.to_csv(include_timing=False).splitlines()[0].split(',')[-1], 'cum_inner_iters')

    def test_cumulative_must_not_decrease(self):
        report = self.make_report()
        with self.assertRaises(ValueError):
            report.append(IterationRecord(k=3, f=1.0, max_violation=0.0, stationarity=0.0, inner_iters=1,
                                          cum_inner_iters=10, wall_ms=0.0))

    def test_write(self):
        report = self.make_report()
        with tempfile.TemporaryDirectory() as directory:
            json_path = os.path.join(directory, 'report.json')
            csv_path = os.path.join(directory, 'report.csv')
            report.write(json_path=json_path, csv_path=csv_path)
            with open(json_path) as fp:
                self.assertEqual(RunReport.from_json(fp.read()), report)
            with open(csv_path) as fp:
                self.assertEqual(len(fp.read().splitlines()), 3)


class RegistryTest(TestCase):
    def test_register_as_decorator_and_directly(self):
        registry = ProblemRegistry()

        @registry.register('first')
        def first():
            """The first problem."""
            return tiny_problem()

        registry.register('second', kkt_problem, description='KKT')
        self.assertTrue(registry.contains('first'))
        self.assertEqual(registry.names(), ['first', 'second'])
        self.assertEqual(registry.describe('first'), 'The first problem.')
        self.assertEqual(registry.describe('second'), 'KKT')
        self.assertEqual(registry.build('second').name, 'kkt')
        self.assertIs(first, registry.get('first'))

    def test_unregister(self):
        registry = ProblemRegistry()
        registry.register('tiny', tiny_problem)
        registry.unregister('tiny')
        registry.unregister('tiny')
        self.assertFalse(registry.contains('tiny'))
        with self.assertRaises(KeyError):
            registry.get('tiny')

    def test_not_callable(self):
        with self.assertRaises(TypeError):
            ProblemRegistry().register('broken', 42)

    def test_builtin_problems(self):
        import rannlr.bench  # noqa: F401
        for name in ('sip', 'alp', 'quadratic', 'test-tiny', 'test-kkt'):
            self.assertTrue(problems.contains(name), msg=name)
        self.assertEqual(problems.build('sip', m=10).m, 10)


class SettingsTest(TestCase):
    def test_defaults(self):
        self.assertEqual(conf.get_setting('check_interval'), 1000)
        self.assertEqual(conf.get_setting('float_format'), '%.17g')

    def test_load_user_settings(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'settings.json')
            with open(path, 'w') as fp:
                json.dump({'sampler': 'alias', 'colour': 'blue'}, fp)
            with self.assertLogs('rannlr.conf', level='WARNING'):
                overrides = conf.load_user_settings(path)
        self.assertEqual(overrides, {'sampler': 'alias'})

    def test_environment_variable(self):
        with mock.patch.dict(os.environ, {'RANNLR_SETTINGS': ''}):
            self.assertEqual(conf.load_user_settings(), {})

    def test_sampler_setting(self):
        with override_settings(RANNLR={'sampler': 'alias'}):
            self.assertEqual(uniform_distribution(3).method, ALIAS)

    def test_project_settings(self):
        with override_settings(RANNLR={'check_interval': 50}):
            self.assertEqual(conf.get_setting('check_interval'), 50)
            self.assertEqual(SubroutineSpec().check_interval, 50)
            self.assertEqual(conf.get_setting('stall_patience'), 3)

    def test_logging_config(self):
        config = conf.logging_config('info')
        self.assertEqual(config['loggers']['rannlr']['level'], 'INFO')
        self.assertFalse(config['disable_existing_loggers'])
