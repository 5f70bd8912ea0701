"""
Small problem instances shared by the test suites. They are registered under ``test-*`` names so the
registry and the ``solve`` command can reach them too.
"""
import numpy as np

from rannlr.problem import ProblemInstance, QuadraticProblem
from rannlr.registry import problems


@problems.register('test-tiny')
def tiny_problem():
    """
    ``min x^2`` subject to ``1 - x >= 0``.
    """
    return QuadraticProblem(Q=[[2.0]], c=[0.0], A=[[-1.0]], b=[1.0], lower=[-10.0], upper=[10.0], name='tiny')


@problems.register('test-branch')
def branch_problem():
    """
    ``min x^2 / 2`` subject to ``-x - 5 >= 0``. For ``lam = 1`` and ``N = 1`` the minimizer of the augmented
    Lagrangian lies in the quadratic branch of the exponential rescaling function, so it has a closed form.
    """
    return QuadraticProblem(Q=[[1.0]], c=[0.0], A=[[-1.0]], b=[-5.0], lower=[-10.0], upper=[10.0], name='branch')


@problems.register('test-kkt')
def kkt_problem():
    """
    ``min ||x - (2, 2)||^2 / 2`` subject to ``2 - x1 - x2 >= 0`` and ``x1 + 1 >= 0``. The optimum is ``(1, 1)``
    with multipliers ``(1, 0)``.
    """
    return QuadraticProblem(
        Q=np.eye(2), c=[-2.0, -2.0], c0=4.0,
        A=[[-1.0, -1.0], [1.0, 0.0]], b=[2.0, 1.0],
        lower=[-5.0, -5.0], upper=[5.0, 5.0], name='kkt',
        reference={'value': 1.0, 'x': [1.0, 1.0]},
    )


@problems.register('test-anchor')
def anchor_problem():
    """
    Three affine constraints, one of them active at the optimum, well inside a large box.
    """
    return QuadraticProblem(
        Q=np.eye(2), c=[-2.0, -2.0],
        A=[[-1.0, -1.0], [1.0, 0.0], [0.0, -1.0]], b=[2.0, 1.0, 1.5],
        lower=[-10.0, -10.0], upper=[10.0, 10.0], name='anchor',
    )


@problems.register('test-interior')
def interior_problem(m=5, scale=0.3, seed=4):
    """
    ``min ||x - (0.5, -0.5)||^2 / 2`` with ``m`` affine constraints of norm ``scale`` that hold with a wide
    margin around the minimizer.
    """
    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((m, 2))
    directions *= scale / np.linalg.norm(directions, axis=1)[:, np.newaxis]
    return QuadraticProblem(
        Q=np.eye(2), c=[-0.5, 0.5], A=directions, b=np.full(m, 1.0),
        lower=[-5.0, -5.0], upper=[5.0, 5.0], name='interior',
    )


def random_quadratic(n=3, m=8, seed=0):
    """A strongly convex quadratic with random affine constraints, some of them violated at the origin."""
    rng = np.random.default_rng(seed)
    root = rng.standard_normal((n, n))
    return QuadraticProblem(
        Q=root @ root.T + np.eye(n), c=rng.standard_normal(n),
        A=rng.standard_normal((m, n)), b=rng.standard_normal(m),
        lower=np.full(n, -3.0), upper=np.full(n, 3.0), name='random',
    )


class BrokenProblem(ProblemInstance):
    """
    Two constraints, the second of which evaluates to NaN.
    """

    def __init__(self):
        super(BrokenProblem, self).__init__(1, 2, lower=[-1.0], upper=[1.0], mu_f=1.0, name='broken')

    def objective(self, x):
        return float(0.5 * x[0] ** 2)

    def objective_grad(self, x):
        return np.array([x[0]])

    def raw_constraint_values(self, x, index):
        return np.array([1.0, np.nan])[index]

    def raw_constraint_grads(self, x, index):
        return np.array([[0.0], [1.0]])[index]


@problems.register('test-bound')
def bound_problem():
    """
    ``min (x - 2)^2 / 2`` on ``[-1, 1]`` subject to the slack constraint ``3 - x >= 0``. The augmented Lagrangian
    decreases across the whole box, so its minimizer is the upper bound ``x = 1``.
    """
    return QuadraticProblem(Q=[[1.0]], c=[-2.0], c0=2.0, A=[[-1.0]], b=[3.0], lower=[-1.0], upper=[1.0],
                            name='bound')
