"""
Problem instances, dual variables and the augmented Lagrangian built from a rescaling function.

Constraints follow the convention ``g_i(x) >= 0``. Every instance divides its raw constraint values by ``beta``
before they reach the solver, so the effective constraints are ``g_i(x) / beta``.
"""
from __future__ import unicode_literals

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from rannlr.conf import get_setting
from rannlr.exceptions import ConfigurationError, EvaluationError

logger = logging.getLogger(__name__)


class ProblemInstance(object):
    """
    Base class for problem instances: a strongly convex objective, ``m`` concave constraint functions and a box.

    Subclasses implement :py:meth:`objective`, :py:meth:`objective_grad`, :py:meth:`raw_constraint_values` and
    :py:meth:`raw_constraint_grads`. The constraint oracles are evaluated on index sets (a ``slice`` or an
    integer array) so full sums can be streamed in blocks. Oracles must be pure.

    :param n: Decision dimension.
    :type n: int
    :param m: Number of constraints.
    :type m: int
    :param lower: Lower bounds of the box.
    :param upper: Upper bounds of the box.
    :param mu_f: Strong convexity modulus of the objective.
    :type mu_f: float
    :param lipschitz_grad: Upper bound on the gradient Lipschitz constant of the finite-sum components.
    :type lipschitz_grad: float
    :param beta: Constraint normalization divisor.
    :type beta: float
    """

    def __init__(self, n, m, lower, upper, mu_f, lipschitz_grad=None, beta=1.0, name=None, reference=None,
                 metadata=None):
        self.n = int(n)
        self.m = int(m)
        if self.n < 1 or self.m < 1:
            raise ConfigurationError("A problem needs n >= 1 and m >= 1, got n=%d, m=%d." % (self.n, self.m))

        self.lower = np.broadcast_to(np.asarray(lower, dtype=float), (self.n,)).copy()
        self.upper = np.broadcast_to(np.asarray(upper, dtype=float), (self.n,)).copy()
        if not np.all(self.lower < self.upper):
            raise ConfigurationError("Box bounds must satisfy lower < upper componentwise.")
        self.lower.setflags(write=False)
        self.upper.setflags(write=False)

        self.mu_f = float(mu_f)
        if self.mu_f < 0.0:
            raise ConfigurationError("mu_f must be non-negative, got %r." % self.mu_f)
        self.lipschitz_grad = float(lipschitz_grad) if lipschitz_grad is not None else None
        if self.lipschitz_grad is not None and self.lipschitz_grad < self.mu_f:
            raise ConfigurationError("lipschitz_grad must be at least mu_f.")

        self.beta = float(beta)
        if self.beta <= 0.0:
            raise ConfigurationError("beta must be positive, got %r." % self.beta)

        self.name = name or self.__class__.__name__
        self.reference = reference or {}
        self.metadata = metadata or {}

    def objective(self, x):
        raise NotImplementedError

    def objective_grad(self, x):
        raise NotImplementedError

    def raw_constraint_values(self, x, index):
        raise NotImplementedError

    def raw_constraint_grads(self, x, index):
        raise NotImplementedError

    def constraint_values(self, x, index=None):
        """
        :return: The effective constraint values ``g_i(x) / beta`` on the index set (all constraints by default).
        :rtype: numpy.ndarray
        """
        index = self._index(index)
        return np.asarray(self.raw_constraint_values(x, index), dtype=float) / self.beta

    def constraint_grads(self, x, index=None):
        """
        :return: The effective constraint gradients, one row per index.
        :rtype: numpy.ndarray
        """
        index = self._index(index)
        return np.asarray(self.raw_constraint_grads(x, index), dtype=float) / self.beta

    def eval_range(self, x, index=None):
        return self.constraint_values(x, index), self.constraint_grads(x, index)

    def project(self, x):
        return np.clip(x, self.lower, self.upper)

    @property
    def reference_value(self):
        return self.reference.get('value')

    @property
    def box_diameter(self):
        return float(np.max(self.upper - self.lower))

    def blocks(self, chunk_size=None):
        """
        Split ``[0, m)`` into consecutive slices. Sums over the blocks are always reduced in this order.
        """
        chunk_size = int(chunk_size or get_setting('chunk_size'))
        return [slice(start, min(start + chunk_size, self.m)) for start in range(0, self.m, chunk_size)]

    def _index(self, index):
        if index is None:
            return slice(0, self.m)
        if isinstance(index, slice):
            return index
        index = np.atleast_1d(np.asarray(index, dtype=np.intp))
        if index.size and (index.min() < 0 or index.max() >= self.m):
            raise IndexError("Constraint index out of range for m=%d." % self.m)
        return index


class QuadraticProblem(ProblemInstance):
    """
    ``f(x) = 0.5 x'Qx + c'x + c0`` subject to the affine constraints ``A x + b >= 0`` on a box.

    ``mu_f`` defaults to the smallest eigenvalue of ``Q``. ``lipschitz_grad`` has no default because the
    constraint part of the component Lipschitz constant depends on the duals, see
    :py:func:`component_lipschitz_bound`.
    """

    def __init__(self, Q, c, A, b, lower, upper, c0=0.0, mu_f=None, lipschitz_grad=None, beta=1.0, **kwargs):
        self.Q = np.atleast_2d(np.asarray(Q, dtype=float))
        self.c = np.atleast_1d(np.asarray(c, dtype=float))
        self.c0 = float(c0)
        self.A = np.atleast_2d(np.asarray(A, dtype=float))
        self.b = np.atleast_1d(np.asarray(b, dtype=float))

        n = self.c.size
        if self.Q.shape != (n, n) or self.A.shape[1] != n or self.A.shape[0] != self.b.size:
            raise ValueError("Inconsistent shapes: Q %s, c %s, A %s, b %s."
                             % (self.Q.shape, self.c.shape, self.A.shape, self.b.shape))

        eigenvalues = np.linalg.eigvalsh(0.5 * (self.Q + self.Q.T))
        if mu_f is None:
            mu_f = max(float(eigenvalues[0]), 0.0)

        super(QuadraticProblem, self).__init__(n, self.b.size, lower, upper, mu_f, lipschitz_grad=lipschitz_grad,
                                               beta=beta, **kwargs)

    def objective(self, x):
        return float(0.5 * x @ self.Q @ x + self.c @ x + self.c0)

    def objective_grad(self, x):
        return self.Q @ x + self.c

    def raw_constraint_values(self, x, index):
        return self.A[index] @ x + self.b[index]

    def raw_constraint_grads(self, x, index):
        return self.A[index]


class DualState(object):
    """
    Strictly positive dual variables and their cached l1 norm. The vector is read-only, a dual update produces
    a new state.
    """

    def __init__(self, lam):
        lam = np.array(lam, dtype=float).ravel()
        if lam.size == 0:
            raise ConfigurationError("Dual vector is empty.")
        if not np.all(np.isfinite(lam)):
            raise ConfigurationError("Dual vector has non-finite components.")
        if not np.all(lam > 0.0):
            index = int(np.argmax(lam <= 0.0))
            raise ConfigurationError("Dual variables must be strictly positive (component %d is %r)."
                                     % (index, lam[index]))
        lam.setflags(write=False)
        self.lam = lam
        self.l1_norm = float(np.sum(lam))

    @classmethod
    def ones(cls, m):
        return cls(np.ones(int(m)))

    @property
    def m(self):
        return self.lam.size

    def summary(self):
        return {'min': float(self.lam.min()), 'max': float(self.lam.max()), 'l1': self.l1_norm}

    def __len__(self):
        return self.lam.size


def _map_blocks(fn, blocks):
    """
    Evaluate ``fn`` on every block, fanning out to threads when the ``workers`` setting asks for it. The results
    come back in block order so reductions are reproducible.
    """
    workers = int(get_setting('workers'))
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(fn, blocks))
    return [fn(block) for block in blocks]


def _checked_values(p, x, block):
    values = p.constraint_values(x, block)
    if not np.all(np.isfinite(values)):
        position = int(np.argmax(~np.isfinite(values)))
        if isinstance(block, slice):
            index = (block.start or 0) + position
        else:
            index = int(np.asarray(block)[position])
        raise EvaluationError("Constraint %d is not finite at x=%r." % (index, x), index=index)
    return values


def _check_objective(value):
    if not np.all(np.isfinite(value)):
        raise EvaluationError("The objective oracle returned a non-finite value.")
    return value


def augmented_lagrangian(p, psi, x, d, N):
    """
    ``L_N(x, lam) = f(x) - N^-1 sum_i lam_i psi(N g_i(x))``.

    :type p: ProblemInstance
    :type psi: rannlr.rescaling.RescalingFunction
    :type d: DualState
    :rtype: float
    """
    x = np.asarray(x, dtype=float)

    def block_sum(block):
        values = _checked_values(p, x, block)
        return float(d.lam[block] @ psi.value(N * values))

    penalty = sum(_map_blocks(block_sum, p.blocks()))
    return _check_objective(p.objective(x)) - penalty / N


def grad_augmented_lagrangian(p, psi, x, d, N):
    """
    ``grad f(x) - sum_i lam_i psi'(N g_i(x)) grad g_i(x)``, streamed over constraint blocks.

    :rtype: numpy.ndarray
    """
    x = np.asarray(x, dtype=float)

    def block_sum(block):
        values = _checked_values(p, x, block)
        weights = d.lam[block] * psi.d1(N * values)
        return weights @ p.constraint_grads(x, block)

    total = np.zeros(p.n)
    for partial in _map_blocks(block_sum, p.blocks()):
        total += partial
    return _check_objective(np.asarray(p.objective_grad(x), dtype=float)) - total


def component_operators(p, psi, index, x, d, N):
    """
    Vectorized :py:func:`component_operator`: one row ``B_i(x, lam)`` per requested index.
    """
    x = np.asarray(x, dtype=float)
    index = p._index(index)
    values = _checked_values(p, x, index)
    scale = d.l1_norm * psi.d1(N * values)
    return p.objective_grad(x)[np.newaxis, :] - scale[:, np.newaxis] * p.constraint_grads(x, index)


def component_operator(p, psi, i, x, d, N):
    """
    The gradient of the ``i``-th finite-sum component:
    ``B_i(x, lam) = grad f(x) - ||lam||_1 psi'(N g_i(x)) grad g_i(x)``.

    :param i: Constraint index in ``[0, m)``.
    :type i: int
    :rtype: numpy.ndarray
    """
    if not 0 <= int(i) < p.m:
        raise IndexError("Constraint index %r out of range for m=%d." % (i, p.m))
    return component_operators(p, psi, [int(i)], x, d, N)[0]


def projected_residual(p, x, grad):
    """
    ``||x - P_X[x - grad]||_inf``: zero exactly at the stationary points of a box-constrained problem, including
    those sitting on a bound where the raw gradient does not vanish.
    """
    x = np.asarray(x, dtype=float)
    return float(np.max(np.abs(x - p.project(x - grad))))


def stationarity_norm(p, psi, x, d, N):
    return projected_residual(p, x, grad_augmented_lagrangian(p, psi, x, d, N))


def max_violation(p, x):
    """
    The largest violation ``max(0, -g_i(x))`` over all constraints.

    :return: The violation and the (0-based) index attaining it.
    :rtype: tuple
    """
    x = np.asarray(x, dtype=float)
    best, best_index = 0.0, 0
    for block in p.blocks():
        values = _checked_values(p, x, block)
        local = int(np.argmin(values))
        if -values[local] > best:
            best, best_index = float(-values[local]), block.start + local
    return best, best_index


def component_lipschitz_bound(p, psi, d, N):
    """
    A global bound on the gradient Lipschitz constant of every component ``f_i^N(.; lam)`` of a
    :py:class:`QuadraticProblem`: ``||Q||_2 + ||lam||_1 N sup|psi''| max_i ||grad g_i||^2``.
    """
    if not isinstance(p, QuadraticProblem):
        raise TypeError("A closed-form bound is only available for quadratic problems.")
    if psi.curvature_bound is None:
        raise ConfigurationError("Custom rescaling functions carry no curvature bound.")
    q_norm = float(np.linalg.norm(p.Q, 2))
    a_norm = float(np.max(np.sum((p.A / p.beta) ** 2, axis=1)))
    return q_norm + d.l1_norm * N * psi.curvature_bound * a_norm


def estimate_lipschitz(p, psi, x, d, N, iters=30, h=1e-6, seed=0):
    """
    Estimate the largest curvature of ``L_N(., lam)`` at ``x`` by power iteration on finite-difference
    Hessian-vector products of the gradient. The estimate bounds the Lipschitz constant of the full gradient
    near ``x`` from below, so it is a refinement to compare against a configured bound, not a guarantee.

    :rtype: float
    """
    rng = np.random.default_rng(seed)
    x = np.asarray(x, dtype=float)
    v = rng.standard_normal(p.n)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(iters):
        hv = (grad_augmented_lagrangian(p, psi, x + h * v, d, N)
              - grad_augmented_lagrangian(p, psi, x - h * v, d, N)) / (2.0 * h)
        norm = float(np.linalg.norm(hv))
        if norm == 0.0:
            break
        estimate = norm
        v = hv / norm
    logger.debug("Power iteration curvature estimate %.6g after %d iterations", estimate, iters)
    return estimate
