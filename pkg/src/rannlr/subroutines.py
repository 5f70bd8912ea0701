"""
Inner solvers for the primal update ``min_{x in X} L_N(x, lam)``.

The randomized solvers share one framework. With ``A_i = (p_i / q_i) B_i`` for the dual-proportional
distribution ``p`` and the sampling distribution ``q``, and proxies ``phi_i`` standing in for past component
gradients, the estimator

    G(y, phi, I) = A_I(y) - phi_I + sum_i q_i phi_i

is unbiased for ``grad L_N(y, lam)``. SGD keeps ``phi = 0``; SVRG sets ``phi_i = A_i(anchor)`` for an anchor
refreshed every ``M`` steps and never stores the ``m`` proxies, only the anchor and its full gradient.
"""
from __future__ import unicode_literals

import logging
import math
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from rannlr.conf import get_setting
from rannlr.exceptions import ConfigurationError, DivergenceError
from rannlr.problem import component_operators, grad_augmented_lagrangian, projected_residual, stationarity_norm
from rannlr.sampling import scaled_distribution, variance_ratio

logger = logging.getLogger(__name__)

SGD = 'sgd'
SVRG = 'svrg'
FULL_GRADIENT = 'full_gradient'
EXPLICIT = 'explicit'

KIND_ALIASES = {
    'sgd': SGD,
    'svrg': SVRG,
    'full': FULL_GRADIENT,
    'full_gradient': FULL_GRADIENT,
}

THEORY = 'theory'
CONSTANT = 'constant'


@dataclass
class SubroutineSpec(object):
    """
    Which inner solver to run and how.

    ``check_interval`` is the number of iterations between stationarity checks (each check costs a pass over
    all constraints). SVRG additionally checks at every epoch boundary, reusing the anchor's full gradient.
    """
    kind: str = SVRG
    step_mode: str = CONSTANT
    constant_step: Optional[float] = 1e-4
    epoch_length: int = 20
    check_interval: Optional[int] = None
    max_inner_iters: int = 100000

    def __post_init__(self):
        try:
            self.kind = KIND_ALIASES[self.kind]
        except KeyError:
            raise ConfigurationError("Unknown subroutine %r." % (self.kind,))
        if self.step_mode not in (THEORY, CONSTANT):
            raise ConfigurationError("step_mode must be 'theory' or 'constant', got %r." % (self.step_mode,))
        if self.step_mode == CONSTANT and not (self.constant_step and self.constant_step > 0.0):
            raise ConfigurationError("Constant step mode needs constant_step > 0.")
        if int(self.epoch_length) < 1:
            raise ConfigurationError("The SVRG epoch length M must be at least 1.")
        self.epoch_length = int(self.epoch_length)
        if self.check_interval is None:
            self.check_interval = int(get_setting('check_interval'))
        if int(self.check_interval) < 1 or int(self.max_inner_iters) < 1:
            raise ConfigurationError("check_interval and max_inner_iters must be positive.")
        self.check_interval = int(self.check_interval)
        self.max_inner_iters = int(self.max_inner_iters)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)

    def as_dict(self):
        return asdict(self)


class EstimatorState(object):
    """
    The proxies of the generic estimator together with the sampling distribution ``q`` and the ratio
    ``r = sum_i p_i^2 / q_i``.

    Three layouts exist: ``sgd`` (all proxies zero), ``svrg`` (proxies implied by an anchor, only the anchor and
    ``sum_i q_i phi_i`` are stored) and ``explicit`` (an ``(m, n)`` array, used to exercise the framework with
    arbitrary proxies).
    """

    def __init__(self, mode, p, q, n, anchor=None, anchor_mean=None, proxies=None):
        self.mode = mode
        self.p = p
        self.q = q
        self.r = variance_ratio(p, q)
        self.weights = p.probs / q.probs
        self.n = n
        self.anchor = anchor
        self.anchor_mean = anchor_mean
        self.proxies = proxies
        if mode == EXPLICIT:
            self.anchor_mean = self.q.probs @ proxies

    @classmethod
    def sgd(cls, p, q, n):
        return cls(SGD, p, q, n)

    @classmethod
    def svrg(cls, p, q, n):
        return cls(SVRG, p, q, n)

    @classmethod
    def explicit(cls, p, q, proxies):
        proxies = np.asarray(proxies, dtype=float)
        return cls(EXPLICIT, p, q, proxies.shape[1], proxies=proxies)

    def refresh(self, problem, psi, anchor, d, N):
        """
        Move the SVRG anchor. ``sum_i q_i A_i(anchor)`` equals the full gradient at the anchor.

        :return: The full gradient at the new anchor.
        """
        self.anchor = np.array(anchor, dtype=float)
        self.anchor_mean = grad_augmented_lagrangian(problem, psi, self.anchor, d, N)
        return self.anchor_mean

    def proxy(self, problem, psi, i, d, N):
        if self.mode == SGD:
            return np.zeros(self.n)
        if self.mode == EXPLICIT:
            return self.proxies[i]
        return scaled_operator(problem, psi, i, self.anchor, d, self.q, N, p=self.p)

    def proxy_mean(self):
        if self.mode == SGD:
            return np.zeros(self.n)
        return self.anchor_mean


def scaled_operator(problem, psi, i, x, d, q, N, p=None):
    """
    ``A_i(x, lam) = (p_i / q_i) B_i(x, lam)``.

    :param q: The sampling distribution.
    :type q: rannlr.sampling.SamplingDistribution
    :param p: The dual-proportional distribution, rebuilt from ``d`` when omitted.
    :rtype: numpy.ndarray
    """
    p = p or scaled_distribution(d)
    return (p.probs[i] / q.probs[i]) * component_operators(problem, psi, [i], x, d, N)[0]


def gradient_estimator(problem, psi, y, state, i, d, N):
    """
    ``A_I(y) - phi_I + sum_i q_i phi_i`` for the sampled index ``I = i``.

    :type state: EstimatorState
    :rtype: numpy.ndarray
    """
    a_i = scaled_operator(problem, psi, i, y, d, state.q, N, p=state.p)
    return a_i - state.proxy(problem, psi, i, d, N) + state.proxy_mean()


def project_box(x, lower, upper):
    return np.clip(x, lower, upper)


def sgd_stepsize(t, mu_f, L, r=1.0):
    """
    ``2 / (mu_f (t + 2 (1 + 2r) L^2 / mu_f^2))``, the decreasing schedule of the SGD rate guarantee.
    """
    if mu_f <= 0.0 or L < mu_f or r < 1.0 - 1e-12:
        raise ConfigurationError("The SGD schedule needs mu_f > 0, L >= mu_f and r >= 1.")
    return 2.0 / (mu_f * (t + 2.0 * (1.0 + 2.0 * r) * L * L / (mu_f * mu_f)))


def _svrg_factor(M, r):
    return 1.0 + 2.0 * r + 2.0 * M * r


def svrg_stepsize(mu_f, L, M, r=1.0):
    """
    ``mu_f / ((1 + 2r + 2Mr) L^2)``, the constant step minimizing the SVRG contraction factor.
    """
    if mu_f <= 0.0 or L < mu_f:
        raise ConfigurationError("The SVRG step size needs mu_f > 0 and L >= mu_f.")
    return mu_f / (_svrg_factor(M, r) * L * L)


def svrg_contraction(gamma, mu_f, L, M, r=1.0, strict=True):
    """
    ``1 - 2 gamma mu_f + (1 + 2r + 2Mr) gamma^2 L^2``, the per-epoch contraction of the mean squared distance.

    :param strict: Reject step sizes outside ``(0, 2 mu_f / ((1 + 2r + 2Mr) L^2))`` where the factor is not in
                   ``(0, 1)``.
    :rtype: float
    """
    factor = _svrg_factor(M, r)
    if strict and not 0.0 < gamma < 2.0 * mu_f / (factor * L * L):
        raise ConfigurationError("Step size %r is not admissible for the SVRG contraction." % gamma)
    return 1.0 - 2.0 * gamma * mu_f + factor * gamma * gamma * L * L


@dataclass
class InnerResult(object):
    x: np.ndarray
    inner_iters: int
    achieved: float
    converged: bool


def _step_schedule(spec, problem, r, lipschitz=None):
    if spec.step_mode == CONSTANT:
        step = spec.constant_step
        return lambda t: step

    mu_f = problem.mu_f
    L = lipschitz if lipschitz is not None else problem.lipschitz_grad
    if L is None:
        raise ConfigurationError("Theory step sizes need a Lipschitz bound for the components.")
    if spec.kind == SGD:
        return lambda t: sgd_stepsize(t, mu_f, L, r)
    if spec.kind == SVRG:
        step = svrg_stepsize(mu_f, L, spec.epoch_length, r)
        return lambda t: step
    step = 1.0 / L
    return lambda t: step


def _checked(y, t):
    if not np.all(np.isfinite(y)):
        raise DivergenceError("Inner iterate became non-finite at iteration %d." % t, iteration=t)
    return y


def run_inner(problem, psi, d, N, spec, start, eps, rng, q=None, fixed_iters=None, callback=None, lipschitz=None):
    """
    Approximately minimize ``L_N(., lam)`` over the box with the configured subroutine.

    The run stops as soon as a stationarity check finds the projected gradient mapping
    ``||y - P_X[y - grad L_N(y)]||_inf <= eps`` or when the budget ``spec.max_inner_iters`` is spent.
    With ``fixed_iters`` exactly that many iterations are run and no early stop happens; the achieved norm is
    still measured at the end.

    :param d: The (fixed) duals of this primal update.
    :type d: rannlr.problem.DualState
    :param spec: Solver selection and budgets.
    :type spec: SubroutineSpec
    :param start: Initial point, projected onto the box first.
    :param eps: Target stationarity.
    :type eps: float
    :param rng: The random stream of this primal update.
    :type rng: numpy.random.Generator
    :param q: Sampling distribution, the dual-proportional one by default.
    :param callback: Called as ``callback(t, y)`` after every iteration.
    :param lipschitz: Component Lipschitz bound for theory step sizes, ``problem.lipschitz_grad`` by default.
    :rtype: InnerResult
    """
    if eps <= 0.0 and fixed_iters is None:
        raise ConfigurationError("The stationarity target eps must be positive.")

    p = scaled_distribution(d)
    q = q or p
    y = problem.project(np.asarray(start, dtype=float))
    budget = int(fixed_iters) if fixed_iters is not None else spec.max_inner_iters
    can_stop = fixed_iters is None

    if spec.kind == FULL_GRADIENT:
        return _run_full_gradient(problem, psi, d, N, spec, y, eps, budget, can_stop, callback, lipschitz)

    state = EstimatorState.svrg(p, q, problem.n) if spec.kind == SVRG else EstimatorState.sgd(p, q, problem.n)
    step_at = _step_schedule(spec, problem, state.r, lipschitz)
    block = max(1, min(spec.check_interval, 4096))

    t = 0
    indices = ()
    achieved = math.inf
    while t < budget:
        if spec.kind == SVRG and t % spec.epoch_length == 0:
            full = state.refresh(problem, psi, y, d, N)
            achieved = projected_residual(problem, y, full)
            logger.debug("SVRG epoch boundary at t=%d, stationarity %.3e", t, achieved)
            if can_stop and achieved <= eps:
                return InnerResult(y, t, achieved, True)

        if t % block == 0:
            indices = q.draw(rng, size=block)
        i = int(indices[t % block])

        a_y = state.weights[i] * component_operators(problem, psi, [i], y, d, N)[0]
        if spec.kind == SVRG:
            a_anchor = state.weights[i] * component_operators(problem, psi, [i], state.anchor, d, N)[0]
            estimate = a_y - a_anchor + state.anchor_mean
        else:
            estimate = a_y
        y = _checked(problem.project(y - step_at(t) * estimate), t)
        t += 1

        if callback is not None:
            callback(t, y)
        if can_stop and t % spec.check_interval == 0:
            achieved = stationarity_norm(problem, psi, y, d, N)
            logger.debug("Inner check at t=%d, stationarity %.3e", t, achieved)
            if achieved <= eps:
                return InnerResult(y, t, achieved, True)

    achieved = stationarity_norm(problem, psi, y, d, N)
    converged = achieved <= eps
    if can_stop and not converged:
        logger.warning("Inner budget of %d iterations exhausted with stationarity %.3e > %.3e",
                       budget, achieved, eps)
    return InnerResult(y, t, achieved, converged)


def _run_full_gradient(problem, psi, d, N, spec, y, eps, budget, can_stop, callback, lipschitz):
    step_at = _step_schedule(spec, problem, 1.0, lipschitz)
    achieved = math.inf
    for t in range(budget):
        full = grad_augmented_lagrangian(problem, psi, y, d, N)
        achieved = projected_residual(problem, y, full)
        if can_stop and achieved <= eps:
            return InnerResult(y, t, achieved, True)
        y = _checked(problem.project(y - step_at(t) * full), t)
        if callback is not None:
            callback(t + 1, y)

    achieved = stationarity_norm(problem, psi, y, d, N)
    converged = achieved <= eps
    if can_stop and not converged:
        logger.warning("Full gradient budget of %d iterations exhausted with stationarity %.3e", budget, achieved)
    return InnerResult(y, budget, achieved, converged)
