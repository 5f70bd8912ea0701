"""
Approximate linear programming for a single-product inventory control problem with partially backlogged
demand and zero lead time.

States ``s`` (inventory, negative for backlog) live on ``[-10, 10]``, orders ``a`` on ``[0, 20]`` and demands
``D`` on ``[0, 10]``, all on a grid of step ``h``. The next state is ``s' = min(max(s + a - D, -10), 10)``. The
value function is approximated by ``theta_1 + theta_2 s`` and the exact LP over all state-action pairs becomes a
two-variable LP with ``|S| |A|`` constraints.
"""
from __future__ import unicode_literals

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from rannlr.exceptions import ConfigurationError, UnboundedProblem
from rannlr.problem import QuadraticProblem

logger = logging.getLogger(__name__)

STATE_RANGE = (-10.0, 10.0)
ACTION_RANGE = (0.0, 20.0)
DEMAND_RANGE = (0.0, 10.0)
DEMAND_MEAN = 5.0
DEMAND_STD = 2.0

# (c_p, c_h, c_b, c_d, c_l): ordering, holding, backlog, disposal and lost sales.
DEFAULT_COSTS = (20.0, 2.0, 10.0, 10.0, 100.0)
DEFAULT_DISCOUNT = 0.95
DEFAULT_BOUNDS = ((-1e4, -1e3), (1e4, 1e3))

# Optimum of the h=0.02 instance from a commercial LP solver, too large for the envelope oracle.
FULL_SCALE_PRECISION = 0.02
FULL_SCALE_OPTIMUM = 2146.94

LP_REFERENCE_MAX_CONSTRAINTS = 10 ** 5


def _grid(bounds, h):
    lo, hi = bounds
    steps = (hi - lo) / h
    count = int(round(steps))
    if count < 1 or abs(steps - count) > 1e-9 * max(1.0, steps):
        raise ConfigurationError("Precision %r does not divide the range [%g, %g]." % (h, lo, hi))
    return lo + h * np.arange(count + 1)


def demand_pmf(demands, h, mean=DEMAND_MEAN, std=DEMAND_STD):
    """
    ``p(d) = P(d - h/2 < D <= d + h/2)`` for ``D`` normal truncated to the demand range, with the outer cells
    clipped to the range.
    """
    lo, hi = DEMAND_RANGE
    law = stats.truncnorm((lo - mean) / std, (hi - mean) / std, loc=mean, scale=std)
    edges = np.clip(np.append(demands - 0.5 * h, demands[-1] + 0.5 * h), lo, hi)
    pmf = np.diff(law.cdf(edges))
    return pmf / pmf.sum()


@dataclass
class AlpInstance(object):
    """
    The inventory ALP with its precomputed expectations.

    ``cost[j]`` and ``expected_next_state[j]`` belong to the pair ``(states[j // |A|], actions[j % |A|])``.
    The constraints are ``g_j(theta) = (c_j - theta . (phi(s_j) - gamma E[phi(s')|s_j, a_j])) / beta >= 0``.
    """
    h: float
    beta: float
    discount: float
    costs: tuple
    states: np.ndarray
    actions: np.ndarray
    demands: np.ndarray
    pmf: np.ndarray
    cost: np.ndarray
    expected_next_state: np.ndarray
    precompute_ms: float = 0.0
    metadata: dict = field(default_factory=dict)

    @property
    def m(self):
        return self.states.size * self.actions.size

    @property
    def state_of(self):
        return np.repeat(self.states, self.actions.size)

    @property
    def action_of(self):
        return np.tile(self.actions, self.states.size)

    @property
    def objective_weights(self):
        """``E_q[phi(s)]`` for ``q`` uniform on the states."""
        return np.array([1.0, float(np.mean(self.states))])

    def constraint_matrix(self):
        """
        :return: ``G`` with rows ``phi(s) - gamma E[phi(s')|s, a]`` so that the raw LP reads ``G theta <= c``.
        :rtype: numpy.ndarray
        """
        return np.column_stack([
            np.full(self.m, 1.0 - self.discount),
            self.state_of - self.discount * self.expected_next_state,
        ])

    @property
    def variable_scale(self):
        """
        ``(1 - gamma, max|s|)``: the normalized variables are ``z = theta * variable_scale``, so ``z_1`` is a
        per-period value and ``z_2`` the value change across half the state range.
        """
        return np.array([1.0 - self.discount, float(np.max(np.abs(self.states)))])

    def theta(self, z):
        """The value function weights of normalized variables ``z``."""
        return np.asarray(z, dtype=float) / self.variable_scale

    def problem(self, tikhonov=0.0, bounds=DEFAULT_BOUNDS, reference=None, normalized=True):
        """
        The ALP as a minimization problem: ``-theta . E_q[phi] + (tikhonov / 2) ||theta||^2`` subject to
        ``(c - G theta) / beta >= 0``.

        Normalized problems work in ``z = theta * variable_scale`` with the objective multiplied by ``1 - gamma``.
        In ``theta`` the constraint rows ``(1 - gamma, s - gamma E[s'])`` differ in scale by two orders of
        magnitude and the optimum is only pinned down by the second coordinate; in ``z`` both columns are of
        order one. The feasible set, ``bounds`` (given in ``theta``) and relative gaps are unchanged. Use
        :py:meth:`theta` to map a solution back.

        :param tikhonov: Optional strong convexity modulus, applied in the problem's own variables. The plain
                         ALP objective is linear.
        :type tikhonov: float
        :param reference: Optimal LP value (maximization form). Computed by :py:func:`lp_reference` for desk-scale
                          instances when not given.
        :param normalized: Solve in ``z`` instead of ``theta``.
        :type normalized: bool
        :rtype: rannlr.problem.QuadraticProblem
        """
        if reference is None:
            reference = self.reference_value()
        scale = self.variable_scale if normalized else np.ones(2)
        objective_scale = 1.0 - self.discount if normalized else 1.0
        return QuadraticProblem(
            Q=tikhonov * np.eye(2),
            c=-objective_scale * self.objective_weights / scale,
            A=-self.constraint_matrix() / scale,
            b=self.cost,
            lower=np.asarray(bounds[0], dtype=float) * scale,
            upper=np.asarray(bounds[1], dtype=float) * scale,
            mu_f=tikhonov,
            beta=self.beta,
            name='alp',
            reference={'value': None if reference is None else -objective_scale * reference},
            metadata={
                'h': self.h,
                'precompute_ms': self.precompute_ms,
                'objective': 'minimize -theta . E_q[phi]',
                'normalized': bool(normalized),
                'variable_scale': [float(v) for v in scale],
                'objective_scale': objective_scale,
            },
        )

    def reference_value(self):
        if self.m <= LP_REFERENCE_MAX_CONSTRAINTS:
            return lp_reference(self)[1]
        if math.isclose(self.h, FULL_SCALE_PRECISION) and self.costs == DEFAULT_COSTS \
                and self.discount == DEFAULT_DISCOUNT:
            return FULL_SCALE_OPTIMUM
        return None


def build_alp(h=0.2, beta=600.0, costs=DEFAULT_COSTS, discount=DEFAULT_DISCOUNT):
    """
    Discretize the inventory problem at precision ``h`` and precompute the expected cost and expected next state
    of every state-action pair. Both depend on ``(s, a)`` only through the post-order position ``y = s + a``,
    so they are computed once per distinct ``y``.

    :param h: Grid step, must divide the state, action and demand ranges.
    :type h: float
    :param beta: Constraint normalization divisor.
    :type beta: float
    :rtype: AlpInstance
    """
    if not beta > 0.0:
        raise ConfigurationError("beta must be positive, got %r." % beta)
    if not 0.0 < discount < 1.0:
        raise ConfigurationError("The discount factor must lie in (0, 1).")
    started = time.perf_counter()

    states = _grid(STATE_RANGE, h)
    actions = _grid(ACTION_RANGE, h)
    demands = _grid(DEMAND_RANGE, h)
    pmf = demand_pmf(demands, h)
    c_p, c_h, c_b, c_d, c_l = costs
    lower, upper = STATE_RANGE

    # y = s + a runs over its own grid, y_index = state_index + action_index.
    positions = lower + h * np.arange(states.size + actions.size - 1)
    unclipped = positions[:, np.newaxis] - demands[np.newaxis, :]
    next_state = np.clip(unclipped, lower, upper)
    position_cost = (
        c_h * np.maximum(next_state, 0.0)
        + c_b * np.maximum(-next_state, 0.0)
        + c_d * np.maximum(unclipped - upper, 0.0)
        + c_l * np.maximum(lower - unclipped, 0.0)
    ) @ pmf
    position_next = next_state @ pmf

    y_index = (np.arange(states.size)[:, np.newaxis] + np.arange(actions.size)[np.newaxis, :]).ravel()
    cost = c_p * np.tile(actions, states.size) + position_cost[y_index]
    expected_next_state = position_next[y_index]

    precompute_ms = 1000.0 * (time.perf_counter() - started)
    logger.info("Built ALP instance with %d constraints in %.1f ms", cost.size, precompute_ms)
    return AlpInstance(
        h=float(h), beta=float(beta), discount=float(discount), costs=tuple(float(c) for c in costs),
        states=states, actions=actions, demands=demands, pmf=pmf, cost=cost,
        expected_next_state=expected_next_state, precompute_ms=precompute_ms,
    )


def lp_max_2d(weights, G, c):
    """
    Exactly solve ``max w . theta`` subject to ``G theta <= c`` for two variables with ``G[:, 0] > 0`` and
    ``w[0] > 0``.

    Every constraint reads ``theta_1 <= alpha_i + beta_i theta_2``, so the optimum maximizes the concave
    piecewise linear ``F(theta_2) = w_1 min_i(alpha_i + beta_i theta_2) + w_2 theta_2``. The lower envelope of
    the lines is built in ``O(m log m)`` and ``F`` is maximized over its breakpoints.

    :return: The optimal ``theta`` and value.
    :rtype: tuple
    :raises UnboundedProblem: When ``F`` grows without bound.
    """
    weights = np.asarray(weights, dtype=float)
    G = np.atleast_2d(np.asarray(G, dtype=float))
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if not np.all(G[:, 0] > 0.0) or not weights[0] > 0.0:
        raise ConfigurationError("The envelope oracle needs G[:, 0] > 0 and w[0] > 0.")

    intercepts = c / G[:, 0]
    slopes = -G[:, 1] / G[:, 0]
    w1, w2 = weights

    # Steepest first, ties broken by the lowest intercept.
    order = np.lexsort((intercepts, -slopes))
    hull = []
    for i in order:
        if hull and slopes[hull[-1]] == slopes[i]:
            continue
        while len(hull) >= 2 and _dominated(intercepts, slopes, hull[-2], hull[-1], i):
            hull.pop()
        hull.append(i)

    if w1 * slopes[hull[0]] + w2 < 0.0 or w1 * slopes[hull[-1]] + w2 > 0.0:
        raise UnboundedProblem("The linear program is unbounded.")

    if len(hull) == 1:
        candidates = [0.0]
    else:
        candidates = [_crossing(intercepts, slopes, hull[j], hull[j + 1]) for j in range(len(hull) - 1)]

    best_theta, best_value = None, -np.inf
    for theta_2 in candidates:
        theta_1 = float(np.min(intercepts + slopes * theta_2))
        value = w1 * theta_1 + w2 * theta_2
        if value > best_value:
            best_theta, best_value = np.array([theta_1, theta_2]), value
    return best_theta, float(best_value)


def _crossing(intercepts, slopes, i, j):
    return (intercepts[j] - intercepts[i]) / (slopes[i] - slopes[j])


def _dominated(intercepts, slopes, i, j, k):
    """Line ``j`` never attains the minimum once line ``k`` (flatter than both) is added."""
    return _crossing(intercepts, slopes, i, k) <= _crossing(intercepts, slopes, i, j)


def lp_reference(alp, max_constraints=LP_REFERENCE_MAX_CONSTRAINTS):
    """
    The exact optimum of a desk-scale ALP.

    :type alp: AlpInstance
    :return: ``theta*`` and the optimal value of the (maximization) ALP.
    :rtype: tuple
    """
    if alp.m > max_constraints:
        raise ConfigurationError("The LP oracle is meant for at most %d constraints, the instance has %d."
                                 % (max_constraints, alp.m))
    return lp_max_2d(alp.objective_weights, alp.constraint_matrix(), alp.cost)
