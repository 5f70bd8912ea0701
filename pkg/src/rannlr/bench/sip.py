"""
A discretized semi-infinite program: minimize ``(x1 - 2)^2 + (x2 - 0.2)^2`` over ``x1 in [-1, 1]``,
``x2 in [0, 0.2]`` subject to ``a(u) x1^2 <= x2`` for all ``u`` on a uniform grid of ``(0, 1]``, with
``a(u) = 5 sin(pi sqrt(u)) / (1 + u^2)``.
"""
from __future__ import unicode_literals

import numpy as np

from rannlr.exceptions import ConfigurationError
from rannlr.problem import ProblemInstance

X2_MAX = 0.2


def sip_coefficients(m):
    """
    ``a_i = 5 sin(pi sqrt(i/m)) / (1 + (i/m)^2)`` for ``i = 1..m``, stored 0-based.
    """
    u = np.arange(1, m + 1, dtype=float) / m
    return 5.0 * np.sin(np.pi * np.sqrt(u)) / (1.0 + u * u)


def sip_reference(coefficients):
    """
    The optimum by reduction to one dimension: ``x2 = 0.2`` at the optimum and the tightest constraint binds,
    so ``x1* = min(1, sqrt(0.2 / max_i a_i))``.

    :return: The optimal point and value.
    :rtype: tuple
    """
    a_max = float(np.max(coefficients))
    x1 = 1.0 if a_max <= 0.0 else min(1.0, float(np.sqrt(X2_MAX / a_max)))
    return np.array([x1, X2_MAX]), (x1 - 2.0) ** 2


class SipInstance(ProblemInstance):
    """
    The constraints are exposed as ``g_i(x) = x2 - a_i x1^2 >= 0``.
    """

    def __init__(self, m, beta=1.0):
        m = int(m)
        if m < 1:
            raise ConfigurationError("The SIP grid needs m >= 1, got %d." % m)
        self.coefficients = sip_coefficients(m)
        self.coefficients.setflags(write=False)
        x_star, f_star = sip_reference(self.coefficients)

        super(SipInstance, self).__init__(
            2, m, lower=[-1.0, 0.0], upper=[1.0, X2_MAX], mu_f=2.0, beta=beta, name='sip',
            reference={'value': f_star, 'x': x_star.tolist()},
            metadata={'sign_convention': 'g_i(x) = x2 - a_i x1^2 >= 0, flipped from a_i x1^2 - x2 <= 0'},
        )

    def objective(self, x):
        return float((x[0] - 2.0) ** 2 + (x[1] - X2_MAX) ** 2)

    def objective_grad(self, x):
        return np.array([2.0 * (x[0] - 2.0), 2.0 * (x[1] - X2_MAX)])

    def raw_constraint_values(self, x, index):
        return x[1] - self.coefficients[index] * x[0] ** 2

    def raw_constraint_grads(self, x, index):
        a = self.coefficients[index]
        return np.column_stack([-2.0 * a * x[0], np.ones_like(a)])


def build_sip(m, beta=1.0):
    """
    Discretized semi-infinite program with ``m`` constraints and its reference optimum.

    :rtype: SipInstance
    """
    return SipInstance(m, beta=beta)
