"""
Nonlinear rescaling functions: smooth concave transforms ψ with ψ(0) = 0 and ψ'(0) = 1 that are applied to
every scaled constraint value ``N * g_i(x)``.

The built-in functions are quadratic extrapolations of a base function ζ: ζ itself on ``[tau, inf)`` and the
second order Taylor polynomial of ζ at ``tau`` below it, which makes ψ total on the real line.
"""
from __future__ import unicode_literals

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from rannlr.exceptions import ConfigurationError

EXP = 'exp_extrapolated'
LOG = 'log_extrapolated'
FRACTION = 'fraction_extrapolated'
CUSTOM = 'custom'

KIND_ALIASES = {
    'exp': EXP,
    'log': LOG,
    'fraction': FRACTION,
    EXP: EXP,
    LOG: LOG,
    FRACTION: FRACTION,
}

DEFAULT_TAU = -0.5

# (ζ, ζ', ζ'') for every built-in kind, valid for t > -1.
BASE_FUNCTIONS = {
    EXP: (
        lambda t: 1.0 - np.exp(-t),
        lambda t: np.exp(-t),
        lambda t: -np.exp(-t),
    ),
    LOG: (
        lambda t: np.log1p(t),
        lambda t: 1.0 / (1.0 + t),
        lambda t: -1.0 / (1.0 + t) ** 2,
    ),
    FRACTION: (
        lambda t: t / (t + 1.0),
        lambda t: 1.0 / (1.0 + t) ** 2,
        lambda t: -2.0 / (1.0 + t) ** 3,
    ),
}


@dataclass(frozen=True)
class RescalingFunction(object):
    """
    A member of the rescaling class. Instances are immutable and can be shared between workers.

    For the extrapolated kinds ``coeffs`` holds ``(a2, a1, a0)`` of the quadratic branch
    ``q(t) = a2 t^2 + a1 t + a0`` used for ``t < tau``. Custom functions carry their own closures instead.
    """
    kind: str
    tau: Optional[float] = None
    coeffs: Optional[tuple] = None
    custom: Optional[tuple] = field(default=None, compare=False, repr=False)

    @property
    def curvature_bound(self):
        """
        :return: ``sup |psi''|`` over the real line, or ``None`` for custom functions. For the built-in kinds
                 ``|zeta''|`` is decreasing on ``[tau, inf)`` and constant below ``tau``.
        :rtype: float
        """
        if self.kind == CUSTOM:
            return None
        return -2.0 * self.coeffs[0]

    def value(self, t):
        return self._evaluate(t, 0)

    def d1(self, t):
        return self._evaluate(t, 1)

    def d2(self, t):
        return self._evaluate(t, 2)

    def _evaluate(self, t, order):
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))

        if self.kind == CUSTOM:
            out = np.broadcast_to(np.asarray(self.custom[order](t), dtype=float), t.shape)
            return float(out[0]) if scalar else np.array(out)

        a2, a1, a0 = self.coeffs
        base = BASE_FUNCTIONS[self.kind][order]
        upper = t >= self.tau
        out = np.empty(t.shape, dtype=float)
        out[upper] = base(t[upper])

        lower = t[~upper]
        if order == 0:
            out[~upper] = (a2 * lower + a1) * lower + a0
        elif order == 1:
            out[~upper] = 2.0 * a2 * lower + a1
        else:
            out[~upper] = 2.0 * a2

        return float(out[0]) if scalar else out

    def as_dict(self):
        return {'kind': self.kind, 'tau': self.tau, 'coeffs': list(self.coeffs) if self.coeffs else None}


def make_extrapolated(kind='exp', tau=DEFAULT_TAU):
    """
    Build the quadratic extrapolation of a base function.

    The quadratic branch is the second order Taylor polynomial of ζ at ``tau``, so ψ, ψ' and ψ'' are continuous
    at the branch point. For the exponential base and ``tau = -0.5`` this gives the coefficients
    ``(-0.5 e^0.5, 0.5 e^0.5, 1 - 5/8 e^0.5)``.

    :param kind: One of ``exp``, ``log`` or ``fraction`` (the long ``*_extrapolated`` names are accepted too).
    :type kind: str
    :param tau: The branch point, strictly inside ``(-1, 0)``.
    :type tau: float
    :return: The rescaling function.
    :rtype: RescalingFunction
    """
    try:
        kind = KIND_ALIASES[kind]
    except KeyError:
        raise ConfigurationError("Unknown rescaling kind %r." % (kind,))

    tau = float(tau)
    if not -1.0 < tau < 0.0:
        raise ConfigurationError("The branch point tau must lie in (-1, 0), got %r." % tau)

    zeta, zeta_d1, zeta_d2 = (float(fn(np.float64(tau))) for fn in BASE_FUNCTIONS[kind])
    a2 = 0.5 * zeta_d2
    a1 = zeta_d1 - tau * zeta_d2
    a0 = zeta - tau * zeta_d1 + 0.5 * tau * tau * zeta_d2

    return RescalingFunction(kind=kind, tau=tau, coeffs=(a2, a1, a0))


def make_custom(psi, psi_d1, psi_d2):
    """
    Wrap user supplied closures. Nothing is checked here, run :py:func:`verify_properties` on the result.

    :type psi: Callable
    :type psi_d1: Callable
    :type psi_d2: Callable
    :rtype: RescalingFunction
    """
    return RescalingFunction(kind=CUSTOM, custom=(psi, psi_d1, psi_d2))


def default_rescaling():
    return make_extrapolated('exp', DEFAULT_TAU)


def psi(fn, t):
    return fn.value(t)


def psi_d1(fn, t):
    return fn.d1(t)


def psi_d2(fn, t):
    return fn.d2(t)


@dataclass
class PropertyReport(object):
    """
    Outcome of :py:func:`verify_properties`. Failures are data, nothing is raised.
    """
    kind: str
    tau: Optional[float]
    grid_size: int
    checks: dict = field(default_factory=dict)
    a: Optional[float] = None
    d1: Optional[float] = None
    d2: Optional[float] = None
    max_derivative_error: Optional[float] = None
    branch_mismatch: Optional[float] = None

    @property
    def passed(self):
        return all(self.checks.values())

    def as_dict(self):
        return {
            'kind': self.kind,
            'tau': self.tau,
            'grid_size': self.grid_size,
            'passed': self.passed,
            'checks': dict(self.checks),
            'a': self.a,
            'd1': self.d1,
            'd2': self.d2,
            'max_derivative_error': self.max_derivative_error,
            'branch_mismatch': self.branch_mismatch,
        }


def verify_properties(fn, grid, fd_step=1e-5, rtol=1e-6):
    """
    Check the defining properties of a rescaling function numerically over a grid.

    The checks are ``zero_value`` (ψ(0) = 0), ``increasing`` (ψ' > 0 on the grid and ψ'(0) = 1), ``concave``
    (ψ'' < 0 on the grid), ``quadratic_decay`` (some ``a > 0`` with ψ(t) <= -a t^2 for grid points t < 0, the
    largest such ``a`` is reported), ``derivative_decay`` (finite ``d1``, ``d2`` with ψ'(t) <= d1/t and
    -ψ''(t) <= d2/t^2 for grid points t > 0, the smallest are reported) and ``derivative_consistency``
    (ψ' against central differences of ψ, relative to ``max(|ψ'|, 1)``). Extrapolated kinds additionally get
    ``branch_match``.

    :param fn: The function to check.
    :type fn: RescalingFunction
    :param grid: Evaluation points, must be non-empty and finite.
    :type grid: list
    :rtype: PropertyReport
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or not np.all(np.isfinite(grid)):
        raise ValueError("The verification grid must be non-empty and finite.")

    report = PropertyReport(kind=fn.kind, tau=fn.tau, grid_size=int(grid.size))
    values = np.atleast_1d(fn.value(grid))
    first = np.atleast_1d(fn.d1(grid))
    second = np.atleast_1d(fn.d2(grid))

    report.checks['zero_value'] = bool(abs(fn.value(0.0)) <= 1e-12)
    report.checks['increasing'] = bool(np.all(first > 0.0) and abs(fn.d1(0.0) - 1.0) <= 1e-12)
    report.checks['concave'] = bool(np.all(second < 0.0))

    negative = grid < 0.0
    if np.any(negative):
        t = grid[negative]
        report.a = float(np.min(-values[negative] / (t * t)))
        report.checks['quadratic_decay'] = bool(report.a > 0.0)
    else:
        report.checks['quadratic_decay'] = False

    positive = grid > 0.0
    if np.any(positive):
        t = grid[positive]
        report.d1 = float(np.max(first[positive] * t))
        report.d2 = float(np.max(-second[positive] * t * t))
        report.checks['derivative_decay'] = bool(np.isfinite(report.d1) and np.isfinite(report.d2))
    else:
        report.checks['derivative_decay'] = False

    central = (np.atleast_1d(fn.value(grid + fd_step)) - np.atleast_1d(fn.value(grid - fd_step))) / (2.0 * fd_step)
    error = np.abs(central - first) / np.maximum(np.abs(first), 1.0)
    report.max_derivative_error = float(np.max(error))
    report.checks['derivative_consistency'] = bool(report.max_derivative_error <= rtol)

    if fn.kind != CUSTOM:
        report.branch_mismatch = branch_mismatch(fn)
        report.checks['branch_match'] = bool(report.branch_mismatch <= 1e-12)

    return report


def branch_mismatch(fn):
    """
    :return: The largest disagreement between the quadratic branch and the base function (value, first and
             second derivative) at the branch point.
    :rtype: float
    """
    a2, a1, a0 = fn.coeffs
    tau = fn.tau
    zeta, zeta_d1, zeta_d2 = (float(base(np.float64(tau))) for base in BASE_FUNCTIONS[fn.kind])
    quadratic = ((a2 * tau + a1) * tau + a0, 2.0 * a2 * tau + a1, 2.0 * a2)
    return max(abs(quadratic[0] - zeta), abs(quadratic[1] - zeta_d1), abs(quadratic[2] - zeta_d2))


def grid_points(lo, hi, step):
    count = int(math.floor((hi - lo) / step + 0.5)) + 1
    return lo + step * np.arange(count)
