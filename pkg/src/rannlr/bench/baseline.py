"""
Projected primal-dual subgradient iterations (Arrow-Hurwicz) on the plain Lagrangian
``f(x) - lam . g(x)``, the reference method the randomized solver is compared against.
"""
from __future__ import unicode_literals

import logging
import time

import numpy as np

from rannlr.exceptions import ConfigurationError, DivergenceError
from rannlr.problem import max_violation
from rannlr.report import IterationRecord, RunReport

logger = logging.getLogger(__name__)

METHOD_NAME = 'baseline (reimplementation)'


def _lagrangian_terms(p, x, lam):
    values = np.empty(p.m)
    weighted = np.zeros(p.n)
    for block in p.blocks():
        values[block] = p.constraint_values(x, block)
        weighted += lam[block] @ p.constraint_grads(x, block)
    return values, weighted


def baseline_primal_dual(p, steps, step, record_every=1000, x0=None, lambda0=None):
    """
    ``x <- P_X[x - step (grad f(x) - sum_i lam_i grad g_i(x))]``, ``lam <- max(0, lam - step g(x))``, both
    evaluated at the current pair. Duals start at zero unless given.

    The method is deterministic. Records are taken every ``record_every`` steps and at the end; their
    ``stationarity`` column is the norm of the primal gradient mapping ``||x_next - x||_inf / step``.

    :type p: rannlr.problem.ProblemInstance
    :param steps: Number of iterations.
    :type steps: int
    :param step: Constant step size.
    :type step: float
    :rtype: rannlr.report.RunReport
    :raises DivergenceError: When an iterate becomes non-finite.
    """
    if not step > 0.0 or int(steps) < 0 or int(record_every) < 1:
        raise ConfigurationError("The baseline needs step > 0, steps >= 0 and record_every >= 1.")
    started = time.perf_counter()

    x = p.project(np.zeros(p.n) if x0 is None else np.asarray(x0, dtype=float))
    lam = np.zeros(p.m) if lambda0 is None else np.array(lambda0, dtype=float)
    if lam.shape != (p.m,) or np.any(lam < 0.0):
        raise ConfigurationError("lambda0 must be a non-negative vector with %d entries." % p.m)

    report = RunReport(
        method=METHOD_NAME,
        instance=p.name,
        config={'steps': int(steps), 'step': float(step), 'record_every': int(record_every)},
        reference_value=p.reference_value,
    )

    tick = time.perf_counter()
    since_record = 0
    gradient_mapping = 0.0
    for t in range(int(steps)):
        values, weighted = _lagrangian_terms(p, x, lam)
        x_next = p.project(x - step * (p.objective_grad(x) - weighted))
        lam = np.maximum(0.0, lam - step * values)
        if not (np.all(np.isfinite(x_next)) and np.all(np.isfinite(lam))):
            raise DivergenceError("Baseline iterate became non-finite at step %d." % t, iteration=t)

        gradient_mapping = float(np.max(np.abs(x_next - x))) / step
        x = x_next
        since_record += 1
        if (t + 1) % record_every == 0 or t + 1 == steps:
            _record(report, p, x, lam, t + 1, since_record, gradient_mapping, tick)
            since_record = 0
            tick = time.perf_counter()

    report.solve_ms = 1000.0 * (time.perf_counter() - started)
    report.finalize(x, p.objective(x))
    logger.info("%s", report)
    return report


def _record(report, p, x, lam, t, since_record, gradient_mapping, tick):
    violation, violation_index = max_violation(p, x)
    report.append(IterationRecord(
        k=t,
        f=float(p.objective(x)),
        max_violation=violation,
        stationarity=gradient_mapping,
        inner_iters=since_record,
        cum_inner_iters=t,
        wall_ms=1000.0 * (time.perf_counter() - tick),
        lam_min=float(lam.min()),
        lam_max=float(lam.max()),
        lam_l1=float(lam.sum()),
        violation_index=violation_index,
    ))
    logger.debug("Baseline step %d: f=%.10g, max violation %.3e", t, report.iterations[-1].f, violation)
