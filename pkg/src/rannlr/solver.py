"""
The randomized nonlinear rescaling outer loop: inexact primal updates by a stochastic inner solver alternating
with the multiplicative dual update ``lam <- lam * psi'(N g(x))``.
"""
from __future__ import unicode_literals

import logging
import math
import time
from dataclasses import dataclass, field, asdict, replace
from typing import Optional

import numpy as np

from rannlr.conf import get_setting
from rannlr.exceptions import ConfigurationError, EvaluationError, SolverAbort
from rannlr.problem import DualState, QuadraticProblem, component_lipschitz_bound, max_violation
from rannlr.report import IterationRecord, RunReport
from rannlr.sampling import stream_for, uniform_distribution
from rannlr.subroutines import SubroutineSpec, FULL_GRADIENT, SGD, run_inner

logger = logging.getLogger(__name__)

ADAPTIVE = 'adaptive'
THEORY = 'theory'

SUBLINEAR = 'sublinear'
LINEAR = 'linear'

DUAL = 'dual'
UNIFORM = 'uniform'

METHOD_NAMES = {
    SGD: 'RanNLR-SGD',
    'svrg': 'RanNLR-SVRG',
    FULL_GRADIENT: 'NLR-full-gradient',
}


@dataclass
class TheoryConstants(object):
    """
    Analysis constants of the budget formulas. None of them can be computed at run time, they are supplied by
    the user. ``A``/``B`` belong to sublinear inner solvers, ``zeta``/``alpha`` to linear ones.
    ``x_star_gap`` estimates ``||x^0 - x*||_inf`` and defaults to the box diameter.
    """
    c_R: float
    C_Phi: float
    lambda_star_gap: float
    A: Optional[float] = None
    B: Optional[float] = None
    zeta: Optional[float] = None
    alpha: Optional[float] = None
    x_star_gap: Optional[float] = None

    def __post_init__(self):
        if self.c_R <= 0.0 or self.C_Phi <= 0.0 or self.lambda_star_gap < 0.0:
            raise ConfigurationError("Theory constants need c_R > 0, C_Phi > 0 and lambda_star_gap >= 0.")

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


@dataclass
class SolverConfig(object):
    """
    Everything that determines a run. Together with the problem, the rescaling function and ``master_seed`` it
    determines the trajectory bit for bit.

    :param N: Scaling parameter.
    :param K: Outer iterations, derived from ``target_eps`` and the theory constants when ``None``.
    :param eps: Inner stationarity tolerance.
    :param delta: Overall failure probability, only used by the theory budgets.
    :param budget_mode: ``adaptive`` runs every inner solve until the tolerance is met, ``theory`` runs exactly
                        the prescribed number of inner iterations.
    :param sampling: ``dual`` samples constraints proportionally to the duals, ``uniform`` uniformly.
    :param lambda0: Initial duals, one per constraint, or a single positive number for all of them. All ones when
                    ``None``.
    :param warm_start: Start every inner solve at the previous outer iterate instead of ``x0``.
    """
    N: float = 100.0
    K: Optional[int] = None
    eps: float = 1e-4
    delta: float = 0.1
    target_eps: Optional[float] = None
    subroutine: SubroutineSpec = field(default_factory=SubroutineSpec)
    budget_mode: str = ADAPTIVE
    theory_constants: Optional[TheoryConstants] = None
    lambda0: Optional[object] = None
    x0: Optional[list] = None
    master_seed: int = 0
    warm_start: bool = True
    sampling: str = DUAL
    stall_factor: Optional[float] = None
    stall_patience: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.subroutine, dict):
            self.subroutine = SubroutineSpec.from_dict(self.subroutine)
        if isinstance(self.theory_constants, dict):
            self.theory_constants = TheoryConstants.from_dict(self.theory_constants)
        if self.stall_factor is None:
            self.stall_factor = float(get_setting('stall_factor'))
        if self.stall_patience is None:
            self.stall_patience = int(get_setting('stall_patience'))

        if not self.N > 0.0:
            raise ConfigurationError("The scaling parameter N must be positive.")
        if not self.eps > 0.0:
            raise ConfigurationError("The inner tolerance eps must be positive.")
        if not 0.0 < self.delta < 1.0:
            raise ConfigurationError("delta must lie in (0, 1).")
        if self.budget_mode not in (ADAPTIVE, THEORY):
            raise ConfigurationError("budget_mode must be 'adaptive' or 'theory', got %r." % (self.budget_mode,))
        if self.sampling not in (DUAL, UNIFORM):
            raise ConfigurationError("sampling must be 'dual' or 'uniform', got %r." % (self.sampling,))
        if self.budget_mode == THEORY and self.theory_constants is None:
            raise ConfigurationError("Theory budgets need theory_constants.")
        if self.K is None:
            if self.theory_constants is None or self.target_eps is None:
                raise ConfigurationError("Without K, target_eps and theory_constants are needed to derive it.")
        elif int(self.K) < 0:
            raise ConfigurationError("K must be non-negative.")
        if self.lambda0 is not None and not np.all(np.asarray(self.lambda0, dtype=float) > 0.0):
            raise ConfigurationError("lambda0 must be strictly positive.")

    @classmethod
    def from_dict(cls, data):
        return cls(**data)

    def to_dict(self):
        data = asdict(self)
        for key in ('lambda0', 'x0'):
            if data[key] is not None and np.ndim(data[key]) == 0:
                data[key] = float(data[key])
            elif data[key] is not None:
                data[key] = [float(value) for value in np.asarray(data[key], dtype=float).ravel()]
        return data


def dual_update(d, x, p, psi, N):
    """
    ``lam'_i = lam_i psi'(N g_i(x))``.

    ``psi'`` is positive everywhere, but for strongly inactive constraints the product can underflow after a
    few updates. Such duals are held at a floor that keeps their sampling probability at or above the smallest
    normal float, so the state and the dual-proportional distribution stay strictly positive.

    :type d: rannlr.problem.DualState
    :rtype: rannlr.problem.DualState
    """
    x = np.asarray(x, dtype=float)
    lam = np.empty(p.m)
    for block in p.blocks():
        lam[block] = d.lam[block] * psi.d1(N * p.constraint_values(x, block))

    if not np.all(np.isfinite(lam)):
        index = int(np.argmax(~np.isfinite(lam)))
        raise EvaluationError("Dual update produced a non-finite value for constraint %d." % index, index=index)

    floor = np.finfo(float).tiny * max(1.0, float(np.sum(lam)))
    underflow = lam < floor
    if np.any(underflow):
        logger.debug("Holding %d underflowing duals at %g", int(np.count_nonzero(underflow)), floor)
        lam[underflow] = floor
    return DualState(lam)


def _check_scaling(N, c_R):
    if not N > c_R:
        raise ConfigurationError("The scaling parameter N=%r must exceed c_R=%r." % (N, c_R))


def outer_iterations_for(target_eps, N, c_R, lambda_gap):
    """
    ``K = ceil(ln(2 ||lam^0 - lam*||_inf / eps) / ln(N / c_R))``, at least one.

    :rtype: int
    """
    _check_scaling(N, c_R)
    if not target_eps > 0.0 or not lambda_gap > 0.0:
        raise ConfigurationError("target_eps and lambda_gap must be positive.")
    return max(1, int(math.ceil(math.log(2.0 * lambda_gap / target_eps) / math.log(N / c_R))))


def inner_eps_for(target_eps, N, c_R, C_Phi):
    """
    The inner tolerance ``(1 - c_R / N) eps / (4 C_Phi)`` that yields final accuracy ``eps``.
    """
    _check_scaling(N, c_R)
    if not C_Phi > 0.0:
        raise ConfigurationError("C_Phi must be positive.")
    return (1.0 - c_R / N) * target_eps / (4.0 * C_Phi)


def _require(constants, *names):
    missing = [name for name in names if getattr(constants, name) is None]
    if missing:
        raise ConfigurationError("Missing theory constants: %s." % ', '.join(missing))


def theory_budget(k, K, eps, delta, constants, rate_kind, N, n, L):
    """
    The inner iteration budget of outer iteration ``k`` that makes every inner solve succeed with probability
    ``(1 - delta)^(1/K)``.

    With ``s = c_R / N`` the distance term is ``||x^0 - x*||^2 + s^2 ||lam^0 - lam*||^2`` for ``k = 0`` and
    ``(1 + s^2) (2 C_Phi eps / (1 - s) + s^k ||lam^0 - lam*||)^2`` afterwards (all norms ``inf``). Sublinear
    solvers need ``ceil(L^2 (n A dist + B) / ((1 - (1 - delta)^(1/K)) eps^2))`` iterations, linear ones
    ``ceil(ln(n zeta L^2 dist / ((1 - (1 - delta)^(1/K)) eps^2)) / ln(1 / alpha))``.

    :param constants: Analysis constants.
    :type constants: TheoryConstants
    :param rate_kind: ``sublinear`` or ``linear``.
    :type rate_kind: str
    :param L: The component Lipschitz bound at ``lam^k``.
    :type L: float
    :return: The budget, at least one.
    :rtype: int
    """
    if K < 1 or not 0.0 < delta < 1.0 or not eps > 0.0 or not N > 0.0:
        raise ConfigurationError("Theory budgets need K >= 1, delta in (0, 1), eps > 0 and N > 0.")

    s = constants.c_R / N
    if k == 0:
        _require(constants, 'x_star_gap')
        distance = constants.x_star_gap ** 2 + s * s * constants.lambda_star_gap ** 2
    else:
        _check_scaling(N, constants.c_R)
        distance = (1.0 + s * s) * (2.0 * constants.C_Phi * eps / (1.0 - s)
                                    + s ** k * constants.lambda_star_gap) ** 2

    denominator = (1.0 - (1.0 - delta) ** (1.0 / K)) * eps * eps
    if rate_kind == SUBLINEAR:
        _require(constants, 'A', 'B')
        budget = math.ceil(L * L * (n * constants.A * distance + constants.B) / denominator)
    elif rate_kind == LINEAR:
        _require(constants, 'zeta', 'alpha')
        if not 0.0 < constants.alpha < 1.0:
            raise ConfigurationError("The contraction factor alpha must lie in (0, 1).")
        ratio = n * constants.zeta * L * L * distance / denominator
        # A start already at the optimum leaves nothing to contract.
        budget = 1 if ratio <= 1.0 else math.ceil(math.log(ratio) / math.log(1.0 / constants.alpha))
    else:
        raise ConfigurationError("Unknown rate kind %r." % (rate_kind,))
    return max(int(budget), 1)


def rate_kind_for(spec):
    return SUBLINEAR if spec.kind == SGD else LINEAR


def lipschitz_for(p, psi, d, N):
    """
    The component Lipschitz bound at ``lam``: the problem's configured bound, else the closed-form bound of a
    quadratic problem.
    """
    if p.lipschitz_grad is not None:
        return p.lipschitz_grad
    if isinstance(p, QuadraticProblem) and psi.curvature_bound is not None:
        return component_lipschitz_bound(p, psi, d, N)
    raise ConfigurationError("Problem %s has no Lipschitz bound, set lipschitz_grad." % p.name)


def _needs_lipschitz(cfg):
    return cfg.budget_mode == THEORY or cfg.subroutine.step_mode == THEORY


def _notify(callbacks, k, x, d):
    for callback in callbacks:
        callback(k, x, d)


def solve(p, psi, cfg, callbacks=()):
    """
    Run ``K`` outer iterations from ``(x0, lambda0)``.

    Each outer iteration draws its random stream from ``SeedSequence([master_seed, k])``, approximately
    minimizes the augmented Lagrangian for the current duals and applies the dual update. In adaptive mode a
    run whose inner solves miss the tolerance by more than ``stall_factor`` for ``stall_patience`` consecutive
    outer iterations is aborted.

    :param p: The problem.
    :type p: rannlr.problem.ProblemInstance
    :param psi: The rescaling function.
    :type psi: rannlr.rescaling.RescalingFunction
    :param cfg: The run configuration.
    :type cfg: SolverConfig
    :param callbacks: Called as ``callback(k, x, dual)`` with ``k = 0`` for the initial state and after every
                      outer iteration with the new iterate and duals.
    :return: The run report, ``report.x`` is the final iterate.
    :rtype: rannlr.report.RunReport
    :raises SolverAbort: When the stall rule fires. The partial report is attached.
    """
    started = time.perf_counter()
    spec = cfg.subroutine

    if cfg.lambda0 is None:
        d = DualState.ones(p.m)
    elif np.ndim(cfg.lambda0) == 0:
        d = DualState(np.full(p.m, float(cfg.lambda0)))
    else:
        d = DualState(cfg.lambda0)
    if d.m != p.m:
        raise ConfigurationError("lambda0 has %d entries, the problem has %d constraints." % (d.m, p.m))
    x0 = np.zeros(p.n) if cfg.x0 is None else np.asarray(cfg.x0, dtype=float)
    if x0.shape != (p.n,):
        raise ConfigurationError("x0 must have %d entries." % p.n)
    x0 = p.project(x0)

    constants = cfg.theory_constants
    if constants is not None and constants.x_star_gap is None:
        constants = replace(constants, x_star_gap=p.box_diameter)

    if cfg.K is None:
        K = outer_iterations_for(cfg.target_eps, cfg.N, constants.c_R, constants.lambda_star_gap)
    else:
        K = int(cfg.K)

    report = RunReport(
        method=METHOD_NAMES[spec.kind],
        instance=p.name,
        seed=cfg.master_seed,
        config=cfg.to_dict(),
        reference_value=p.reference_value,
    )
    q = uniform_distribution(p.m) if cfg.sampling == UNIFORM else None

    logger.info("Starting %s on %s: K=%d, N=%g, eps=%g", report.method, p.name, K, cfg.N, cfg.eps)
    _notify(callbacks, 0, x0, d)

    x = x0
    cumulative = 0
    stalled = 0
    for k in range(K):
        tick = time.perf_counter()
        lipschitz = lipschitz_for(p, psi, d, cfg.N) if _needs_lipschitz(cfg) else None
        fixed_iters = None
        if cfg.budget_mode == THEORY:
            fixed_iters = theory_budget(k, K, cfg.eps, cfg.delta, constants, rate_kind_for(spec), cfg.N, p.n,
                                        lipschitz)

        start = x if cfg.warm_start else x0
        result = run_inner(p, psi, d, cfg.N, spec, start, cfg.eps, stream_for(cfg.master_seed, k), q=q,
                           fixed_iters=fixed_iters, lipschitz=lipschitz)
        x = result.x
        cumulative += result.inner_iters

        violation, violation_index = max_violation(p, x)
        summary = d.summary()
        report.append(IterationRecord(
            k=k + 1,
            f=float(p.objective(x)),
            max_violation=violation,
            stationarity=result.achieved,
            inner_iters=result.inner_iters,
            cum_inner_iters=cumulative,
            wall_ms=1000.0 * (time.perf_counter() - tick),
            lam_min=summary['min'],
            lam_max=summary['max'],
            lam_l1=summary['l1'],
            violation_index=violation_index,
        ))
        d = dual_update(d, x, p, psi, cfg.N)
        _notify(callbacks, k + 1, x, d)

        logger.info("Outer iteration %d/%d: f=%.10g, max violation %.3e, stationarity %.3e after %d inner steps",
                    k + 1, K, report.iterations[-1].f, violation, result.achieved, result.inner_iters)

        if cfg.budget_mode == ADAPTIVE and result.achieved > cfg.stall_factor * cfg.eps:
            stalled += 1
            if stalled >= cfg.stall_patience:
                report.aborted = True
                report.solve_ms = 1000.0 * (time.perf_counter() - started)
                report.finalize(x, p.objective(x))
                raise SolverAbort("Inner solver stalled for %d consecutive outer iterations (stationarity %.3e, "
                                  "eps %.3e)." % (stalled, result.achieved, cfg.eps), report=report)
        else:
            stalled = 0

    report.solve_ms = 1000.0 * (time.perf_counter() - started)
    report.finalize(x, p.objective(x))
    logger.info("%s", report)
    return report
