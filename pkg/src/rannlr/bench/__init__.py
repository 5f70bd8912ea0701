from __future__ import unicode_literals

from rannlr.bench.alp import build_alp
from rannlr.bench.sip import build_sip
from rannlr.problem import QuadraticProblem
from rannlr.registry import problems


@problems.register('sip')
def sip(m, beta=1.0):
    """Discretized semi-infinite program, one constraint per grid point."""
    return build_sip(m, beta=beta)


@problems.register('alp')
def alp(h=0.2, beta=600.0, tikhonov=0.0, normalized=True):
    """Inventory control approximate linear program, one constraint per state-action pair."""
    return build_alp(h=h, beta=beta).problem(tikhonov=tikhonov, normalized=normalized)


@problems.register('quadratic')
def quadratic(Q, c, A, b, lower, upper, **kwargs):
    """Strongly convex quadratic objective with affine constraints on a box."""
    return QuadraticProblem(Q, c, A, b, lower, upper, **kwargs)
