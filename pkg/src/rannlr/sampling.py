"""
Sampling distributions over the constraint index set, seeded index draws and the variance ratio that measures
the rate penalty of sampling from a distribution other than the dual-proportional one.

All random streams are ``numpy.random.Generator`` objects over the PCG64 bit generator, seeded through
``SeedSequence([master_seed, k])`` so every outer iteration gets an independent, reproducible stream.
"""
from __future__ import unicode_literals

import csv

import numpy as np

from rannlr.conf import get_setting

DUAL_PROPORTIONAL = 'dual_proportional'
UNIFORM = 'uniform'
CUSTOM = 'custom'

CUMULATIVE = 'cumulative'
ALIAS = 'alias'


class SamplingDistribution(object):
    """
    An immutable distribution on ``[0, m)`` with strictly positive probabilities.

    Draws go through a cumulative table with binary search (``O(log m)`` per draw) or through a Vose alias
    table (``O(1)`` per draw); the ``sampler`` setting picks the default. Rebuilding either structure is
    ``O(m)``.
    """

    def __init__(self, probs, source=CUSTOM, method=None):
        probs = np.array(probs, dtype=float).ravel()
        if probs.size == 0:
            raise ValueError("A sampling distribution needs at least one outcome.")
        if not np.all(np.isfinite(probs)) or not np.all(probs > 0.0):
            raise ValueError("Sampling probabilities must be finite and strictly positive.")
        if abs(probs.sum() - 1.0) > 1e-12 * max(1.0, probs.size ** 0.5):
            raise ValueError("Sampling probabilities must sum to one (got %.17g)." % probs.sum())
        probs.setflags(write=False)

        self.probs = probs
        self.source = source
        self.method = method or get_setting('sampler')
        if self.method not in (CUMULATIVE, ALIAS):
            raise ValueError("Unknown sampler %r." % self.method)

        cumulative = np.cumsum(probs)
        cumulative[-1] = 1.0
        cumulative.setflags(write=False)
        self.cumulative = cumulative

        self._alias = None
        self._alias_prob = None
        if self.method == ALIAS:
            self._alias_prob, self._alias = build_alias_table(probs)

    @property
    def m(self):
        return self.probs.size

    def draw(self, rng, size=None):
        if self.method == ALIAS:
            return self._draw_alias(rng, size)
        u = rng.random(size)
        index = np.searchsorted(self.cumulative, u, side='right')
        index = np.minimum(index, self.m - 1)
        return int(index) if size is None else index

    def _draw_alias(self, rng, size):
        column = rng.integers(0, self.m, size=size)
        u = rng.random(size)
        index = np.where(u < self._alias_prob[column], column, self._alias[column])
        return int(index) if size is None else index

    def to_csv(self, path_or_file):
        """
        Write ``constraint_index,prob`` rows, probabilities at full precision.
        """
        float_format = get_setting('float_format')

        def write(fp):
            writer = csv.writer(fp, lineterminator='\n')
            writer.writerow(['constraint_index', 'prob'])
            for index, prob in enumerate(self.probs):
                writer.writerow([index, float_format % prob])

        if hasattr(path_or_file, 'write'):
            write(path_or_file)
        else:
            with open(path_or_file, 'w', newline='') as fp:
                write(fp)

    def __repr__(self):
        return 'SamplingDistribution(m=%d, source=%s, method=%s)' % (self.m, self.source, self.method)


def build_alias_table(probs):
    """
    Vose's alias method.

    :return: The acceptance probabilities and alias indices of every column.
    :rtype: tuple
    """
    m = probs.size
    scaled = probs * m
    accept = np.ones(m)
    alias = np.arange(m)

    small = [i for i in range(m) if scaled[i] < 1.0]
    large = [i for i in range(m) if scaled[i] >= 1.0]
    while small and large:
        lo = small.pop()
        hi = large.pop()
        accept[lo] = scaled[lo]
        alias[lo] = hi
        scaled[hi] = (scaled[hi] + scaled[lo]) - 1.0
        if scaled[hi] < 1.0:
            small.append(hi)
        else:
            large.append(hi)
    # Leftovers are numerically one.
    for i in small + large:
        accept[i] = 1.0
        alias[i] = i

    accept.setflags(write=False)
    alias.setflags(write=False)
    return accept, alias


def scaled_distribution(d, method=None):
    """
    The dual-proportional distribution ``lam_i / ||lam||_1``.

    :type d: rannlr.problem.DualState
    :rtype: SamplingDistribution
    """
    return SamplingDistribution(d.lam / d.l1_norm, source=DUAL_PROPORTIONAL, method=method)


def uniform_distribution(m, method=None):
    return SamplingDistribution(np.full(int(m), 1.0 / int(m)), source=UNIFORM, method=method)


def custom_distribution(weights, method=None):
    weights = np.asarray(weights, dtype=float)
    return SamplingDistribution(weights / weights.sum(), source=CUSTOM, method=method)


def draw_index(dist, rng):
    return dist.draw(rng)


def draw_indices(dist, rng, size):
    return dist.draw(rng, size=int(size))


def variance_ratio(p, q):
    """
    ``r = sum_i p_i^2 / q_i``. It is at least one, with equality exactly when ``q == p``.

    :param p: The dual-proportional distribution.
    :type p: SamplingDistribution
    :param q: The distribution actually sampled from.
    :type q: SamplingDistribution
    :rtype: float
    """
    if p.m != q.m:
        raise ValueError("Distributions have different supports (%d vs %d)." % (p.m, q.m))
    return float(np.sum(p.probs * (p.probs / q.probs)))


def stream_for(master_seed, k=None):
    """
    :return: An independent PCG64 generator for outer iteration ``k`` of a run seeded with ``master_seed``.
    :rtype: numpy.random.Generator
    """
    entropy = [int(master_seed)] if k is None else [int(master_seed), int(k)]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
