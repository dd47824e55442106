#!/usr/bin/env python

############################################################################
#
# MODULE:       c.awgn
# AUTHOR(S):    tpcpy developers
# PURPOSE:      Additive white Gaussian noise links and reproducible random streams.
#
# COPYRIGHT:    (C) tpcpy developers
#
#               This program is free software under the GNU General
#               Public License (>=v2).
#
#############################################################################
"""
Every analog value that crosses a link is perturbed by an independent N(0, sigma2) variate. Each
logical message consumes exactly one standard normal draw from the sender's stream, also in the
noiseless setting, so runs that differ only in the noise variance walk through identical route
choices.
"""
from dataclasses import dataclass, field

import numpy as np

from tpcpy.exceptions import InvalidArgumentError

__all__ = ['NoiseModel', 'RandomStream', 'transmit', 'transmit_many',
           'PATH_DOMAIN', 'GRAPH_DOMAIN', 'DATA_DOMAIN', 'SPECTRAL_DOMAIN']

# Stream domains keep the draws of different consumers of one root seed apart.
PATH_DOMAIN = 0
GRAPH_DOMAIN = 1
DATA_DOMAIN = 2
SPECTRAL_DOMAIN = 3

_SEED_MAX = 2 ** 64 - 1


def _edge_key(u, v):
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class NoiseModel(object):
    """
    Noise of one link transmission.

    Parameters
    ----------
    sigma2 : float
        Noise variance per transmission, in squared units of the node values.
    enabled : bool
        If False the model behaves as ``sigma2 = 0``.
    edge_sigma2 : dict, optional
        Per-edge variances keyed by node pairs; links without entry use ``sigma2``.
    """
    sigma2: float = 1.0
    enabled: bool = True
    edge_sigma2: dict = field(default=None, compare=False)

    def __post_init__(self):
        if not np.isfinite(self.sigma2) or self.sigma2 < 0:
            raise InvalidArgumentError('sigma2 must be a finite value >= 0, got {0}'.format(self.sigma2))

        if self.edge_sigma2 is not None:
            table = {}
            for (u, v), value in self.edge_sigma2.items():
                if not np.isfinite(value) or value < 0:
                    raise InvalidArgumentError('edge variance of ({0}, {1}) must be >= 0, got {2}'.format(u, v, value))
                table[_edge_key(u, v)] = float(value)
            object.__setattr__(self, 'edge_sigma2', table)

    @classmethod
    def noiseless(cls):
        return cls(sigma2=0.0, enabled=False)

    @property
    def is_uniform(self):
        return not self.edge_sigma2

    def variance(self, u=None, v=None):
        """
        Variance of a transmission over the link ``u - v``.

        Parameters
        ----------
        u, v : int, optional
            End points of the link. Without them the uniform variance is returned.

        Returns
        -------
        float
        """
        if not self.enabled:
            return 0.0

        if u is not None and v is not None and self.edge_sigma2:
            return self.edge_sigma2.get(_edge_key(u, v), self.sigma2)

        return float(self.sigma2)

    def hop_variances(self, nodes):
        """
        Variances of the consecutive hops along a node sequence.

        Parameters
        ----------
        nodes : sequence of int

        Returns
        -------
        numpy.ndarray
            Array of length ``len(nodes) - 1``.
        """
        hops = max(len(nodes) - 1, 0)

        if self.is_uniform:
            return np.full(hops, self.variance())

        return np.array([self.variance(nodes[k], nodes[k + 1]) for k in range(hops)], dtype=float)


class RandomStream(object):
    """
    One reproducible stream of random numbers.

    The stream is a PCG64 generator seeded from ``SeedSequence(seed, spawn_key=(domain, stream_id))``;
    identical ``(seed, stream_id, domain)`` triples give identical sequences and distinct ids give
    independent ones.

    Parameters
    ----------
    seed : int
        Root seed, 0 <= seed < 2**64.
    stream_id : int
        Stream number, one per sample path.
    domain : int or tuple of int
        Consumer of the stream (sample paths, graph drawing, initial data, spectral sampling). A tuple
        such as ``(PATH_DOMAIN, topology, n)`` separates the streams of different experiments.

    Attributes
    ----------
    generator : numpy.random.Generator

    Methods
    -------
    normal(size=None)
        Standard normal variates.
    integers(high, size=None)
        Uniform integers in ``[0, high)``.
    uniform(size=None)
        Uniform variates in ``[0, 1)``.
    spawn(count)
        Sibling streams with consecutive stream ids after this one.
    """

    def __init__(self, seed, stream_id=0, domain=PATH_DOMAIN):
        seed, stream_id = int(seed), int(stream_id)
        domain = tuple(int(d) for d in domain) if isinstance(domain, (tuple, list)) else (int(domain),)

        if not 0 <= seed <= _SEED_MAX:
            raise InvalidArgumentError('seed must be a 64-bit unsigned integer, got {0}'.format(seed))
        if stream_id < 0:
            raise InvalidArgumentError('stream_id must be >= 0, got {0}'.format(stream_id))
        if not domain or min(domain) < 0:
            raise InvalidArgumentError('domain entries must be >= 0, got {0}'.format(domain))

        self.seed = seed
        self.stream_id = stream_id
        self.domain = domain if len(domain) > 1 else domain[0]

        sequence = np.random.SeedSequence(seed, spawn_key=domain + (stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def __repr__(self):
        return 'RandomStream(seed={0}, stream_id={1}, domain={2})'.format(self.seed, self.stream_id, self.domain)

    # ------------------------------------------------------------------------------------------------------------------
    # Public Methods
    # ------------------------------------------------------------------------------------------------------------------
    def normal(self, size=None):
        return self.generator.standard_normal(size)

    def integers(self, high, size=None):
        return self.generator.integers(0, high, size=size)

    def uniform(self, size=None):
        return self.generator.random(size)

    def spawn(self, count):
        """
        Streams with stream ids ``stream_id + 1 .. stream_id + count`` in the same domain.

        Parameters
        ----------
        count : int

        Returns
        -------
        list of RandomStream
        """
        return [RandomStream(self.seed, self.stream_id + k, self.domain) for k in range(1, int(count) + 1)]

    @classmethod
    def family(cls, seed, count, domain=PATH_DOMAIN, first=0):
        """
        Streams ``first .. first + count - 1`` of one root seed, one per sample path.
        """
        return [cls(seed, first + k, domain) for k in range(int(count))]


def transmit(value, noise, rng, u=None, v=None):
    """
    Send one real value over a noisy link.

    Parameters
    ----------
    value : float
        Transmitted value.
    noise : NoiseModel
    rng : RandomStream
        Stream of the sending node's sample path.
    u, v : int, optional
        Link end points, only relevant with per-edge variances.

    Returns
    -------
    float
        ``value + z`` with ``z ~ N(0, sigma2)``.

    Examples
    --------
    >>> transmit(5.0, NoiseModel.noiseless(), RandomStream(1))
    5.0
    """
    z = rng.normal()

    return float(value) + np.sqrt(noise.variance(u, v)) * z


def transmit_many(values, noise, rng, variances=None):
    """
    Vector form of :func:`transmit`.

    One variate is consumed per element, in element order, so the result equals repeated scalar calls.

    Parameters
    ----------
    values : array_like
    noise : NoiseModel
    rng : RandomStream
    variances : array_like, optional
        Per-element link variances; default is the uniform variance of ``noise``.

    Returns
    -------
    numpy.ndarray
    """
    values = np.asarray(values, dtype=float)
    z = rng.normal(values.shape)

    if variances is None:
        scale = np.sqrt(noise.variance())
    else:
        scale = np.sqrt(np.asarray(variances, dtype=float)) if noise.enabled else 0.0

    return values + scale * z
