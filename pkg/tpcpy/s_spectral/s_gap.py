#!/usr/bin/env python

############################################################################
#
# MODULE:       s.gap
# AUTHOR(S):    tpcpy developers
# PURPOSE:      Averaged averaging matrices and their spectral gap.
#
# COPYRIGHT:    (C) tpcpy developers
#
#               This program is free software under the GNU General
#               Public License (>=v2).
#
#############################################################################
"""
The averaged matrix is the expectation of the random matrix ``W(tau)`` an inner phase realizes: route
nodes average their route, every other node keeps its value. Its gap ``1 - lambda_(n-1)`` controls
how fast the protocol forgets the initial disagreement.
"""
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from tpcpy import messages as gs
from tpcpy.exceptions import InvalidArgumentError, InvalidMatrixError, UnsupportedTopologyError
from tpcpy.g_graph.g_topology import CYCLE, GRID

__all__ = ['AveragedMatrix', 'CLOSED_FORM', 'MONTE_CARLO', 'DEFAULT_MC_SAMPLES', 'realized_matrix',
           'expected_matrix_closed_form', 'expected_matrix_monte_carlo', 'lambda2_gap']

CLOSED_FORM = 'closed-form'
MONTE_CARLO = 'monte-carlo'

DEFAULT_MC_SAMPLES = 10000

_TOLERANCE = {CLOSED_FORM: 1e-12, MONTE_CARLO: 1e-9}

# Samples whose co-occurrence indices are counted in one bincount call.
_BATCH_ENTRIES = 2 ** 22

_NAME = 's_spectral'


@dataclass(frozen=True, eq=False)
class AveragedMatrix(object):
    """
    Dense symmetric doubly stochastic matrix.

    Parameters
    ----------
    entries : numpy.ndarray
        ``(n, n)`` matrix; stored as a read-only copy.
    provenance : {'closed-form', 'monte-carlo'}
    samples : int, optional
        Number of realized matrices averaged for a Monte-Carlo estimate.

    Raises
    ------
    InvalidMatrixError
        If the matrix is not square, not symmetric, has negative entries or rows not summing to 1,
        within 1e-12 (closed form) or 1e-9 (Monte-Carlo).
    """
    entries: np.ndarray
    provenance: str = CLOSED_FORM
    samples: int = None

    def __post_init__(self):
        if self.provenance not in _TOLERANCE:
            raise InvalidArgumentError('Unknown provenance <{0}>'.format(self.provenance))

        w = np.array(self.entries, dtype=float)
        tol = _TOLERANCE[self.provenance]

        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 1:
            raise InvalidMatrixError('An averaged matrix is square, got shape {0}'.format(w.shape))
        if not np.allclose(w, w.T, rtol=0, atol=tol):
            raise InvalidMatrixError('Matrix is not symmetric within {0}'.format(tol))
        if w.min() < -tol:
            raise InvalidMatrixError('Matrix has negative entries')
        if not np.allclose(w.sum(axis=1), 1.0, rtol=0, atol=max(tol, 1e-12) * w.shape[0]):
            raise InvalidMatrixError('Matrix rows do not sum to 1')

        w = np.clip(w, 0.0, None)
        w.setflags(write=False)
        object.__setattr__(self, 'entries', w)

    @property
    def n(self):
        return self.entries.shape[0]

    @property
    def tolerance(self):
        return _TOLERANCE[self.provenance]


def realized_matrix(outcome, n=None):
    """
    Averaging matrix ``W(tau)`` of one inner phase.

    Parameters
    ----------
    outcome : InnerRoundOutcome or sequence of Route
    n : int, optional
        Dimension; taken from the outcome if omitted.

    Returns
    -------
    numpy.ndarray
        Route nodes' rows hold ``1 / m`` on their route and 0 elsewhere; other rows are identity rows.
    """
    routes = getattr(outcome, 'routes', outcome)
    n = getattr(outcome, 'n', None) if n is None else n
    if n is None:
        raise InvalidArgumentError('Dimension n is required for a bare route list')

    w = np.eye(int(n))
    for route in routes:
        nodes = np.asarray(route.nodes, dtype=np.intp)
        w[nodes, :] = 0.0
        w[np.ix_(nodes, nodes)] = 1.0 / nodes.size

    return w


def expected_matrix_closed_form(g):
    """
    Exact averaged matrix of a cycle or a grid.

    A cycle always averages its single ring route: ``ones / n``. A grid averages rows or columns with
    probability 1/2 each: ``(P_row + P_col) / 2`` where ``P_row`` holds ``1 / m`` on node pairs of
    one row.

    Parameters
    ----------
    g : Graph

    Returns
    -------
    AveragedMatrix

    Raises
    ------
    UnsupportedTopologyError
        For random geometric graphs; use :func:`expected_matrix_monte_carlo`.
    """
    if g.topology_tag == CYCLE:
        return AveragedMatrix(np.full((g.n, g.n), 1.0 / g.n), CLOSED_FORM)

    if g.topology_tag == GRID:
        m = g.m
        block = np.full((m, m), 1.0 / m)
        # node (i, j) has id (j - 1) m + (i - 1): rows are contiguous blocks
        rows = np.kron(np.eye(m), block)
        cols = np.kron(block, np.eye(m))

        return AveragedMatrix(0.5 * (rows + cols), CLOSED_FORM)

    gs.fatal('No closed form for topology <{0}>, use the Monte-Carlo estimate'.format(g.topology_tag),
             UnsupportedTopologyError, _NAME)


def expected_matrix_monte_carlo(g, protocol_sampler=None, samples=DEFAULT_MC_SAMPLES, rng=None):
    """
    Averaged matrix estimated from independent inner phases.

    Parameters
    ----------
    g : Graph
    protocol_sampler : callable, optional
        ``protocol_sampler(g, rng)`` returns the routes of one inner phase, or an object with a
        ``routes`` attribute. Default draws direction, heads and routes with
        :func:`tpcpy.p_protocol.p_twophase.sample_routes`.
    samples : int
        Number of realized matrices, at least 1.
    rng : RandomStream

    Returns
    -------
    AveragedMatrix
        Sample average, symmetrized as ``(A + A^T) / 2``.
    """
    samples = int(samples)
    if samples < 1:
        raise InvalidArgumentError('samples must be >= 1, got {0}'.format(samples))
    if rng is None:
        raise InvalidArgumentError('A random stream is required for the Monte-Carlo estimate')

    if protocol_sampler is None:
        from tpcpy.p_protocol.p_twophase import sample_routes

        def protocol_sampler(graph, stream):
            return sample_routes(graph, stream)[1]

    n = g.n
    weighted = np.zeros(n * n)
    kept = np.zeros(n)
    pending, weights, size = [], [], 0

    for _ in range(samples):
        drawn = protocol_sampler(g, rng)
        routes = getattr(drawn, 'routes', drawn)

        on_route = np.zeros(n, dtype=bool)
        for route in routes:
            nodes = np.asarray(route.nodes, dtype=np.intp)
            on_route[nodes] = True
            pending.append((nodes[:, np.newaxis] * n + nodes[np.newaxis, :]).ravel())
            weights.append(1.0 / nodes.size)
            size += nodes.size ** 2

        kept += ~on_route

        if size >= _BATCH_ENTRIES:
            weighted += _co_occurrence(pending, weights, n)
            pending, weights, size = [], [], 0

    if pending:
        weighted += _co_occurrence(pending, weights, n)

    a = weighted.reshape(n, n)
    a[np.diag_indices(n)] += kept
    a /= samples

    gs.verbose('averaged matrix of {0} estimated from {1} samples'.format(g, samples), _NAME)

    return AveragedMatrix(0.5 * (a + a.T), MONTE_CARLO, samples)


def lambda2_gap(w):
    """
    ``1 - lambda_(n-1)(W)``: one minus the second largest eigenvalue.

    Parameters
    ----------
    w : AveragedMatrix or array_like
        Plain arrays must be symmetric within 1e-9.

    Returns
    -------
    float
        Value in [0, 2].

    Raises
    ------
    InvalidMatrixError
        Non-symmetric input or a 1 x 1 matrix.

    Examples
    --------
    >>> lambda2_gap(np.eye(3))
    0.0
    """
    if isinstance(w, AveragedMatrix):
        entries = w.entries
    else:
        entries = np.asarray(w, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise InvalidMatrixError('Matrix must be square, got shape {0}'.format(entries.shape))
        if not np.allclose(entries, entries.T, rtol=0, atol=_TOLERANCE[MONTE_CARLO]):
            raise InvalidMatrixError('Matrix is not symmetric')

    if entries.shape[0] < 2:
        raise InvalidMatrixError('The gap needs at least two eigenvalues')

    eigenvalues = linalg.eigvalsh(entries)

    return float(np.clip(1.0 - eigenvalues[-2], 0.0, 2.0))


def _co_occurrence(pending, weights, n):
    index = np.concatenate(pending)
    weight = np.repeat(weights, [p.size for p in pending])

    return np.bincount(index, weights=weight, minlength=n * n)
