#!/usr/bin/env python

############################################################################
#
# MODULE:       s.poincare
# AUTHOR(S):    tpcpy developers
# PURPOSE:      Canonical paths and Poincare lower bounds on the spectral gap.
#
# COPYRIGHT:    (C) tpcpy developers
#
#               This program is free software under the GNU General
#               Public License (>=v2).
#
#############################################################################
"""
Read the averaged matrix as the transition matrix of a reversible chain with uniform stationary
distribution. Fix one path through the chain for every ordered node pair; the Poincare coefficient
``rho`` is the largest total weight routed over a single transition, and ``1 / rho`` never exceeds
the spectral gap.

Every canonical path used here has one or two hops, so a path set is stored as three aligned arrays
(source, intermediate or -1, target) instead of one node list per pair.
"""
import math
from dataclasses import dataclass

import numpy as np

from tpcpy import messages as gs
from tpcpy.exceptions import InvalidArgumentError, InvalidPathSetError, ProtocolPreconditionError
from tpcpy.g_graph.g_topology import CYCLE, GRID, RGG, square_occupancy
from tpcpy.s_spectral.s_gap import (DEFAULT_MC_SAMPLES, expected_matrix_closed_form, expected_matrix_monte_carlo,
                                    lambda2_gap)

__all__ = ['CanonicalPathSet', 'GRID_FAMILY', 'RGG_FAMILY', 'CYCLE_FAMILY', 'canonical_paths_grid',
           'canonical_paths_rgg', 'canonical_paths_cycle', 'canonical_paths', 'poincare_coefficient',
           'edge_congestion', 'spectral_report']

GRID_FAMILY = 'grid-cases-1-2'
RGG_FAMILY = 'rgg-cases-1-2-3'
CYCLE_FAMILY = 'cycle-trivial'

_NAME = 's_spectral'


@dataclass(frozen=True, eq=False)
class CanonicalPathSet(object):
    """
    One path per ordered pair ``(u, w)``, ``u != w``.

    Parameters
    ----------
    n : int
    sources, vias, targets : numpy.ndarray
        Aligned arrays; ``vias[k] == -1`` marks a direct hop.
    family_tag : str

    Methods
    -------
    path(u, w)
        Node sequence of the pair.
    hops()
        Directed transitions of all paths as ``(from, to, path index)`` arrays.
    """
    n: int
    sources: np.ndarray
    vias: np.ndarray
    targets: np.ndarray
    family_tag: str

    def __post_init__(self):
        arrays = [np.asarray(a, dtype=np.intp) for a in (self.sources, self.vias, self.targets)]
        size = self.n * (self.n - 1)

        if any(a.shape != (size,) for a in arrays):
            raise InvalidPathSetError('A path set on {0} nodes holds {1} paths'.format(self.n, size))
        if np.any(arrays[0] == arrays[2]):
            raise InvalidPathSetError('Paths join distinct nodes')

        pairs = np.unique(arrays[0] * self.n + arrays[2])
        if pairs.size != size:
            raise InvalidPathSetError('Every ordered pair needs exactly one path')

        for name, a in zip(('sources', 'vias', 'targets'), arrays):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def __len__(self):
        return self.sources.size

    def __iter__(self):
        for u, z, w in zip(self.sources, self.vias, self.targets):
            yield (int(u), int(w)), _sequence(u, z, w)

    def path(self, u, w):
        # paths are laid out pair by pair with u major
        k = int(u) * (self.n - 1) + int(w) - (1 if w > u else 0)
        if self.sources[k] != u or self.targets[k] != w:
            k = int(np.flatnonzero((self.sources == u) & (self.targets == w))[0])

        return _sequence(self.sources[k], self.vias[k], self.targets[k])

    @property
    def paths(self):
        return dict(iter(self))

    def hops(self):
        index = np.arange(len(self))
        two = self.vias >= 0

        start = np.where(two, self.vias, self.targets)
        tails = np.concatenate([self.sources, self.vias[two]])
        heads = np.concatenate([start, self.targets[two]])

        return tails, heads, np.concatenate([index, index[two]])


# ----------------------------------------------------------------------------------------------------------------------
# Path families
# ----------------------------------------------------------------------------------------------------------------------
def canonical_paths_grid(g):
    """
    Grid paths: a direct hop within a row or column, otherwise ``u -> z -> w`` through the node
    ``z`` in the column of ``w`` and the row of ``u``.

    Every directed transition carries at most ``m`` paths.

    Parameters
    ----------
    g : Graph

    Returns
    -------
    CanonicalPathSet
    """
    if g.topology_tag != GRID:
        raise InvalidArgumentError('canonical_paths_grid needs a grid, got <{0}>'.format(g.topology_tag))

    return _square_paths(g, GRID_FAMILY)


def canonical_paths_rgg(g):
    """
    Paths of a random geometric graph through the square partition.

    Nodes are labeled ``0 .. size - 1`` within their square in construction order and ``a`` is the
    smallest square occupancy.

    * ``u`` and ``w`` in different rows and columns: ``u -> z -> w`` with ``z`` in the square of the
      column of ``w`` and the row of ``u``, label ``(label(u) + label(w)) mod a``.
    * Same row or column, different squares: direct hop.
    * Same square: ``u -> z -> w`` through the right adjacent square, the left one for the last
      column, ``z`` chosen by the same rule.

    Parameters
    ----------
    g : Graph

    Returns
    -------
    CanonicalPathSet

    Raises
    ------
    ProtocolPreconditionError
        If a square is empty.
    """
    if g.topology_tag != RGG:
        raise InvalidArgumentError('canonical_paths_rgg needs an rgg, got <{0}>'.format(g.topology_tag))
    if square_occupancy(g)[0] < 1:
        gs.fatal('Graph {0} has an empty square'.format(g), ProtocolPreconditionError, _NAME)

    return _square_paths(g, RGG_FAMILY)


def canonical_paths_cycle(g):
    """
    Every pair joined by one direct transition; the averaged cycle matrix is the complete chain.
    """
    if g.topology_tag != CYCLE:
        raise InvalidArgumentError('canonical_paths_cycle needs a cycle, got <{0}>'.format(g.topology_tag))

    sources, targets = _ordered_pairs(g.n)

    return CanonicalPathSet(g.n, sources, np.full(sources.size, -1), targets, CYCLE_FAMILY)


def canonical_paths(g):
    """Path family matching the topology of ``g``."""
    return {CYCLE: canonical_paths_cycle, GRID: canonical_paths_grid, RGG: canonical_paths_rgg}[g.topology_tag](g)


# ----------------------------------------------------------------------------------------------------------------------
# Bounds
# ----------------------------------------------------------------------------------------------------------------------
def poincare_coefficient(w, paths):
    """
    Poincare coefficient of an averaged matrix under a canonical path set.

    With the uniform stationary distribution ``pi = 1/n`` a path has length
    ``|gamma_uw| = sum over hops (a, b) of 1 / (pi W_ab)`` and

        rho = max over transitions e of  sum over paths through e of |gamma_uw| pi(u) pi(w)

    Parameters
    ----------
    w : AveragedMatrix
    paths : CanonicalPathSet

    Returns
    -------
    float
        ``rho``; ``1 / rho`` is a lower bound on :func:`lambda2_gap` of ``w``.

    Raises
    ------
    InvalidPathSetError
        If a path uses a transition of probability 0.
    """
    n = w.n
    if paths.n != n:
        raise InvalidArgumentError('Path set on {0} nodes, matrix of dimension {1}'.format(paths.n, n))

    tails, heads, owner = paths.hops()
    probability = w.entries[tails, heads]

    if np.any(probability <= 0):
        k = int(np.flatnonzero(probability <= 0)[0])
        gs.fatal('Canonical path uses the zero transition ({0}, {1})'.format(int(tails[k]), int(heads[k])),
                 InvalidPathSetError, _NAME)

    # |gamma| pi(u) pi(w) = (1 / n) sum 1 / W_ab
    lengths = np.bincount(owner, weights=1.0 / probability, minlength=len(paths)) / n
    load = np.bincount(tails * n + heads, weights=lengths[owner], minlength=n * n)

    return float(load.max())


def edge_congestion(paths):
    """Largest number of canonical paths through one directed transition."""
    tails, heads, _ = paths.hops()

    return int(np.bincount(tails * paths.n + heads).max())


def spectral_report(g, samples=DEFAULT_MC_SAMPLES, rng=None, matrix=None):
    """
    Gap, Poincare coefficient and bound of one graph.

    Parameters
    ----------
    g : Graph
    samples : int
        Monte-Carlo samples for a random geometric graph.
    rng : RandomStream, optional
        Required for random geometric graphs.
    matrix : AveragedMatrix, optional
        Precomputed averaged matrix.

    Returns
    -------
    dict
        ``topology, n, lambda2, poincare_rho, poincare_bound, provenance, samples`` plus
        ``occupancy_min, occupancy_max, edge_congestion`` and for random geometric graphs the fitted
        constant ``c1 = rho / log n``.
    """
    if matrix is None:
        if g.topology_tag == RGG:
            matrix = expected_matrix_monte_carlo(g, samples=samples, rng=rng)
        else:
            matrix = expected_matrix_closed_form(g)

    paths = canonical_paths(g)
    rho = poincare_coefficient(matrix, paths)
    gap = lambda2_gap(matrix)
    lowest, highest = square_occupancy(g)

    report = {'topology': g.topology_tag,
              'n': g.n,
              'lambda2': gap,
              'poincare_rho': rho,
              'poincare_bound': 1.0 / rho,
              'provenance': matrix.provenance,
              'samples': matrix.samples,
              'occupancy_min': lowest,
              'occupancy_max': highest,
              'edge_congestion': edge_congestion(paths)}

    if g.topology_tag == RGG:
        report['c1'] = rho / math.log(g.n)

    if report['poincare_bound'] > gap + matrix.tolerance * g.n:
        gs.warning('Poincare bound {0:.6g} exceeds the gap {1:.6g} of {2}'.format(report['poincare_bound'], gap, g),
                   _NAME)

    gs.verbose('{0}: lambda2={1:.6g} rho={2:.6g}'.format(g, gap, rho), _NAME)

    return report


# ----------------------------------------------------------------------------------------------------------------------
# Private Functions
# ----------------------------------------------------------------------------------------------------------------------
def _sequence(u, z, w):
    return (int(u), int(w)) if z < 0 else (int(u), int(z), int(w))


def _ordered_pairs(n):
    u, w = np.divmod(np.arange(n * n), n)
    keep = u != w

    return u[keep], w[keep]


def _square_paths(g, family):
    m = g.m
    lowest = square_occupancy(g)[0]

    col = np.fromiter((s.i - 1 for s in g.square_of), dtype=np.intp, count=g.n)
    row = np.fromiter((s.j - 1 for s in g.square_of), dtype=np.intp, count=g.n)

    label = np.empty(g.n, dtype=np.intp)
    node_at = np.empty((m, m, lowest), dtype=np.intp)
    for (i, j), nodes in g.nodes_in_square.items():
        label[list(nodes)] = np.arange(len(nodes))
        node_at[i - 1, j - 1] = nodes[:lowest]

    u, w = _ordered_pairs(g.n)
    pick = (label[u] + label[w]) % lowest

    corner = (col[u] != col[w]) & (row[u] != row[w])
    same = (col[u] == col[w]) & (row[u] == row[w])

    vias = np.full(u.size, -1, dtype=np.intp)
    vias[corner] = node_at[col[w][corner], row[u][corner], pick[corner]]

    if np.any(same):
        side = np.where(col[u] == m - 1, col[u] - 1, col[u] + 1)
        vias[same] = node_at[side[same], row[u][same], pick[same]]

    return CanonicalPathSet(g.n, u, vias, w, family)
