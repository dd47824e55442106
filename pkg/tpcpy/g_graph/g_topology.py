#!/usr/bin/env python

############################################################################
#
# MODULE:       g.topology
# AUTHOR(S):    tpcpy developers
# PURPOSE:      Cycle, grid and random geometric graphs with their square partition.
#
# COPYRIGHT:    (C) tpcpy developers
#
#               This program is free software under the GNU General
#               Public License (>=v2).
#
#############################################################################
"""
The unit square is divided into m x m squares; square (1, 1) is the bottom left one, ``i`` counts
columns and ``j`` counts rows. Every node belongs to exactly one square. The single cycle uses a
degenerate 1 x n partition, square (1, k + 1) holding node k, so all topologies share one code path.

Random geometric graphs connect every pair of nodes whose squares are identical or edge-adjacent,
which is the connectivity the transmission radius guarantees. Draws leaving a square empty are
rejected and redrawn from the same stream.
"""
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from tpcpy import messages as gs
from tpcpy.exceptions import DisconnectedGraphError, InvalidArgumentError, RegularityError

__all__ = ['Graph', 'SquareIndex', 'CYCLE', 'GRID', 'RGG', 'TOPOLOGIES', 'DEFAULT_RETRY_CAP',
           'build_cycle', 'build_grid', 'build_rgg', 'rgg_squares_per_side', 'diameter', 'spread_function',
           'spread_inverse', 'square_occupancy', 'is_connected', 'neighbors', 'save_edge_list', 'load_edge_list']

CYCLE = 'cycle'
GRID = 'grid2d'
RGG = 'rgg'
TOPOLOGIES = (CYCLE, GRID, RGG)

DEFAULT_RETRY_CAP = 20

# Number of BFS sources handled per shortest path call.
_CHUNK = 256

_NAME = 'g_graph'


class SquareIndex(NamedTuple):
    """Square (i, j) of the partition, 1-based; (1, 1) is the bottom left square."""
    i: int
    j: int


@dataclass(frozen=True, eq=False)
class Graph(object):
    """
    Immutable graph with its square partition.

    Parameters
    ----------
    n : int
        Number of nodes, labeled 0 .. n - 1.
    edges : frozenset of tuple
        Undirected edges as ``(u, v)`` with ``u < v``.
    m : int
        Squares per side.
    square_of : tuple of SquareIndex
        Square of every node.
    topology_tag : {'cycle', 'grid2d', 'rgg'}
    positions : numpy.ndarray, optional
        ``(n, 2)`` coordinates in the unit square.

    Attributes
    ----------
    nodes_in_square : dict
        Maps every square to the ordered tuple of its nodes (construction order).
    adjacency : tuple of tuple
        Sorted neighbours of every node.

    Methods
    -------
    square_nodes(i, j)
        Nodes of a square as an integer array.
    occupancy()
        ``(m, m)`` array of square occupancies, indexed ``[i - 1, j - 1]``.
    """
    n: int
    edges: frozenset
    m: int
    square_of: tuple
    topology_tag: str
    positions: np.ndarray = None
    nodes_in_square: dict = field(init=False, repr=False)
    adjacency: tuple = field(init=False, repr=False)

    def __post_init__(self):
        nodes_in_square = {}
        for node, square in enumerate(self.square_of):
            nodes_in_square.setdefault(SquareIndex(*square), []).append(node)

        neighbours = [[] for _ in range(self.n)]
        for u, v in self.edges:
            neighbours[u].append(v)
            neighbours[v].append(u)

        if self.positions is not None:
            positions = np.array(self.positions, dtype=float)
            positions.setflags(write=False)
            object.__setattr__(self, 'positions', positions)

        object.__setattr__(self, 'square_of', tuple(SquareIndex(*s) for s in self.square_of))
        object.__setattr__(self, 'nodes_in_square', {k: tuple(v) for k, v in sorted(nodes_in_square.items())})
        object.__setattr__(self, 'adjacency', tuple(tuple(sorted(a)) for a in neighbours))
        object.__setattr__(self, '_cache', {})

        _check_invariants(self)

    def __repr__(self):
        return 'Graph(topology={0}, n={1}, m={2}, edges={3})'.format(self.topology_tag, self.n, self.m,
                                                                      len(self.edges))

    # Worker processes receive the graph without its caches.
    def __getstate__(self):
        state = dict(self.__dict__)
        state['_cache'] = {}
        return state

    def __setstate__(self, state):
        for key, value in state.items():
            object.__setattr__(self, key, value)

    # ------------------------------------------------------------------------------------------------------------------
    # Public Methods
    # ------------------------------------------------------------------------------------------------------------------
    def square_nodes(self, i, j):
        key = ('square', i, j)
        if key not in self._cache:
            nodes = np.array(self.nodes_in_square.get((i, j), ()), dtype=np.intp)
            nodes.setflags(write=False)
            self._cache[key] = nodes

        return self._cache[key]

    def occupancy(self):
        if 'occupancy' not in self._cache:
            if self.topology_tag == CYCLE:
                table = np.zeros((1, self.n), dtype=int)
            else:
                table = np.zeros((self.m, self.m), dtype=int)

            for (i, j), nodes in self.nodes_in_square.items():
                table[i - 1, j - 1] = len(nodes)

            table.setflags(write=False)
            self._cache['occupancy'] = table

        return self._cache['occupancy']

    def csgraph(self):
        """Adjacency as a ``scipy.sparse`` matrix for the ``csgraph`` routines."""
        if 'csgraph' not in self._cache:
            if self.edges:
                pairs = np.array(sorted(self.edges), dtype=np.intp)
                rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
                cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
            else:
                rows = cols = np.zeros(0, dtype=np.intp)

            self._cache['csgraph'] = csr_matrix((np.ones(rows.size), (rows, cols)), shape=(self.n, self.n))

        return self._cache['csgraph']


# ----------------------------------------------------------------------------------------------------------------------
# Construction
# ----------------------------------------------------------------------------------------------------------------------
def build_cycle(n):
    """
    Ring on ``n`` nodes with edges ``(k, k + 1 mod n)``.

    Parameters
    ----------
    n : int
        Number of nodes, at least 3.

    Returns
    -------
    Graph

    Examples
    --------
    >>> sorted(build_cycle(3).edges)
    [(0, 1), (0, 2), (1, 2)]
    """
    n = _as_int(n, 'n')
    if n < 3:
        gs.fatal('A cycle needs n >= 3 nodes, got {0}'.format(n), InvalidArgumentError, _NAME)

    edges = frozenset(_ordered(k, (k + 1) % n) for k in range(n))
    square_of = tuple(SquareIndex(1, k + 1) for k in range(n))

    return Graph(n=n, edges=edges, m=n, square_of=square_of, topology_tag=CYCLE)


def build_grid(m):
    """
    Two-dimensional m x m grid with four-nearest-neighbour connectivity.

    Node ``(j - 1) * m + (i - 1)`` sits at the centre of square (i, j).

    Parameters
    ----------
    m : int
        Squares per side, at least 2.

    Returns
    -------
    Graph
    """
    m = _as_int(m, 'm')
    if m < 2:
        gs.fatal('A grid needs m >= 2, got {0}'.format(m), InvalidArgumentError, _NAME)

    n = m * m
    square_of = tuple(SquareIndex(k % m + 1, k // m + 1) for k in range(n))
    positions = np.array([((s.i - 0.5) / m, (s.j - 0.5) / m) for s in square_of])

    edges = set()
    for k in range(n):
        i, j = k % m, k // m
        if i + 1 < m:
            edges.add((k, k + 1))
        if j + 1 < m:
            edges.add((k, k + m))

    return Graph(n=n, edges=frozenset(edges), m=m, square_of=square_of, topology_tag=GRID, positions=positions)


def rgg_squares_per_side(n, c):
    """
    ``m = floor(sqrt(n / (c log n)))`` for a random geometric graph.

    Parameters
    ----------
    n : int
    c : float

    Returns
    -------
    int
    """
    if n < 2 or c <= 0:
        raise InvalidArgumentError('rgg needs n >= 2 and c > 0, got n={0}, c={1}'.format(n, c))

    return int(math.floor(math.sqrt(n / (c * math.log(n)))))


def build_rgg(n, c, rng, retry_cap=DEFAULT_RETRY_CAP):
    """
    Regular random geometric graph in the unit square.

    Parameters
    ----------
    n : int
        Number of nodes.
    c : float
        Square side constant: side length is ``sqrt(c log n / n)``.
    rng : tpcpy.c_channel.c_awgn.RandomStream
        Stream the positions are drawn from.
    retry_cap : int
        Number of draws before giving up on an occupied partition.

    Returns
    -------
    Graph

    Raises
    ------
    InvalidArgumentError
        If ``m < 2``.
    RegularityError
        If every draw left a square empty; a larger ``c`` helps.
    """
    n = _as_int(n, 'n')
    c = float(c)
    retry_cap = _as_int(retry_cap, 'retry_cap')

    m = rgg_squares_per_side(n, c)
    if m < 2:
        gs.fatal('rgg with n={0}, c={1} gives m={2}; need m >= 2'.format(n, c, m), InvalidArgumentError, _NAME)
    if retry_cap < 1:
        gs.fatal('retry_cap must be >= 1, got {0}'.format(retry_cap), InvalidArgumentError, _NAME)

    side = math.sqrt(c * math.log(n) / n)

    for attempt in range(1, retry_cap + 1):
        positions = rng.uniform((n, 2))
        cells = np.minimum(np.floor(positions / side).astype(int), m - 1)
        counts = np.zeros((m, m), dtype=int)
        np.add.at(counts, (cells[:, 0], cells[:, 1]), 1)

        if counts.min() > 0:
            gs.debug('rgg n={0} c={1}: regular after {2} draw(s)'.format(n, c, attempt), 1, _NAME)
            break

        gs.verbose('rgg n={0} c={1}: {2} empty square(s) on draw {3}, redrawing'.format(
            n, c, int((counts == 0).sum()), attempt), _NAME)
    else:
        gs.fatal('rgg n={0} c={1}: some square stayed empty after {2} draws, raise c'.format(n, c, retry_cap),
                 RegularityError, _NAME)

    square_of = tuple(SquareIndex(int(x) + 1, int(y) + 1) for x, y in cells)
    members = {}
    for node, square in enumerate(square_of):
        members.setdefault(square, []).append(node)

    edges = set()
    for (i, j), nodes in members.items():
        nodes = np.array(nodes)
        for a in range(len(nodes)):
            for b in range(a + 1, len(nodes)):
                edges.add(_ordered(nodes[a], nodes[b]))

        for other in ((i + 1, j), (i, j + 1)):
            if other in members:
                for u in nodes:
                    for v in members[other]:
                        edges.add(_ordered(u, v))

    return Graph(n=n, edges=frozenset(edges), m=m, square_of=square_of, topology_tag=RGG, positions=positions)


# ----------------------------------------------------------------------------------------------------------------------
# Queries
# ----------------------------------------------------------------------------------------------------------------------
def neighbors(g, u):
    return g.adjacency[u]


def is_connected(g):
    count, _ = connected_components(g.csgraph(), directed=False)

    return count == 1


def diameter(g):
    """
    Exact hop diameter from breadth-first search out of every node.

    Parameters
    ----------
    g : Graph

    Returns
    -------
    int

    Raises
    ------
    DisconnectedGraphError
    """
    return int(max(row.max() for row in _distance_rows(g)))


def spread_function(g, t):
    """
    Smallest t-hop neighbourhood over all nodes.

    The neighbourhood of a node includes the node itself, so ``spread_function(g, 0) == 1``.

    Parameters
    ----------
    g : Graph
    t : int
        Hop radius, ``t >= 0``.

    Returns
    -------
    int
    """
    t = _as_int(t, 't')
    if t < 0:
        gs.fatal('t must be >= 0, got {0}'.format(t), InvalidArgumentError, _NAME)

    return int(min((row <= t).sum() for row in _distance_rows(g)))


def spread_inverse(g, s):
    """
    Smallest radius ``t`` whose spread reaches ``s`` nodes.

    ``spread_inverse(g, g.n)`` equals the diameter: no node can have heard from every node before.

    Parameters
    ----------
    g : Graph
    s : int
        Target neighbourhood size, ``1 <= s <= n``.

    Returns
    -------
    int
    """
    s = _as_int(s, 's')
    if not 1 <= s <= g.n:
        gs.fatal('s must be in [1, {0}], got {1}'.format(g.n, s), InvalidArgumentError, _NAME)

    return int(max(np.partition(row, s - 1)[s - 1] for row in _distance_rows(g)))


def square_occupancy(g):
    """
    Minimum and maximum number of nodes per square.

    Returns
    -------
    tuple of int
    """
    table = g.occupancy()

    return int(table.min()), int(table.max())


# ----------------------------------------------------------------------------------------------------------------------
# Edge list files
# ----------------------------------------------------------------------------------------------------------------------
def save_edge_list(g, path, header=None):
    """
    Write a graph as plain text.

    The header ``n m topology_tag`` is followed by one ``u v`` line per edge and one
    ``node x y square_i square_j`` record per node; missing coordinates are written as ``nan``.

    Parameters
    ----------
    g : Graph
    path : str or path-like
    header : list of str, optional
        Comment lines written first, each prefixed with ``#``.

    Returns
    -------
    path : str or path-like
    """
    lines = ['# {0}'.format(line) for line in header or ()]
    lines.append('{0} {1} {2}'.format(g.n, g.m, g.topology_tag))
    lines.extend('{0} {1}'.format(u, v) for u, v in sorted(g.edges))

    for node, square in enumerate(g.square_of):
        if g.positions is None:
            x = y = float('nan')
        else:
            x, y = g.positions[node]
        lines.append('{0} {1!r} {2!r} {3} {4}'.format(node, float(x), float(y), square.i, square.j))

    with open(path, 'w') as fp:
        fp.write('\n'.join(lines) + '\n')

    gs.verbose('Graph written to <{0}>'.format(path), _NAME)

    return path


def load_edge_list(path):
    """
    Read a graph written by :func:`save_edge_list`; comment lines are skipped and every construction
    invariant is checked again.

    Returns
    -------
    Graph

    Raises
    ------
    InvalidArgumentError
        Malformed header or records.
    """
    with open(path) as fp:
        rows = [line.split() for line in fp if line.strip() and not line.startswith('#')]

    if not rows or len(rows[0]) != 3:
        gs.fatal('<{0}> lacks the "n m topology_tag" header'.format(path), InvalidArgumentError, _NAME)

    try:
        n, m, tag = int(rows[0][0]), int(rows[0][1]), rows[0][2]
    except ValueError:
        gs.fatal('Header of <{0}> has a non-integer size: {1}'.format(path, ' '.join(rows[0])),
                 InvalidArgumentError, _NAME)

    if tag not in TOPOLOGIES:
        gs.fatal('Unknown topology <{0}> in <{1}>'.format(tag, path), InvalidArgumentError, _NAME)
    if n < 1:
        gs.fatal('<{0}> declares {1} nodes'.format(path, n), InvalidArgumentError, _NAME)

    edges = set()
    squares = [None] * n
    positions = np.full((n, 2), np.nan)

    for number, row in enumerate(rows[1:], start=2):
        if len(row) not in (2, 5):
            gs.fatal('Line {0} of <{1}> is neither an edge nor a node record'.format(number, path),
                     InvalidArgumentError, _NAME)

        try:
            if len(row) == 2:
                edges.add(_ordered(int(row[0]), int(row[1])))
                continue

            node = int(row[0])
            if not 0 <= node < n:
                raise IndexError(node)
            positions[node] = float(row[1]), float(row[2])
            squares[node] = SquareIndex(int(row[3]), int(row[4]))
        except (ValueError, IndexError):
            gs.fatal('Line {0} of <{1}> is malformed: {2}'.format(number, path, ' '.join(row)),
                     InvalidArgumentError, _NAME)

    if any(s is None for s in squares):
        gs.fatal('<{0}> lacks node records for some nodes'.format(path), InvalidArgumentError, _NAME)

    if np.isnan(positions).all():
        positions = None

    return Graph(n=n, edges=frozenset(edges), m=m, square_of=tuple(squares), topology_tag=tag, positions=positions)


# ----------------------------------------------------------------------------------------------------------------------
# Private Functions
# ----------------------------------------------------------------------------------------------------------------------
def _ordered(u, v):
    u, v = int(u), int(v)

    return (u, v) if u < v else (v, u)


def _as_int(value, name):
    try:
        integral = not isinstance(value, bool) and int(value) == value
    except (TypeError, ValueError, OverflowError):
        integral = False

    if not integral:
        raise InvalidArgumentError('{0} must be an integer, got {1!r}'.format(name, value))

    return int(value)


def _distance_rows(g):
    """Yield the hop distance row of every node; raise on unreachable pairs."""
    if 'distances' in g._cache:
        for row in g._cache['distances']:
            yield row
        return

    keep = g.n <= 3000
    rows = []
    adjacency = g.csgraph()

    for start in range(0, g.n, _CHUNK):
        block = shortest_path(adjacency, method='D', directed=False, unweighted=True,
                              indices=np.arange(start, min(start + _CHUNK, g.n)))
        if np.isinf(block).any():
            gs.fatal('Graph {0} is disconnected'.format(g), DisconnectedGraphError, _NAME)

        block = block.astype(int)
        for row in block:
            if keep:
                rows.append(row)
            yield row

    if keep:
        g._cache['distances'] = rows


def _check_invariants(g):
    if g.topology_tag not in TOPOLOGIES:
        raise InvalidArgumentError('Unknown topology <{0}>'.format(g.topology_tag))
    if g.n < 1 or len(g.square_of) != g.n:
        raise InvalidArgumentError('square_of must list a square for each of the {0} nodes'.format(g.n))

    for u, v in g.edges:
        if u == v:
            raise InvalidArgumentError('Self edge at node {0}'.format(u))
        if not (0 <= u < v < g.n):
            raise InvalidArgumentError('Edge ({0}, {1}) is not a normalized pair of known nodes'.format(u, v))

    listed = sorted(node for nodes in g.nodes_in_square.values() for node in nodes)
    if listed != list(range(g.n)):
        raise InvalidArgumentError('The square lists do not partition the nodes')

    if g.topology_tag == CYCLE:
        if g.m != g.n or any(len(a) != 2 for a in g.adjacency) or len(g.edges) != g.n:
            raise InvalidArgumentError('A cycle has m = n and degree 2 at every node')
        if any(s != (1, k + 1) for k, s in enumerate(g.square_of)):
            raise InvalidArgumentError('Cycle node k lives in square (1, k + 1)')
        if not is_connected(g):
            raise InvalidArgumentError('A cycle is a single ring')
        return

    for s in g.square_of:
        if not (1 <= s.i <= g.m and 1 <= s.j <= g.m):
            raise InvalidArgumentError('Square {0} outside the {1} x {1} partition'.format(tuple(s), g.m))

    if len(g.nodes_in_square) != g.m * g.m:
        raise InvalidArgumentError('Every square must hold at least one node')

    for u, v in g.edges:
        su, sv = g.square_of[u], g.square_of[v]
        if abs(su.i - sv.i) + abs(su.j - sv.j) > 1:
            raise InvalidArgumentError('Edge ({0}, {1}) joins squares that are not adjacent'.format(u, v))

    if g.topology_tag == GRID:
        if g.n != g.m * g.m or len(g.edges) != 2 * g.m * (g.m - 1):
            raise InvalidArgumentError('A grid has one node per square and 2m(m - 1) edges')
        return

    # rgg: same and edge-adjacent squares are completely joined
    sizes = {k: len(v) for k, v in g.nodes_in_square.items()}
    expected = sum(s * (s - 1) // 2 for s in sizes.values())
    for (i, j), size in sizes.items():
        expected += size * (sizes.get((i + 1, j), 0) + sizes.get((i, j + 1), 0))

    if len(g.edges) != expected:
        raise InvalidArgumentError('Nodes of identical or adjacent squares must all be joined')
