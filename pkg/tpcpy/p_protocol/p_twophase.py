#!/usr/bin/env python

############################################################################
#
# MODULE:       p.twophase
# AUTHOR(S):    tpcpy developers
# PURPOSE:      Two-phase distributed averaging over noisy links.
#
# COPYRIGHT:    (C) tpcpy developers
#
#               This program is free software under the GNU General
#               Public License (>=v2).
#
#############################################################################
"""
Every outer iteration runs one inner phase of message passing and one stochastic-approximation update.

Inner phase:
    1. The node of square (1, 1) picks a direction: horizontal (rows) or vertical (columns).
    2. A token travels up the first column (or along the first row) and elects one head per row
       (or column).
    3. Each head builds a route with one uniformly chosen node per square of its row, the route nodes
       relay a running sum to the last node, and the last node sends the noisy average back.

Outer update:
    Every route node blends its value with the received average,
    ``theta <- (1 - eps) theta + eps gamma`` with ``eps = 1 / (lambda2_hint (tau + 1 / delta))``.

Random draws happen in a fixed order per inner phase: direction, token, routes, then per route the
forward and the backward transmissions. Squares holding a single node need no draw. The forward relay
of a route with m nodes draws m channel variates for its ``m - 1`` messages: the head's value enters
the running sum through one noisy stage of its own.
"""
import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from tpcpy import messages as gs
from tpcpy.c_channel.c_awgn import PATH_DOMAIN, NoiseModel, RandomStream, transmit_many
from tpcpy.exceptions import InvalidArgumentError, ProtocolPreconditionError
from tpcpy.g_graph.g_topology import CYCLE, is_connected
from tpcpy.m_metrics.m_trace import RunTrace

__all__ = ['HORIZONTAL', 'VERTICAL', 'EXPLICIT', 'AGGREGATE', 'DISSEMINATION_MODES', 'Route',
           'InnerRoundOutcome', 'ProtocolConfig', 'OuterState', 'normalize_mode', 'choose_direction',
           'elect_heads', 'establish_route', 'sample_routes', 'forward_average', 'disseminate',
           'backward_messages', 'run_inner_phase', 'inner_rounds', 'step_size', 'initial_state', 'outer_update',
           'record_taus', 'run', 'run_paths']

HORIZONTAL = -1
VERTICAL = 1

EXPLICIT = 'explicit-messages'
AGGREGATE = 'aggregate-noise'
DISSEMINATION_MODES = (EXPLICIT, AGGREGATE)

_MODE_ALIASES = {EXPLICIT: EXPLICIT, AGGREGATE: AGGREGATE, 'explicit': EXPLICIT, 'aggregate': AGGREGATE}

# Recording policy without an explicit stride: every iteration up to here, then every tenth.
DENSE_RECORD_LIMIT = 100
SPARSE_RECORD_STRIDE = 10

_NAME = 'p_protocol'


def normalize_mode(mode):
    try:
        return _MODE_ALIASES[mode]
    except KeyError:
        raise InvalidArgumentError('Unknown dissemination mode <{0}>, choose one of {1}'.format(
            mode, ', '.join(DISSEMINATION_MODES)))


# ----------------------------------------------------------------------------------------------------------------------
# Types
# ----------------------------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class Route(object):
    """
    Ordered route ``s_1 -> s_2 -> ... -> s_m`` with one node per square of a row or column.
    """
    nodes: tuple

    def __post_init__(self):
        object.__setattr__(self, 'nodes', tuple(int(u) for u in self.nodes))

    def __len__(self):
        return len(self.nodes)

    def validate(self, g, zeta=None):
        """
        Check the route against a graph.

        Parameters
        ----------
        g : tpcpy.g_graph.g_topology.Graph
        zeta : {-1, 1}, optional
            Direction; inferred from the first two squares if omitted.

        Raises
        ------
        InvalidArgumentError
            If a square is missing or repeated, or consecutive nodes are not neighbours.
        """
        nodes = self.nodes

        if g.topology_tag == CYCLE:
            start = nodes[0] if nodes else 0
            if list(nodes) != [(start + k) % g.n for k in range(g.n)]:
                raise InvalidArgumentError('A cycle route walks the whole ring in order')
            return

        if len(nodes) != g.m:
            raise InvalidArgumentError('A route has {0} nodes, got {1}'.format(g.m, len(nodes)))

        for u, v in zip(nodes[:-1], nodes[1:]):
            if v not in g.adjacency[u]:
                raise InvalidArgumentError('Route nodes {0} and {1} are not neighbours'.format(u, v))

        squares = [g.square_of[u] for u in nodes]
        if zeta is None:
            zeta = HORIZONTAL if squares[0].j == squares[1].j else VERTICAL

        if zeta == HORIZONTAL:
            expected = [(k, squares[0].j) for k in range(1, g.m + 1)]
        else:
            expected = [(squares[0].i, k) for k in range(1, g.m + 1)]

        if [tuple(s) for s in squares] != expected:
            raise InvalidArgumentError('Route squares {0} do not walk one row or column in order'.format(
                [tuple(s) for s in squares]))


@dataclass(frozen=True, eq=False)
class InnerRoundOutcome(object):
    """
    Result of one inner phase.

    Attributes
    ----------
    zeta : {-1, 1}
    routes : tuple of Route
        Pairwise node-disjoint routes.
    path_estimates : dict
        Node -> noisy copy ``gamma`` of its route average, exactly for the route nodes.
    messages_used : int
        Link transmissions of the phase, token included.
    inner_rounds : int
        Message-passing rounds ``M`` of the phase.
    etas : tuple of float
        Noisy route averages at the last route node.
    n : int
        Number of nodes of the graph.
    """
    zeta: int
    routes: tuple
    path_estimates: dict
    messages_used: int
    inner_rounds: int
    etas: tuple = ()
    n: int = None

    def __post_init__(self):
        seen = set()
        for route in self.routes:
            if seen.intersection(route.nodes):
                raise InvalidArgumentError('Routes of one inner phase must be node disjoint')
            seen.update(route.nodes)

        if seen != set(self.path_estimates):
            raise InvalidArgumentError('Estimates must exist exactly for the route nodes')

    def participants(self):
        """Route nodes and their estimates as two aligned arrays."""
        nodes = np.fromiter(self.path_estimates.keys(), dtype=np.intp, count=len(self.path_estimates))
        values = np.fromiter(self.path_estimates.values(), dtype=float, count=len(self.path_estimates))

        return nodes, values


@dataclass(frozen=True)
class ProtocolConfig(object):
    """
    Experimenter-facing knobs of one protocol run.

    Parameters
    ----------
    delta : float
        Tolerance, ``0 < delta < 1/2``.
    sigma2 : float
        Channel noise variance.
    max_outer : int
        Number of outer iterations.
    dissemination_mode : {'explicit-messages', 'aggregate-noise'}
        How the route average travels back; ``explicit`` and ``aggregate`` are accepted too.
    lambda2_hint : float
        Spectral gap estimate of the step-size schedule.
    record_every : int, optional
        Snapshot stride; default records densely first and sparsely later (see :func:`record_taus`).
    keep_theta : bool
        Keep the full theta vector of every snapshot.
    edge_sigma2 : dict, optional
        Per-link noise variances.
    """
    delta: float = 0.1
    sigma2: float = 1.0
    max_outer: int = 1000
    dissemination_mode: str = AGGREGATE
    lambda2_hint: float = 1.0
    record_every: int = None
    keep_theta: bool = False
    edge_sigma2: dict = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'dissemination_mode', normalize_mode(self.dissemination_mode))
        _check_delta(self.delta)

        if int(self.max_outer) != self.max_outer or self.max_outer < 1:
            raise InvalidArgumentError('max_outer must be an integer >= 1, got {0}'.format(self.max_outer))
        if not self.lambda2_hint > 0:
            raise InvalidArgumentError('lambda2_hint must be > 0, got {0}'.format(self.lambda2_hint))
        if self.record_every is not None and (int(self.record_every) != self.record_every or self.record_every < 1):
            raise InvalidArgumentError('record_every must be an integer >= 1, got {0}'.format(self.record_every))

        object.__setattr__(self, 'max_outer', int(self.max_outer))

    @property
    def noise(self):
        return NoiseModel(sigma2=float(self.sigma2), edge_sigma2=self.edge_sigma2)

    def to_dict(self):
        return {'delta': self.delta, 'sigma2': self.sigma2, 'max_outer': self.max_outer,
                'dissemination_mode': self.dissemination_mode, 'lambda2_hint': self.lambda2_hint,
                'record_every': self.record_every}


@dataclass(frozen=True, eq=False)
class OuterState(object):
    """
    Node estimates after ``tau`` outer iterations.

    ``theta`` is stored as a read-only copy.
    """
    tau: int
    theta: np.ndarray
    delta: float = 0.1
    lambda2_hint: float = 1.0

    def __post_init__(self):
        if int(self.tau) != self.tau or self.tau < 0:
            raise InvalidArgumentError('tau must be an integer >= 0, got {0}'.format(self.tau))
        _check_delta(self.delta)
        if not self.lambda2_hint > 0:
            raise InvalidArgumentError('lambda2_hint must be > 0, got {0}'.format(self.lambda2_hint))

        theta = np.array(self.theta, dtype=float)
        if theta.ndim != 1:
            raise InvalidArgumentError('theta must be a vector')
        theta.setflags(write=False)

        object.__setattr__(self, 'theta', theta)
        object.__setattr__(self, 'tau', int(self.tau))


# ----------------------------------------------------------------------------------------------------------------------
# Inner phase
# ----------------------------------------------------------------------------------------------------------------------
def choose_direction(rng, g=None):
    """
    Horizontal (-1) or vertical (+1) with probability 1/2 each.

    A cycle has a single direction: it returns -1 without consuming a draw.

    Parameters
    ----------
    rng : tpcpy.c_channel.c_awgn.RandomStream
    g : Graph, optional

    Returns
    -------
    int
    """
    if g is not None and g.topology_tag == CYCLE:
        return HORIZONTAL

    return HORIZONTAL if rng.integers(2) == 0 else VERTICAL


def elect_heads(g, zeta, rng):
    """
    Elect one head per row (``zeta = -1``) or per column (``zeta = +1``) by passing a token.

    A uniformly chosen node of square (1, 1) holds the token first; every holder hands it to a
    uniformly chosen node of the next square along the first column (or row). The token carries no
    analog value and is not perturbed.

    Parameters
    ----------
    g : Graph
    zeta : {-1, 1}
    rng : RandomStream

    Returns
    -------
    list of int
        Heads, ordered from square (1, 1) outwards. A cycle has the single head 0.

    Raises
    ------
    ProtocolPreconditionError
        If a square is empty.
    """
    _check_direction(zeta)

    if g.topology_tag == CYCLE:
        return [0]

    if g.occupancy().min() < 1:
        gs.fatal('Graph {0} has an empty square'.format(g), ProtocolPreconditionError, _NAME)

    heads = []
    for k in range(1, g.m + 1):
        square = (1, k) if zeta == HORIZONTAL else (k, 1)
        heads.append(_pick(g.square_nodes(*square), rng))

    return heads


def establish_route(g, head, zeta, rng):
    """
    Route from a head through one uniformly chosen node of every further square of its row or column.

    Parameters
    ----------
    g : Graph
    head : int
        Node in the first column (``zeta = -1``) or first row (``zeta = +1``).
    zeta : {-1, 1}
    rng : RandomStream

    Returns
    -------
    Route
        For a cycle, the whole ring in order starting at ``head``.

    Examples
    --------
    >>> from tpcpy.g_graph.g_topology import build_cycle
    >>> establish_route(build_cycle(5), 0, -1, RandomStream(1)).nodes
    (0, 1, 2, 3, 4)
    """
    _check_direction(zeta)
    head = int(head)

    if g.topology_tag == CYCLE:
        return Route(tuple((head + k) % g.n for k in range(g.n)))

    square = g.square_of[head]
    if zeta == HORIZONTAL and square.i != 1 or zeta == VERTICAL and square.j != 1:
        raise InvalidArgumentError('Head {0} in square {1} does not start a route in direction {2}'.format(
            head, tuple(square), zeta))

    nodes = [head]
    for k in range(2, g.m + 1):
        nxt = (k, square.j) if zeta == HORIZONTAL else (square.i, k)
        nodes.append(_pick(g.square_nodes(*nxt), rng))

    return Route(tuple(nodes))


def sample_routes(g, rng):
    """
    Direction, head election and routes of one inner phase, without any value transmission.

    Returns
    -------
    zeta : int
    routes : list of Route
    """
    zeta = choose_direction(rng, g)
    heads = elect_heads(g, zeta, rng)

    return zeta, [establish_route(g, head, zeta, rng) for head in heads]


def forward_average(route, theta, noise, rng):
    """
    Relay a running sum from the first to the last route node.

    Node ``s_1`` sends its value, every following node adds its own value to what it received and
    passes the sum on. Every one of the m contributions crosses the channel once: the head's value
    enters the relay through a noisy stage on its outgoing link, and each of the ``m - 1`` hops
    perturbs the running sum. The received sum therefore carries noise of variance ``m sigma2``.

    Parameters
    ----------
    route : Route
    theta : numpy.ndarray
        Current estimates of all nodes.
    noise : NoiseModel
    rng : RandomStream

    Returns
    -------
    eta : float
        Received sum divided by the route length: the route mean plus ``N(0, sigma2 / m)`` noise.
    messages : int
        ``m - 1``; the head's stage is not a link transmission.
    """
    nodes = np.asarray(route.nodes, dtype=np.intp)
    m = nodes.size
    values = np.asarray(theta, dtype=float)[nodes]

    if m == 1:
        return float(values[0]), 0

    if noise.is_uniform:
        stages = None
    else:
        hops = noise.hop_variances(route.nodes)
        # the head's stage uses its outgoing link
        stages = np.concatenate(([hops[0]], hops))
    z = transmit_many(np.zeros(m), noise, rng, variances=stages)

    relay = np.cumsum(values) + np.cumsum(z)

    return float(relay[-1] / m), m - 1


def disseminate(route, eta, noise, rng, mode=AGGREGATE):
    """
    Spread the noisy route average back from ``s_m`` to every route node.

    Node ``s_i`` ends up with ``eta`` plus noise of variance ``(m - i) sigma2 / m``, so its total error
    to the route mean has variance ``(1 - (i - 1) / m) sigma2``. ``s_m`` keeps ``eta`` itself.

    Parameters
    ----------
    route : Route
    eta : float
        Noisy average computed at ``s_m``.
    noise : NoiseModel
    rng : RandomStream
    mode : {'explicit-messages', 'aggregate-noise'}
        ``explicit-messages`` relays m copies hop by hop and lets every node average the copies it
        receives; ``aggregate-noise`` draws each node's relay noise once with the same marginal
        variance.

    Returns
    -------
    dict
        Node -> estimate ``gamma``.

    Raises
    ------
    InvalidArgumentError
        Unknown mode.
    """
    mode = normalize_mode(mode)
    nodes = route.nodes
    m = len(nodes)
    eta = float(eta)

    if m == 1:
        return {nodes[0]: eta}

    # variances of the hops s_k -> s_k+1; the way back runs through them in reverse
    hops = noise.hop_variances(nodes) if noise.enabled else np.zeros(m - 1)

    if mode == EXPLICIT:
        back = hops[::-1]
        copies = transmit_many(np.zeros((m - 1, m)), noise, rng, variances=back[:, np.newaxis])
        received = np.cumsum(copies, axis=0).mean(axis=1)
        # row h holds what arrives after h + 1 hops, i.e. at s_(m - h - 1)
        gammas = eta + received[::-1]
    else:
        extra = np.cumsum(hops[::-1])[::-1] / m
        gammas = transmit_many(np.full(m - 1, eta), noise, rng, variances=extra)

    estimates = {u: float(gamma) for u, gamma in zip(nodes[:-1], gammas)}
    estimates[nodes[-1]] = eta

    return estimates


def backward_messages(m, mode):
    """Transmissions of one dissemination over a route of ``m`` nodes."""
    mode = normalize_mode(mode)
    if m <= 1:
        return 0

    return m * (m - 1) if mode == EXPLICIT else m - 1


def inner_rounds(g):
    """
    Message-passing rounds of one inner phase.

    Token, forward relay and the two-way dissemination take ``(m - 1) + (m - 1) + (2m - 2)`` rounds
    with all routes pipelined; the cycle skips the token and uses its single ring route.

    Examples
    --------
    >>> from tpcpy.g_graph.g_topology import build_grid
    >>> inner_rounds(build_grid(3))
    8
    """
    if g.topology_tag == CYCLE:
        return 3 * g.n - 3

    return 4 * g.m - 4


def run_inner_phase(g, theta, noise, rng, mode=AGGREGATE):
    """
    One complete inner phase.

    Parameters
    ----------
    g : Graph
    theta : numpy.ndarray
    noise : NoiseModel
    rng : RandomStream
    mode : {'explicit-messages', 'aggregate-noise'}

    Returns
    -------
    InnerRoundOutcome
    """
    mode = normalize_mode(mode)
    theta = np.asarray(theta, dtype=float)

    if theta.shape != (g.n,):
        raise InvalidArgumentError('theta has {0} entries, the graph {1} nodes'.format(theta.size, g.n))

    zeta, routes = sample_routes(g, rng)
    messages = 0 if g.topology_tag == CYCLE else g.m - 1

    estimates = {}
    etas = []
    for route in routes:
        eta, forward = forward_average(route, theta, noise, rng)
        estimates.update(disseminate(route, eta, noise, rng, mode))
        etas.append(eta)
        messages += forward + backward_messages(len(route), mode)

    gs.debug('inner phase zeta={0}: {1} routes, {2} transmissions'.format(zeta, len(routes), messages), 3, _NAME)

    return InnerRoundOutcome(zeta=zeta, routes=tuple(routes), path_estimates=estimates, messages_used=messages,
                             inner_rounds=inner_rounds(g), etas=tuple(etas), n=g.n)


# ----------------------------------------------------------------------------------------------------------------------
# Outer update
# ----------------------------------------------------------------------------------------------------------------------
def step_size(tau, delta, lambda2_hint=1.0):
    """
    ``1 / (lambda2_hint (tau + 1 / delta))``.

    Examples
    --------
    >>> step_size(0, 0.1, 1.0)
    0.1
    >>> step_size(0, 0.1, 0.5)
    0.2
    """
    if int(tau) != tau or tau < 0:
        raise InvalidArgumentError('tau must be an integer >= 0, got {0}'.format(tau))
    _check_delta(delta)
    if not lambda2_hint > 0:
        raise InvalidArgumentError('lambda2_hint must be > 0, got {0}'.format(lambda2_hint))

    return 1.0 / (lambda2_hint * (tau + 1.0 / delta))


def initial_state(theta0, delta=0.1, lambda2_hint=1.0):
    return OuterState(tau=0, theta=theta0, delta=delta, lambda2_hint=lambda2_hint)


def outer_update(state, outcome, epsilon=None):
    """
    Blend the estimates of route nodes with their received averages.

    Parameters
    ----------
    state : OuterState
    outcome : InnerRoundOutcome
        Inner phase computed from ``state.theta``.
    epsilon : float, optional
        Step size override; default is :func:`step_size` of the state.

    Returns
    -------
    OuterState
        Same delta and hint, ``tau + 1``. Nodes outside every route keep their value.
    """
    if outcome.n is not None and outcome.n != state.theta.size:
        raise InvalidArgumentError('Outcome for {0} nodes cannot update {1} estimates'.format(
            outcome.n, state.theta.size))

    nodes, gammas = outcome.participants()
    if nodes.size and nodes.max() >= state.theta.size:
        raise InvalidArgumentError('Outcome names node {0} beyond the {1} estimates'.format(
            int(nodes.max()), state.theta.size))

    eps = step_size(state.tau, state.delta, state.lambda2_hint) if epsilon is None else float(epsilon)

    theta = state.theta.copy()
    theta[nodes] = (1.0 - eps) * theta[nodes] + eps * gammas

    return OuterState(tau=state.tau + 1, theta=theta, delta=state.delta, lambda2_hint=state.lambda2_hint)


# ----------------------------------------------------------------------------------------------------------------------
# Runs
# ----------------------------------------------------------------------------------------------------------------------
def record_taus(max_outer, record_every=None):
    """
    Outer iterations at which a run takes a snapshot.

    With ``record_every`` the grid is ``0, k, 2k, ...``; otherwise every iteration up to 100 and every
    tenth after that. ``0`` and ``max_outer`` are always included.

    Returns
    -------
    numpy.ndarray
    """
    if record_every is None:
        dense = np.arange(0, min(DENSE_RECORD_LIMIT, max_outer) + 1)
        sparse = np.arange(DENSE_RECORD_LIMIT + SPARSE_RECORD_STRIDE, max_outer + 1, SPARSE_RECORD_STRIDE)
        taus = np.concatenate([dense, sparse, [max_outer]])
    else:
        taus = np.concatenate([np.arange(0, max_outer + 1, int(record_every)), [max_outer]])

    return np.unique(taus.astype(int))


def run(g, theta0, config, rng, sample_path_id=None):
    """
    Run the protocol for ``config.max_outer`` outer iterations.

    Parameters
    ----------
    g : Graph
        Connected graph with every square occupied.
    theta0 : array_like
        Initial values.
    config : ProtocolConfig
    rng : RandomStream
        Stream owned by this sample path.
    sample_path_id : int, optional
        Default is the stream id of ``rng``.

    Returns
    -------
    tpcpy.m_metrics.m_trace.RunTrace

    Raises
    ------
    ProtocolPreconditionError
        Disconnected graph or empty square.
    """
    theta0 = np.asarray(theta0, dtype=float)
    if theta0.shape != (g.n,):
        raise InvalidArgumentError('theta0 has {0} entries, the graph {1} nodes'.format(theta0.size, g.n))
    if not is_connected(g):
        gs.fatal('Graph {0} is disconnected'.format(g), ProtocolPreconditionError, _NAME)
    if g.topology_tag != CYCLE and g.occupancy().min() < 1:
        gs.fatal('Graph {0} has an empty square'.format(g), ProtocolPreconditionError, _NAME)

    noise = config.noise
    taus = record_taus(config.max_outer, config.record_every)
    recorded = set(taus.tolist())
    theta_bar = float(theta0.mean())

    columns = {'transmissions': [], 'means': [], 'sq_dev_initial': [], 'sq_dev_current': [], 'ranges': []}
    thetas = [] if config.keep_theta else None

    state = initial_state(theta0, config.delta, config.lambda2_hint)
    transmissions = 0

    for tau in range(config.max_outer + 1):
        if tau in recorded:
            theta = state.theta
            mean = float(theta.mean())
            columns['transmissions'].append(transmissions)
            columns['means'].append(mean)
            columns['sq_dev_initial'].append(float(np.sum((theta - theta_bar) ** 2)))
            columns['sq_dev_current'].append(float(np.sum((theta - mean) ** 2)))
            columns['ranges'].append(float(theta.max() - theta.min()))
            if thetas is not None:
                thetas.append(theta.copy())

        if tau == config.max_outer:
            break

        outcome = run_inner_phase(g, state.theta, noise, rng, config.dissemination_mode)
        state = outer_update(state, outcome)
        transmissions += outcome.messages_used

    path_id = rng.stream_id if sample_path_id is None else int(sample_path_id)
    gs.verbose('sample path {0} finished after {1} outer iterations'.format(path_id, config.max_outer), _NAME)

    return RunTrace(sample_path_id=path_id, n=g.n, theta_bar=theta_bar, inner_rounds=inner_rounds(g), taus=taus,
                    thetas=None if thetas is None else np.vstack(thetas), config=config.to_dict(), **columns)


def run_paths(g, theta0, config, seed, paths, workers=1, domain=PATH_DOMAIN, first=0):
    """
    Independent sample paths of one configuration, optionally on a process pool.

    Sample path ``p`` always uses ``RandomStream(seed, p, domain)``, so the traces do not depend on the
    number of workers.

    Parameters
    ----------
    g : Graph
    theta0 : array_like
    config : ProtocolConfig
    seed : int
    paths : int
        Number of sample paths.
    workers : int
        Processes; 1 runs in this process.
    domain : int or tuple of int
        Stream domain of the sample paths.
    first : int
        Id of the first sample path.

    Returns
    -------
    list of RunTrace
        Ordered by sample path id.
    """
    paths, workers = int(paths), int(workers)
    if paths < 1:
        raise InvalidArgumentError('paths must be >= 1, got {0}'.format(paths))
    if workers < 1:
        raise InvalidArgumentError('workers must be >= 1, got {0}'.format(workers))

    ids = list(range(first, first + paths))

    if workers == 1 or paths == 1:
        return [run(g, theta0, config, RandomStream(seed, p, domain)) for p in ids]

    gs.verbose('running {0} sample paths on {1} workers'.format(paths, workers), _NAME)
    with multiprocessing.Pool(processes=min(workers, paths), initializer=_init_worker,
                              initargs=(g, np.asarray(theta0, dtype=float), config, seed, domain)) as pool:
        return pool.map(_run_worker_path, ids)


# ----------------------------------------------------------------------------------------------------------------------
# Private Functions
# ----------------------------------------------------------------------------------------------------------------------
_WORKER = {}


def _init_worker(g, theta0, config, seed, domain):
    _WORKER.update(g=g, theta0=theta0, config=config, seed=seed, domain=domain)


def _run_worker_path(path_id):
    return run(_WORKER['g'], _WORKER['theta0'], _WORKER['config'],
               RandomStream(_WORKER['seed'], path_id, _WORKER['domain']))


def _pick(nodes, rng):
    if len(nodes) == 1:
        return int(nodes[0])

    return int(nodes[rng.integers(len(nodes))])


def _check_direction(zeta):
    if zeta not in (HORIZONTAL, VERTICAL):
        raise InvalidArgumentError('zeta must be -1 or +1, got {0}'.format(zeta))


def _check_delta(delta):
    if not 0 < delta < 0.5:
        raise InvalidArgumentError('delta must be in (0, 1/2), got {0}'.format(delta))
