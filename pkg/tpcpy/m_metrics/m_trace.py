#!/usr/bin/env python

############################################################################
#
# MODULE:       m.trace
# AUTHOR(S):    tpcpy developers
# PURPOSE:      Per sample path run traces and their CSV output.
#
# COPYRIGHT:    (C) tpcpy developers
#
#               This program is free software under the GNU General
#               Public License (>=v2).
#
#############################################################################
"""
Per sample path record of a protocol run.
"""
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from tpcpy.exceptions import InvalidArgumentError

__all__ = ['RunTrace', 'TRACE_COLUMNS', 'traces_to_frame', 'write_trace_csv', 'write_theta_snapshots',
           'write_commented_csv']

TRACE_COLUMNS = ['sample_path_id', 'tau', 'transmissions_total', 'mse_to_initial_mean', 'consensus_gap',
                 'theta_mean']


@dataclass(frozen=True, eq=False)
class RunTrace(object):
    """
    Snapshots of one sample path at the recorded outer iterations.

    Parameters
    ----------
    sample_path_id : int
    n : int
        Number of nodes.
    theta_bar : float
        Mean of the initial values.
    inner_rounds : int
        Message-passing rounds ``M`` per outer iteration.
    taus : numpy.ndarray
        Recorded outer iterations, strictly increasing.
    transmissions : numpy.ndarray
        Cumulative link transmissions at every recorded iteration.
    means : numpy.ndarray
        ``mean(theta(tau))``.
    sq_dev_initial : numpy.ndarray
        ``||theta(tau) - theta_bar 1||^2``.
    sq_dev_current : numpy.ndarray
        ``||theta(tau) - mean(theta(tau)) 1||^2``.
    ranges : numpy.ndarray
        ``max theta - min theta``.
    thetas : numpy.ndarray, optional
        Full ``(len(taus), n)`` snapshots when requested.
    config : dict
        Echo of the protocol configuration.
    """
    sample_path_id: int
    n: int
    theta_bar: float
    inner_rounds: int
    taus: np.ndarray
    transmissions: np.ndarray
    means: np.ndarray
    sq_dev_initial: np.ndarray
    sq_dev_current: np.ndarray
    ranges: np.ndarray
    thetas: np.ndarray = None
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        taus = np.asarray(self.taus, dtype=int)
        transmissions = np.asarray(self.transmissions, dtype=np.int64)

        if taus.ndim != 1 or taus.size == 0:
            raise InvalidArgumentError('A trace records at least one iteration')
        if np.any(np.diff(taus) <= 0):
            raise InvalidArgumentError('Recorded iterations must be strictly increasing')
        if transmissions.shape != taus.shape or np.any(np.diff(transmissions) < 0):
            raise InvalidArgumentError('Transmission counts must be non-decreasing, one per recorded iteration')

        for name in ('means', 'sq_dev_initial', 'sq_dev_current', 'ranges'):
            values = np.asarray(getattr(self, name), dtype=float)
            if values.shape != taus.shape:
                raise InvalidArgumentError('{0} needs one value per recorded iteration'.format(name))
            object.__setattr__(self, name, values)

        object.__setattr__(self, 'taus', taus)
        object.__setattr__(self, 'transmissions', transmissions)

    @property
    def mse(self):
        """Per node squared error to the initial mean."""
        return self.sq_dev_initial / self.n

    @property
    def disagreement(self):
        """Per node squared deviation from the current mean."""
        return self.sq_dev_current / self.n

    def to_frame(self):
        return pd.DataFrame({'sample_path_id': np.full(self.taus.size, self.sample_path_id, dtype=int),
                             'tau': self.taus,
                             'transmissions_total': self.transmissions,
                             'mse_to_initial_mean': self.mse,
                             'consensus_gap': self.ranges,
                             'theta_mean': self.means}, columns=TRACE_COLUMNS)


def traces_to_frame(traces):
    """
    Stack traces into one DataFrame ordered by sample path id.

    Returns
    -------
    pandas.DataFrame
    """
    ordered = sorted(traces, key=lambda t: t.sample_path_id)

    return pd.concat([t.to_frame() for t in ordered], ignore_index=True)


def write_commented_csv(frame, path, header=None):
    """
    Write a DataFrame as CSV preceded by ``# `` comment lines.

    ``pandas.read_csv(path, comment='#')`` reads the table back.
    """
    with open(path, 'w', newline='') as fp:
        for line in header or ():
            fp.write('# {0}\n'.format(line))
        frame.to_csv(fp, index=False, lineterminator='\n')

    return path


def write_trace_csv(traces, path, header=None):
    return write_commented_csv(traces_to_frame(traces), path, header)


def write_theta_snapshots(trace, path, header=None):
    """
    Full theta snapshots of one trace, one row per recorded iteration.
    """
    if trace.thetas is None:
        raise InvalidArgumentError('Trace {0} holds no theta snapshots'.format(trace.sample_path_id))

    frame = pd.DataFrame(trace.thetas, columns=['theta_{0}'.format(k) for k in range(trace.n)])
    frame.insert(0, 'tau', trace.taus)

    return write_commented_csv(frame, path, header)
