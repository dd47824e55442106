#!/usr/bin/env python

############################################################################
#
# MODULE:       m.mse
# AUTHOR(S):    tpcpy developers
# PURPOSE:      MSE estimates, e1/e2 envelopes and stopping times over sample paths.
#
# COPYRIGHT:    (C) tpcpy developers
#
#               This program is free software under the GNU General
#               Public License (>=v2).
#
#############################################################################
"""
Mean squared error estimates over sample paths, their split into consensus-direction variance
(``e1``) and disagreement energy (``e2``), analytic envelopes and stopping times.

For one path and the initial mean ``theta_bar``::

    (1/n) ||theta - theta_bar 1||^2 = (mean(theta) - theta_bar)^2 + (1/n) ||theta - mean(theta) 1||^2

so the path average of the left side equals the biased ``e1`` plus ``e2`` up to rounding.
"""
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import pandas as pd

from tpcpy import messages as gs
from tpcpy.exceptions import InvalidArgumentError
from tpcpy.m_metrics.m_trace import write_commented_csv

__all__ = ['MseCurve', 'BoundReport', 'StoppingTime', 'CURVE_COLUMNS', 'DEFAULT_Z', 'sample_mean', 'mse_curve',
           'check_e1_bound', 'check_e2_bound', 'e1_bound', 'e2_bound', 'stopping_time', 'consensus_gap',
           'decompose', 'guaranteed_outer_iterations', 'guaranteed_mse_target', 'rgg_delta', 'write_curve_csv',
           'write_report_json']

CURVE_COLUMNS = ['tau', 'transmissions', 'mse', 'e1', 'e2', 'ci', 'paths']

# Two-sided 95 % normal quantile.
DEFAULT_Z = 1.96

_NAME = 'm_metrics'


@dataclass(frozen=True, eq=False)
class MseCurve(object):
    """
    Estimates across sample paths at every recorded outer iteration.

    Attributes
    ----------
    taus : numpy.ndarray
    transmissions : numpy.ndarray
        Cumulative link transmissions of one path.
    mse : numpy.ndarray
        Path average of ``(1/n) ||theta - theta_bar 1||^2``.
    e1 : numpy.ndarray
        Across-path variance of ``mean(theta)``.
    e2 : numpy.ndarray
        Path average of ``(1/n) ||theta - mean(theta) 1||^2``.
    ci : numpy.ndarray
        Normal-approximation half width of ``mse``.
    paths : int
    e1_biased : numpy.ndarray
        Path average of ``(mean(theta) - theta_bar)^2``.
    bias : numpy.ndarray
        Path average of ``mean(theta) - theta_bar``.
    e1_ci, e2_ci : numpy.ndarray
        Half widths of ``e1`` and ``e2``.
    theta_bar : float
    n : int
    inner_rounds : int
    z : float
        Normal quantile of the half widths.
    """
    taus: np.ndarray
    transmissions: np.ndarray
    mse: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    ci: np.ndarray
    paths: int
    e1_biased: np.ndarray
    bias: np.ndarray
    e1_ci: np.ndarray
    e2_ci: np.ndarray
    theta_bar: float
    n: int
    inner_rounds: int
    z: float = DEFAULT_Z

    def to_frame(self):
        return pd.DataFrame({'tau': self.taus,
                             'transmissions': self.transmissions,
                             'mse': self.mse,
                             'e1': self.e1,
                             'e2': self.e2,
                             'ci': self.ci,
                             'paths': np.full(self.taus.size, self.paths, dtype=int)}, columns=CURVE_COLUMNS)

    def at(self, tau):
        """Row index of a recorded iteration."""
        hits = np.flatnonzero(self.taus == tau)
        if hits.size == 0:
            raise InvalidArgumentError('tau={0} was not recorded'.format(tau))

        return int(hits[0])


@dataclass(frozen=True, eq=False)
class BoundReport(object):
    """
    Pointwise comparison of an estimate against an analytic envelope.

    A point passes when the estimate does not exceed the envelope by more than its half width.
    Inapplicable reports carry the reason and no comparison.
    """
    name: str
    applicable: bool
    taus: np.ndarray
    bound: np.ndarray = None
    estimate: np.ndarray = None
    halfwidth: np.ndarray = None
    passed_at: np.ndarray = None
    reason: str = ''

    @property
    def passed(self):
        if not self.applicable:
            return None

        return bool(np.all(self.passed_at))

    @property
    def failures(self):
        if not self.applicable:
            return np.zeros(0, dtype=int)

        return self.taus[~self.passed_at]

    def to_dict(self):
        payload = {'name': self.name, 'applicable': self.applicable, 'passed': self.passed, 'reason': self.reason}
        if self.applicable:
            payload.update(tau=self.taus.tolist(), bound=self.bound.tolist(), estimate=self.estimate.tolist(),
                           halfwidth=self.halfwidth.tolist(), passed_at=self.passed_at.tolist())

        return payload


class StoppingTime(NamedTuple):
    """First recorded iteration at or below a target."""
    tau: int
    rounds: int
    transmissions: int
    resolution: int


# ----------------------------------------------------------------------------------------------------------------------
# Estimators
# ----------------------------------------------------------------------------------------------------------------------
def sample_mean(theta0):
    """
    Arithmetic mean of the initial values.

    Examples
    --------
    >>> sample_mean([1.0, 2.0, 3.0])
    2.0
    """
    theta0 = np.asarray(theta0, dtype=float)
    if theta0.size == 0:
        raise InvalidArgumentError('sample_mean needs at least one value')

    return float(np.mean(theta0))


def consensus_gap(theta):
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        raise InvalidArgumentError('consensus_gap needs at least one value')

    return float(theta.max() - theta.min())


def decompose(theta):
    """
    Split ``theta = alpha 1 / sqrt(n) + (theta - mean(theta) 1)``.

    Returns
    -------
    alpha : float
        ``<1 / sqrt(n), theta>``.
    beta_sq : float
        ``||theta - mean(theta) 1||^2``.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        raise InvalidArgumentError('decompose needs at least one value')

    alpha = float(theta.sum() / math.sqrt(theta.size))

    return alpha, float(np.sum((theta - theta.mean()) ** 2))


def mse_curve(traces, theta_bar=None, z=DEFAULT_Z):
    """
    Combine sample path traces into one curve.

    Parameters
    ----------
    traces : list of RunTrace
        At least two traces recorded at the same iterations on the same graph size.
    theta_bar : float, optional
        Reference mean; default is the initial mean stored with the traces.
    z : float
        Normal quantile of the half widths.

    Returns
    -------
    MseCurve

    Raises
    ------
    InvalidArgumentError
        Fewer than two traces, misaligned iterations or different graph sizes.
    """
    traces = sorted(traces, key=lambda t: t.sample_path_id)
    if len(traces) < 2:
        raise InvalidArgumentError('mse_curve needs at least 2 traces, got {0}'.format(len(traces)))

    first = traces[0]
    for trace in traces[1:]:
        if not np.array_equal(trace.taus, first.taus):
            raise InvalidArgumentError('Trace {0} is recorded at other iterations than trace {1}'.format(
                trace.sample_path_id, first.sample_path_id))
        if trace.n != first.n:
            raise InvalidArgumentError('Traces of graphs with {0} and {1} nodes'.format(first.n, trace.n))

    n = first.n
    paths = len(traces)
    reference = first.theta_bar if theta_bar is None else float(theta_bar)

    means = np.vstack([t.means for t in traces])
    disagreement = np.vstack([t.sq_dev_current for t in traces]) / n

    if all(t.theta_bar == reference for t in traces):
        per_path = np.vstack([t.sq_dev_initial for t in traces]) / n
    else:
        per_path = disagreement + (means - reference) ** 2

    e1 = means.var(axis=0, ddof=1)
    root = math.sqrt(paths)

    curve = MseCurve(taus=first.taus.copy(),
                     # the transmission count of a phase depends only on graph and mode
                     transmissions=first.transmissions.copy(),
                     mse=per_path.mean(axis=0),
                     e1=e1,
                     e2=disagreement.mean(axis=0),
                     ci=z * per_path.std(axis=0, ddof=1) / root,
                     paths=paths,
                     e1_biased=((means - reference) ** 2).mean(axis=0),
                     bias=(means - reference).mean(axis=0),
                     e1_ci=z * e1 * math.sqrt(2.0 / (paths - 1)),
                     e2_ci=z * disagreement.std(axis=0, ddof=1) / root,
                     theta_bar=reference,
                     n=n,
                     inner_rounds=first.inner_rounds,
                     z=z)

    gs.debug('mse curve from {0} paths over {1} iterations'.format(paths, curve.taus.size), 1, _NAME)

    return curve


# ----------------------------------------------------------------------------------------------------------------------
# Envelopes
# ----------------------------------------------------------------------------------------------------------------------
def e1_bound(sigma2, delta, lambda2):
    """``sigma2 delta / lambda2^2``."""
    _check_envelope_args(sigma2, delta, lambda2)

    return sigma2 * delta / lambda2 ** 2


def e2_bound(taus, sigma2, delta, lambda2, e2_initial):
    """
    Envelope of the disagreement energy::

        sigma2 / lambda2^2 * log(t) / t + e2(0) (1/delta - 1) / t,    t = tau + 1/delta - 1

    Returns
    -------
    numpy.ndarray
    """
    _check_envelope_args(sigma2, delta, lambda2)
    t = np.asarray(taus, dtype=float) + 1.0 / delta - 1.0

    return sigma2 / lambda2 ** 2 * np.log(t) / t + e2_initial * (1.0 / delta - 1.0) / t


def check_e1_bound(curve, sigma2, delta, lambda2):
    """
    Compare ``e1`` with ``sigma2 delta / lambda2^2`` at every recorded iteration.

    Returns
    -------
    BoundReport
    """
    bound = np.full(curve.taus.size, e1_bound(sigma2, delta, lambda2))

    return BoundReport(name='e1', applicable=True, taus=curve.taus, bound=bound, estimate=curve.e1,
                       halfwidth=curve.e1_ci, passed_at=curve.e1 <= bound + curve.e1_ci)


def check_e2_bound(curve, sigma2, delta, lambda2, e2_initial=None):
    """
    Compare ``e2`` with its envelope at every recorded iteration.

    The envelope is derived for ``delta <= lambda2^2 / 4`` only; otherwise the report says so and
    compares nothing.

    Parameters
    ----------
    curve : MseCurve
    sigma2, delta, lambda2 : float
    e2_initial : float, optional
        Default is ``e2`` at the first recorded iteration, which must be 0.

    Returns
    -------
    BoundReport
    """
    _check_envelope_args(sigma2, delta, lambda2)

    if delta > lambda2 ** 2 / 4:
        reason = 'delta={0} exceeds lambda2^2/4={1}'.format(delta, lambda2 ** 2 / 4)
        gs.verbose('e2 envelope inapplicable: {0}'.format(reason), _NAME)
        return BoundReport(name='e2', applicable=False, taus=curve.taus, reason=reason)

    if e2_initial is None:
        if curve.taus[0] != 0:
            raise InvalidArgumentError('e2_initial is required when tau=0 was not recorded')
        e2_initial = float(curve.e2[0])

    bound = e2_bound(curve.taus, sigma2, delta, lambda2, e2_initial)

    return BoundReport(name='e2', applicable=True, taus=curve.taus, bound=bound, estimate=curve.e2,
                       halfwidth=curve.e2_ci, passed_at=curve.e2 <= bound + curve.e2_ci)


def stopping_time(curve, target):
    """
    First recorded iteration with ``mse <= target``.

    There is no interpolation between recorded iterations; ``resolution`` is the distance to the
    previous recorded iteration.

    Parameters
    ----------
    curve : MseCurve
    target : float
        Positive target.

    Returns
    -------
    StoppingTime or None
        ``None`` if the curve never reaches the target.
    """
    if not target > 0:
        raise InvalidArgumentError('target must be > 0, got {0}'.format(target))

    hits = np.flatnonzero(curve.mse <= target)
    if hits.size == 0:
        return None

    k = int(hits[0])
    tau = int(curve.taus[k])
    resolution = tau - int(curve.taus[k - 1]) if k > 0 else 1

    return StoppingTime(tau=tau, rounds=curve.inner_rounds * tau, transmissions=int(curve.transmissions[k]),
                        resolution=resolution)


def guaranteed_mse_target(sigma2, delta, lambda2):
    """``3 sigma2 delta / lambda2^2``."""
    return 3.0 * e1_bound(sigma2, delta, lambda2)


def guaranteed_outer_iterations(sigma2, delta, lambda2, e2_initial):
    """
    Outer iterations after which the mse is guaranteed below :func:`guaranteed_mse_target`:
    ``max((2 / delta) log(1 / delta), e2(0) lambda2^2 / (sigma2 delta^2))``.

    Returns
    -------
    int
    """
    _check_envelope_args(sigma2, delta, lambda2)

    iterations = 2.0 / delta * math.log(1.0 / delta)
    if sigma2 > 0:
        iterations = max(iterations, e2_initial * lambda2 ** 2 / (sigma2 * delta ** 2))

    return int(math.ceil(iterations))


def rgg_delta(delta_prime, n):
    """Tolerance ``delta' / (log n)^2`` of a random geometric graph on ``n`` nodes."""
    if not delta_prime > 0 or n < 2:
        raise InvalidArgumentError('rgg_delta needs delta_prime > 0 and n >= 2')

    return delta_prime / math.log(n) ** 2


# ----------------------------------------------------------------------------------------------------------------------
# Output
# ----------------------------------------------------------------------------------------------------------------------
def write_curve_csv(curve, path, header=None):
    return write_commented_csv(curve.to_frame(), path, header)


def write_report_json(payload, path, echo=None):
    """
    Write a JSON document; ``echo`` goes under the key ``spec``.
    """
    document = {'spec': echo} if echo is not None else {}
    document.update(payload)

    with open(path, 'w') as fp:
        json.dump(document, fp, indent=2, default=_to_builtin)
        fp.write('\n')

    gs.verbose('Report written to <{0}>'.format(path), _NAME)

    return path


def _to_builtin(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()

    raise TypeError('Cannot serialize {0!r}'.format(value))


def _check_envelope_args(sigma2, delta, lambda2):
    if sigma2 < 0:
        raise InvalidArgumentError('sigma2 must be >= 0, got {0}'.format(sigma2))
    if not 0 < delta < 0.5:
        raise InvalidArgumentError('delta must be in (0, 1/2), got {0}'.format(delta))
    if not lambda2 > 0:
        raise InvalidArgumentError('lambda2 must be > 0, got {0}'.format(lambda2))
