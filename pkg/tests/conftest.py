import numpy as np
import pytest

from tpcpy.c_channel.c_awgn import GRAPH_DOMAIN, RandomStream
from tpcpy.g_graph.g_topology import build_cycle, build_grid, build_rgg
from tpcpy.m_metrics.m_trace import RunTrace


@pytest.fixture
def grid5():
    return build_grid(5)


@pytest.fixture
def cycle8():
    return build_cycle(8)


@pytest.fixture
def rgg200():
    return build_rgg(200, 2.0, RandomStream(11, 200, GRAPH_DOMAIN))


@pytest.fixture
def theta25():
    return 1.0 + RandomStream(5, 25, 2).normal(25)


@pytest.fixture
def make_trace():
    """Build a RunTrace from full theta snapshots."""

    def factory(thetas, taus=None, sample_path_id=0, theta_bar=None, inner_rounds=8):
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        taus = np.arange(thetas.shape[0]) if taus is None else np.asarray(taus)
        theta_bar = float(thetas[0].mean()) if theta_bar is None else theta_bar
        means = thetas.mean(axis=1)

        return RunTrace(sample_path_id=sample_path_id, n=thetas.shape[1], theta_bar=theta_bar,
                        inner_rounds=inner_rounds, taus=taus, transmissions=10 * taus, means=means,
                        sq_dev_initial=((thetas - theta_bar) ** 2).sum(axis=1),
                        sq_dev_current=((thetas - means[:, np.newaxis]) ** 2).sum(axis=1),
                        ranges=thetas.max(axis=1) - thetas.min(axis=1), thetas=thetas)

    return factory
