import numpy as np
import pytest

from fourier_nc.services.analytics_service import AnalyticsService
from fourier_nc.services.instance_service import InstanceService
from fourier_nc.services.symmetric_service import SymmetricService
from fourier_nc.services.topology_service import TopologyService


@pytest.fixture
def maxcut_triangle():
    """K3 with f(0) = +1, f(1) = -1 over Z_2"""
    return AnalyticsService.maxcut_reduce(InstanceService.make_graph(3, [(0, 1), (0, 2), (1, 2)]))


@pytest.fixture
def oriented_triangle():
    """Directed 0 -> 1 -> 2 -> 0 over Z_3 with every edge minimised at d = 1"""
    graph = InstanceService.make_graph(3, [(0, 1), (1, 2), (2, 0)], directed=True)
    return TopologyService.planted(graph, 3, [0, 2, 1], name="oriented-triangle")


@pytest.fixture
def single_cosine_edge():
    cost = InstanceService.make_cost("cosine", 8, weights=[1.0])
    return InstanceService.make_instance(InstanceService.make_graph(2, [(0, 1)]), "cyclic", 8, [cost])


@pytest.fixture
def k4_planted():
    return TopologyService.convergence_instance(C=8, seed=42)


@pytest.fixture
def hamming_pair():
    graph = InstanceService.make_graph(2, [(0, 1)])
    return InstanceService.make_instance(graph, "symmetric", 3, [SymmetricService.hamming_cost(3)])


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
