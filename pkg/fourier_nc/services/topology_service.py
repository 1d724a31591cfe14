"""
Topology Service
Standard network topologies and seeded random instance generators
"""
import logging
from typing import Callable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from fourier_nc.models import CostFunction, DomainKind, Graph, NetworkInstance
from fourier_nc.services.instance_service import InstanceService

logger = logging.getLogger(__name__)

CostFactory = Callable[[np.random.Generator, int], CostFunction]


def graph_from_networkx(graph: nx.Graph) -> Graph:
    """Relabel nodes 0..n-1 in sorted order and store undirected edges with i < j"""
    relabeled = nx.convert_node_labels_to_integers(graph, ordering="sorted")
    edges = sorted((min(u, v), max(u, v)) for u, v in relabeled.edges())
    return InstanceService.make_graph(relabeled.number_of_nodes(), edges)


def shifted_cosine(cycle_length: int, difference: int, amplitude: float = 1.0, offset: float = 0.0) -> CostFunction:
    """offset - amplitude * cos(2 pi (x - d) / C): single harmonic, unique minimiser at d"""
    x = np.arange(cycle_length)
    values = offset - amplitude * np.cos(2.0 * np.pi * (x - difference) / cycle_length)
    return InstanceService.make_cost("table", cycle_length, values=values.tolist())


class TopologyService:
    """Service building the graphs and instances used by experiments and tests"""

    @staticmethod
    def grid(rows: int = 4, cols: int = 4) -> Graph:
        return graph_from_networkx(nx.grid_2d_graph(rows, cols))

    @staticmethod
    def ring(n: int = 8) -> Graph:
        return graph_from_networkx(nx.cycle_graph(n))

    @staticmethod
    def complete(n: int = 8) -> Graph:
        return graph_from_networkx(nx.complete_graph(n))

    @staticmethod
    def barbell(clique: int = 5) -> Graph:
        """Two K_clique joined by one bridge edge"""
        return graph_from_networkx(nx.barbell_graph(clique, 0))

    @staticmethod
    def path(n: int) -> Graph:
        return graph_from_networkx(nx.path_graph(n))

    @staticmethod
    def cycle_with_chord() -> Graph:
        """4-cycle 0-1-2-3 plus the chord 0-2"""
        return InstanceService.make_graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)])

    @staticmethod
    def random_connected(n: int, rng: np.random.Generator, extra_edge_probability: float = 0.3) -> Graph:
        """Random spanning tree plus independent extra edges"""
        edges = set()
        for v in range(1, n):
            edges.add((int(rng.integers(v)), v))
        for i in range(n):
            for j in range(i + 1, n):
                if (i, j) not in edges and rng.random() < extra_edge_probability:
                    edges.add((i, j))
        return InstanceService.make_graph(n, sorted(edges))

    # ============================================
    # Cost families
    # ============================================

    @staticmethod
    def cosine_costs(low: float = 0.5, high: float = 1.5, harmonics: int = 1) -> CostFactory:
        """Cosine costs with weights uniform on [low, high] per harmonic"""
        def factory(rng: np.random.Generator, C: int) -> CostFunction:
            return InstanceService.make_cost("cosine", C, weights=rng.uniform(low, high, size=harmonics).tolist())
        return factory

    @staticmethod
    def skewed_pwl_costs(low: float = 1.0, high: float = 2.0, harmonics: int = 2) -> CostFactory:
        """Zero-mean sawtooth rising over the first quarter: both retained harmonics are active"""
        def factory(rng: np.random.Generator, C: int) -> CostFunction:
            h = float(rng.uniform(low, high))
            return InstanceService.make_cost(
                "pwl", C, breakpoints=[(0, -h / 2), (C // 4, h / 2)], harmonics=harmonics
            )
        return factory

    @staticmethod
    def random_table_costs(low: float = -1.0, high: float = 1.0) -> CostFactory:
        def factory(rng: np.random.Generator, C: int) -> CostFunction:
            return InstanceService.make_cost("table", C, values=rng.uniform(low, high, size=C).tolist())
        return factory

    @staticmethod
    def with_costs(graph: Graph, C: int, factory: CostFactory, seed: int, name: Optional[str] = None) -> NetworkInstance:
        rng = np.random.default_rng(seed)
        costs = [factory(rng, C) for _ in graph.edges]
        logger.debug(f"Generated {name or 'instance'}: n={graph.node_count}, m={graph.edge_count}, C={C}, seed={seed}")
        return InstanceService.make_instance(graph, DomainKind.CYCLIC, C, costs, name=name)

    # ============================================
    # Reference instances
    # ============================================

    @staticmethod
    def planted(graph: Graph, C: int, offsets: Sequence[int], amplitudes: Optional[Sequence[float]] = None,
                constants: Optional[Sequence[float]] = None, name: Optional[str] = None) -> NetworkInstance:
        """Frustration-free instance whose edge minimisers are the planted differences mu_i - mu_j"""
        costs = []
        for index, (i, j) in enumerate(graph.edges):
            costs.append(shifted_cosine(
                C,
                (offsets[i] - offsets[j]) % C,
                amplitude=amplitudes[index] if amplitudes is not None else 1.0,
                offset=constants[index] if constants is not None else 0.0,
            ))
        return InstanceService.make_instance(graph, DomainKind.CYCLIC, C, costs, name=name)

    @staticmethod
    def convergence_instance(C: int = 8, seed: int = 42) -> NetworkInstance:
        """K4 with unit single-harmonic costs at planted differences: 12 equal-weight modes"""
        rng = np.random.default_rng(seed)
        offsets = [0] + rng.integers(C, size=3).tolist()
        return TopologyService.planted(TopologyService.complete(4), C, offsets, name="k4-planted")

    @staticmethod
    def random_planted(n: int, C: int, seed: int, extra_edge_probability: float = 0.4) -> Tuple[NetworkInstance, List[int]]:
        """Random connected frustration-free instance with r <= 3 and its planted offsets (mu_0 = 0)"""
        rng = np.random.default_rng(seed)
        graph = TopologyService.random_connected(n, rng, extra_edge_probability)
        offsets = [0] + rng.integers(C, size=n - 1).tolist()
        amplitudes = rng.uniform(0.5, 1.5, size=graph.edge_count).tolist()
        constants = rng.uniform(-1.0, 1.0, size=graph.edge_count).tolist()
        instance = TopologyService.planted(graph, C, offsets, amplitudes, constants, name=f"planted-{seed}")
        return instance, offsets

    @staticmethod
    def random_tables(n: int, C: int, seed: int, extra_edge_probability: float = 0.5) -> NetworkInstance:
        """Random connected graph with uniform random edge tables (usually frustrated)"""
        rng = np.random.default_rng(seed)
        graph = TopologyService.random_connected(n, rng, extra_edge_probability)
        return TopologyService.with_costs(graph, C, TopologyService.random_table_costs(), int(rng.integers(2**31)))
