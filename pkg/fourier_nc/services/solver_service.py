"""
Solver Service
Congruence decoding, spanning-tree reconstruction, holonomy checks and the exact classical solvers
"""
import itertools
import logging
import math
from typing import Dict, List, NamedTuple, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from fourier_nc.config import settings
from fourier_nc.exceptions import (
    AmbiguousCongruenceError, CorruptBatchError, DisconnectedGraphError, DomainMismatchError,
    FrustrationError, GuardExceededError, SamplingBudgetError,
)
from fourier_nc.models import (
    Assignment, Congruence, CycleRecord, DomainKind, FrustrationStatus, HolonomyReport,
    MeasurementBatch, NetworkInstance, RunReport,
)
from fourier_nc.services import permutations as perm
from fourier_nc.services.character_service import CharacterService
from fourier_nc.services.fourier_service import FourierService
from fourier_nc.services.instance_service import InstanceService, dihedral_inverse, dihedral_multiply
from fourier_nc.services.sampler_service import SamplerService

logger = logging.getLogger(__name__)


class SpanningTree(NamedTuple):
    """BFS tree from node 0; parent_edge maps a child to the edge index joining it to its parent"""
    order: List[int]
    parent: Dict[int, int]
    parent_edge: Dict[int, int]
    tree_edges: List[int]
    non_tree_edges: List[int]


def spanning_tree(instance: NetworkInstance) -> SpanningTree:
    """
    Breadth-first spanning tree rooted at node 0 (orientation ignored)

    Raises:
        DisconnectedGraphError: if some node is unreachable from node 0
    """
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(instance.n))
    for index, (i, j) in enumerate(instance.graph.edges):
        graph.add_edge(i, j, key=index)
    if not nx.is_connected(graph):
        components = nx.number_connected_components(graph)
        raise DisconnectedGraphError(f"graph has {components} connected components")

    order, parent, parent_edge = [0], {}, {}
    for u, v in nx.bfs_edges(graph, 0):
        order.append(v)
        parent[v] = u
        parent_edge[v] = min(graph[u][v])
    tree = sorted(parent_edge.values())
    in_tree = set(tree)
    return SpanningTree(
        order=order,
        parent=parent,
        parent_edge=parent_edge,
        tree_edges=tree,
        non_tree_edges=[e for e in range(instance.m) if e not in in_tree],
    )


def _path_to_root(tree: SpanningTree, node: int) -> List[int]:
    path = [node]
    while path[-1] in tree.parent:
        path.append(tree.parent[path[-1]])
    return path


def tree_walk(instance: NetworkInstance, tree: SpanningTree, start: int, end: int) -> List[Tuple[int, int, int]]:
    """Oriented tree edges (i, j, sign) on the path start -> end; sign +1 when walked from i to j"""
    up_start, up_end = _path_to_root(tree, start), _path_to_root(tree, end)
    common = set(up_start) & set(up_end)
    lca = next(node for node in up_start if node in common)
    nodes = up_start[:up_start.index(lca) + 1] + list(reversed(up_end[:up_end.index(lca)]))
    walk = []
    for u, v in zip(nodes, nodes[1:]):
        child = v if tree.parent.get(v) == u else u
        i, j = instance.graph.edges[tree.parent_edge[child]]
        walk.append((i, j, 1 if (i, j) == (u, v) else -1))
    return walk


def _require_cyclic(instance: NetworkInstance, operation: str) -> None:
    if instance.domain != DomainKind.CYCLIC:
        raise DomainMismatchError(f"{operation} needs a cyclic instance, got {instance.domain.value}")


class SolverService:
    """Service for classical post-processing of Fourier-NC measurements"""

    # ============================================
    # Minimisers and frustration
    # ============================================

    @staticmethod
    def edge_minimizers(instance: NetworkInstance) -> List[Set]:
        """
        Exact argmin set per edge, ties preserved

        Returns:
            Offsets d for cyclic instances, minimising cycle types for symmetric ones
        """
        tolerance = settings.reconstruction_tolerance
        minimizers: List[Set] = []
        if instance.domain == DomainKind.SYMMETRIC:
            for cost in instance.costs:
                values = CharacterService.class_values(cost)
                low = min(values.values())
                minimizers.append({parts for parts, value in values.items() if value <= low + tolerance})
            return minimizers
        _require_cyclic(instance, "edge_minimizers")
        for cost in instance.costs:
            table = InstanceService.materialize(cost)
            minimizers.append({int(d) for d in np.flatnonzero(table <= table.min() + tolerance)})
        return minimizers

    @staticmethod
    def _cycles(
        instance: NetworkInstance, tree: SpanningTree, selection: Sequence[int]
    ) -> List[CycleRecord]:
        C = instance.order
        cycles = []
        for e in tree.non_tree_edges:
            i, j = instance.graph.edges[e]
            walk = [(i, j, 1)] + tree_walk(instance, tree, j, i)
            holonomy = 0
            for a, b, sign in walk:
                holonomy += sign * selection[instance.graph.edges.index((a, b))]
            cycles.append(CycleRecord(closing_edge=(i, j), walk=tuple(walk), holonomy=holonomy % C))
        return cycles

    @staticmethod
    def detect_frustration(instance: NetworkInstance) -> HolonomyReport:
        """
        Holonomy of every fundamental cycle under a minimiser selection

        Unique minimisers give the selection directly. With ties, selections are
        searched in lexicographic order for a zero-holonomy witness as long as the
        selection space stays within the tie-search guard.

        Raises:
            DisconnectedGraphError: if the graph is not connected
        """
        _require_cyclic(instance, "detect_frustration")
        tree = spanning_tree(instance)
        minimizers = [sorted(s) for s in SolverService.edge_minimizers(instance)]
        tree_edges = tuple(instance.graph.edges[e] for e in tree.tree_edges)

        def report(selection, status) -> HolonomyReport:
            return HolonomyReport(
                cycle_rank=len(tree.non_tree_edges),
                cycles=tuple(SolverService._cycles(instance, tree, selection)),
                status=status,
                tree_edges=tree_edges,
                selection=tuple(selection),
            )

        space = int(np.prod([len(s) for s in minimizers], dtype=object)) if minimizers else 1
        if space > settings.tie_search_guard:
            logger.warning(f"Minimiser selection space {space} exceeds the tie-search guard; frustration undetermined")
            return report([s[0] for s in minimizers], FrustrationStatus.UNDETERMINED)

        first = None
        for selection in itertools.product(*minimizers):
            cycles = SolverService._cycles(instance, tree, selection)
            if all(cycle.holonomy == 0 for cycle in cycles):
                logger.info(f"Frustration-free: beta={len(cycles)}, selection space {space}")
                return report(selection, FrustrationStatus.FREE)
            first = first or selection
        first = first if first is not None else tuple(s[0] for s in minimizers)
        return report(first, FrustrationStatus.FRUSTRATED)

    @staticmethod
    def frustration_gap_bound(instance: NetworkInstance) -> float:
        """beta * Delta_max, Delta_max = max over edges of (max f - min f)"""
        tree = spanning_tree(instance)
        spread = 0.0
        for cost in instance.costs:
            if instance.domain == DomainKind.SYMMETRIC:
                values = list(CharacterService.class_values(cost).values())
            else:
                values = InstanceService.materialize(cost)
            spread = max(spread, float(max(values) - min(values)))
        return len(tree.non_tree_edges) * spread

    # ============================================
    # Congruences
    # ============================================

    @staticmethod
    def _residues(C: int, multipliers: Sequence[int], minimizers: Set[int]) -> Tuple[int, ...]:
        candidates = set(range(C))
        for k in multipliers:
            phases = {(k * d) % C for d in minimizers}
            candidates &= {d for d in range(C) if (k * d) % C in phases}
        return tuple(sorted(candidates))

    @staticmethod
    def congruences_from_modes(instance: NetworkInstance, batch: MeasurementBatch) -> List[Congruence]:
        """
        One congruence per observed edge: offsets consistent with every observed frequency

        Raises:
            CorruptBatchError: if the batch holds a label outside the instance's mode set
        """
        _require_cyclic(instance, "congruences_from_modes")
        spectra = FourierService.edge_spectra(instance)
        valid = {mode.label for mode in FourierService.global_modes(instance)}
        observed: Dict[Tuple[int, int], List[int]] = {}
        for label in batch.observed():
            if label not in valid:
                raise CorruptBatchError(f"mode {label} is not a mode of this instance")
            observed.setdefault((label[0], label[1]), []).append(label[2])

        minimizers = SolverService.edge_minimizers(instance)
        congruences = []
        for index, (edge, spectrum) in enumerate(zip(instance.graph.edges, spectra)):
            if edge not in observed:
                continue
            multipliers = tuple(sorted(set(observed[edge])))
            residues = SolverService._residues(instance.order, multipliers, minimizers[index])
            if len(residues) > 1 and set(multipliers) >= set(spectrum.frequencies) - {0}:
                logger.warning(f"Edge {edge}: every frequency observed, residues {residues} stay ambiguous")
            congruences.append(Congruence(
                edge=edge,
                cycle_length=instance.order,
                multipliers=multipliers,
                residues=residues,
                derivation=tuple((edge[0], edge[1], k) for k in multipliers),
            ))
        logger.debug(f"{len(congruences)} congruences from {batch.total} samples")
        return congruences

    @staticmethod
    def minimizer_congruences(instance: NetworkInstance) -> List[Congruence]:
        """Congruences read directly from D*_ij (classical edge-level access)"""
        return [
            Congruence(edge=edge, cycle_length=instance.order, multipliers=(), residues=tuple(sorted(d)))
            for edge, d in zip(instance.graph.edges, SolverService.edge_minimizers(instance))
        ]

    @staticmethod
    def solve_tree(
        instance: NetworkInstance, congruences: Sequence[Congruence], pick_smallest: bool = False
    ) -> Assignment:
        """
        Propagate tree-edge differences mu_i - mu_j = d from mu_0 = 0

        Args:
            pick_smallest: resolve non-singleton residue sets with their smallest member

        Raises:
            AmbiguousCongruenceError: if a tree edge has no congruence or several residues
            DisconnectedGraphError: if the graph is not connected
        """
        _require_cyclic(instance, "solve_tree")
        C = instance.order
        tree = spanning_tree(instance)
        by_edge = {c.edge: c for c in congruences}
        offsets = [0] * instance.n
        for node in tree.order[1:]:
            i, j = instance.graph.edges[tree.parent_edge[node]]
            congruence = by_edge.get((i, j))
            if congruence is None:
                raise AmbiguousCongruenceError(f"tree edge ({i}, {j}) has no congruence", edge=(i, j))
            if not congruence.is_determined and not pick_smallest:
                raise AmbiguousCongruenceError(
                    f"tree edge ({i}, {j}) admits residues {congruence.residues}", edge=(i, j)
                )
            d = congruence.residues[0]
            if node == j:
                offsets[j] = (offsets[i] - d) % C
            else:
                offsets[i] = (offsets[j] + d) % C
        return InstanceService.assignment(instance, offsets)

    # ============================================
    # Exact solvers
    # ============================================

    @staticmethod
    def _edge_matrix(instance: NetworkInstance, edge_index: int, table: np.ndarray, parent: int) -> np.ndarray:
        """F[x_parent, x_child] = f(mu_i - mu_j) for the edge joining parent and child"""
        C = instance.order
        x = np.arange(C)
        i, _ = instance.graph.edges[edge_index]
        if i == parent:
            return table[(x[:, None] - x[None, :]) % C]
        return table[(x[None, :] - x[:, None]) % C]

    @staticmethod
    def _tree_dp(
        instance: NetworkInstance, tree: SpanningTree, tables: List[np.ndarray], unary: np.ndarray
    ) -> Tuple[List[int], float]:
        """Min-sum over tree edges plus per-node unary costs; ties go to the smallest value"""
        belief = unary.copy()
        choice: Dict[int, np.ndarray] = {}
        for node in reversed(tree.order[1:]):
            parent = tree.parent[node]
            edge = tree.parent_edge[node]
            total = SolverService._edge_matrix(instance, edge, tables[edge], parent) + belief[node][None, :]
            choice[node] = np.argmin(total, axis=1)
            belief[parent] += total[np.arange(instance.order), choice[node]]
        offsets = [0] * instance.n
        offsets[0] = int(np.argmin(belief[0]))
        for node in tree.order[1:]:
            offsets[node] = int(choice[node][offsets[tree.parent[node]]])
        return offsets, float(belief[0][offsets[0]])

    @staticmethod
    def tree_dp_solve(instance: NetworkInstance, clamped: Optional[Dict[int, int]] = None) -> Assignment:
        """
        Exact minimum of the tree-edge costs with the given nodes clamped (node 0 defaults to 0)

        Non-tree edges are ignored; hybrid_solve folds them in through clamping.
        """
        _require_cyclic(instance, "tree_dp_solve")
        tree = spanning_tree(instance)
        tables = [InstanceService.materialize(cost) for cost in instance.costs]
        unary = SolverService._clamp({0: 0, **(clamped or {})}, instance.n, instance.order)
        offsets, _ = SolverService._tree_dp(instance, tree, tables, unary)
        return InstanceService.assignment(instance, offsets)

    @staticmethod
    def _clamp(clamped: Dict[int, int], n: int, C: int) -> np.ndarray:
        unary = np.zeros((n, C))
        for node, value in clamped.items():
            unary[node, :] = np.inf
            unary[node, value % C] = 0.0
        return unary

    @staticmethod
    def hybrid_solve(instance: NetworkInstance) -> Assignment:
        """
        Exact optimum by enumerating at most C^beta clamp configurations

        One endpoint of every non-tree edge is clamped; each configuration turns the
        non-tree edges into unary terms and the rest is a tree min-sum programme.

        Raises:
            GuardExceededError: if C^beta exceeds the hybrid guard
        """
        _require_cyclic(instance, "hybrid_solve")
        C = instance.order
        tree = spanning_tree(instance)
        beta = len(tree.non_tree_edges)
        if C ** beta > settings.hybrid_guard:
            raise GuardExceededError(f"C^beta = {C}^{beta} exceeds the hybrid guard {settings.hybrid_guard}")

        tables = [InstanceService.materialize(cost) for cost in instance.costs]
        clamp_nodes: List[int] = []
        for e in tree.non_tree_edges:
            i, j = instance.graph.edges[e]
            if i != 0 and j != 0 and i not in clamp_nodes and j not in clamp_nodes:
                clamp_nodes.append(i)

        best_offsets, best_cost = None, np.inf
        x = np.arange(C)
        for values in itertools.product(range(C), repeat=len(clamp_nodes)):
            clamped = {0: 0, **dict(zip(clamp_nodes, values))}
            unary = SolverService._clamp(clamped, instance.n, C)
            constant = 0.0
            for e in tree.non_tree_edges:
                i, j = instance.graph.edges[e]
                if i in clamped and j in clamped:
                    constant += tables[e][(clamped[i] - clamped[j]) % C]
                elif i in clamped:
                    unary[j] += tables[e][(clamped[i] - x) % C]
                else:
                    unary[i] += tables[e][(x - clamped[j]) % C]
            offsets, cost = SolverService._tree_dp(instance, tree, tables, unary)
            if cost + constant < best_cost - settings.reconstruction_tolerance:
                best_offsets, best_cost = offsets, cost + constant
        logger.info(f"Hybrid solve: beta={beta}, {C ** len(clamp_nodes)} configurations, H={best_cost:.6g}")
        return InstanceService.assignment(instance, best_offsets)

    @staticmethod
    def _group_tables(instance: NetworkInstance) -> Tuple[list, np.ndarray, List[np.ndarray]]:
        """Element list, relative-element index table R[a, b] and per-edge value vectors"""
        if instance.domain == DomainKind.CYCLIC:
            C = instance.order
            x = np.arange(C)
            return list(range(C)), (x[:, None] - x[None, :]) % C, [
                InstanceService.materialize(cost) for cost in instance.costs
            ]
        if instance.domain == DomainKind.DIHEDRAL:
            C = instance.order
            elements = [(a, b) for b in (0, 1) for a in range(C)]
            index = {g: t for t, g in enumerate(elements)}
            relative = np.array([
                [index[dihedral_multiply(dihedral_inverse(g, C), h, C)] for h in elements] for g in elements
            ])
            return elements, relative, [InstanceService.materialize(cost) for cost in instance.costs]
        elements = list(perm.all_permutations(instance.order))
        classes = CharacterService.partitions(instance.order)
        class_index = {parts: t for t, parts in enumerate(classes)}
        relative = np.array([
            [class_index[perm.cycle_type(perm.relative(g, h))] for h in elements] for g in elements
        ])
        vectors = []
        for cost in instance.costs:
            values = CharacterService.class_values(cost)
            vectors.append(np.array([values[parts] for parts in classes]))
        return elements, relative, vectors

    @staticmethod
    def brute_force_solve(instance: NetworkInstance) -> Assignment:
        """
        Global optimum by exhaustive enumeration with node 0 fixed to the identity

        H only depends on relative elements, so fixing node 0 loses no optimum.
        Ties go to the lexicographically smallest assignment.

        Raises:
            GuardExceededError: if |G|^n exceeds the brute-force guard
        """
        if instance.domain == DomainKind.SYMMETRIC:
            group_order = math.factorial(instance.order)
        elif instance.domain == DomainKind.DIHEDRAL:
            group_order = 2 * instance.order
        else:
            group_order = instance.order
        if group_order ** instance.n > settings.brute_force_guard:
            raise GuardExceededError(
                f"|G|^n = {group_order}^{instance.n} exceeds the brute-force guard {settings.brute_force_guard}"
            )
        elements, relative, vectors = SolverService._group_tables(instance)
        if instance.n == 1:
            return InstanceService.assignment(instance, [elements[0]])
        grid = np.indices((group_order,) * (instance.n - 1)).reshape(instance.n - 1, -1)
        nodes = np.vstack([np.zeros((1, grid.shape[1]), dtype=int), grid])
        landscape = np.zeros(grid.shape[1])
        for e, (i, j) in enumerate(instance.graph.edges):
            landscape += vectors[e][relative[nodes[i], nodes[j]]]
        best = int(np.flatnonzero(landscape <= landscape.min() + settings.reconstruction_tolerance)[0])
        chosen = [elements[int(t)] for t in nodes[:, best]]
        logger.debug(f"Brute force over {grid.shape[1]} assignments: H={landscape[best]:.6g}")
        return InstanceService.assignment(instance, chosen)

    # ============================================
    # End-to-end pipeline
    # ============================================

    @staticmethod
    def end_to_end_solve(
        instance: NetworkInstance,
        seed: int,
        delta: float = None,
        max_retries: int = None,
        oracle: bool = False,
    ) -> Tuple[Assignment, RunReport]:
        """
        Spectra -> conditional sampling -> congruences -> tree reconstruction

        Each attempt draws T = ceil(s ln(s / delta)) conditional samples; observed
        modes accumulate across retries until every tree edge is determined.

        Raises:
            FrustrationError: on a frustrated instance (use hybrid_solve instead)
            AmbiguousCongruenceError: if a tree edge stays ambiguous once every mode is observed
            SamplingBudgetError: if tree edges are still undetermined after the retries
        """
        delta = delta if delta is not None else settings.delta
        max_retries = max_retries if max_retries is not None else settings.max_retries
        report = SolverService.detect_frustration(instance)
        if report.status == FrustrationStatus.FRUSTRATED:
            logger.error(f"Instance is frustrated (beta={report.cycle_rank}); end-to-end reconstruction refused")
            raise FrustrationError("frustrated instance: use hybrid_solve (or --hybrid) for the exact optimum", report)

        p_min = FourierService.p_min(instance)
        modes = FourierService.global_modes(instance)
        s = len(modes)
        T = SamplerService.coupon_draws(s, delta)
        tree = spanning_tree(instance)
        tree_edges = {instance.graph.edges[e] for e in tree.tree_edges}
        logger.info(f"End-to-end solve: s={s}, p_min={p_min:.4g}, T={T} per attempt")

        sequence: List[int] = []
        labels = None
        for attempt in range(max_retries + 1):
            batch = SamplerService.sample_modes(instance, T, seed=seed + attempt, conditional=True)
            labels = batch.labels
            sequence.extend(batch.sequence)
            pooled = MeasurementBatch(
                seed=seed, total=len(sequence), conditional=True, labels=labels, sequence=tuple(sequence)
            )
            congruences = SolverService.congruences_from_modes(instance, pooled)
            determined = {c.edge for c in congruences if c.is_determined}
            if tree_edges <= determined:
                break
            if len(pooled.observed()) == s:
                edge = min(tree_edges - determined)
                logger.error(f"Every mode observed but tree edge {edge} stays ambiguous")
                raise AmbiguousCongruenceError(
                    f"tree edge {edge} stays ambiguous with every mode observed; more draws cannot resolve it",
                    edge=edge,
                )
            logger.info(f"Attempt {attempt + 1}: {len(tree_edges - determined)} tree edges undetermined, retrying")
        else:
            observed = set(pooled.observed())
            missing = tuple(mode.label for mode in modes if mode.label not in observed)
            total = sum(mode.weight for mode in modes)
            mass = sum(mode.weight for mode in modes if mode.label not in observed) / total
            logger.error(f"Sampling budget exhausted after {max_retries} retries, {len(missing)} modes missing")
            raise SamplingBudgetError(
                f"tree edges undetermined after {max_retries} retries ({len(missing)} modes missing)",
                missing=missing,
                missing_mass=mass,
            )

        assignment = SolverService.solve_tree(instance, congruences)
        cost = InstanceService.eval_cost(instance, assignment)
        run = RunReport(
            method="fourier",
            p_min=p_min,
            T=len(sequence),
            modes_expected=s,
            modes_collected=len(pooled.observed()),
            retries=attempt,
            cost=cost,
            assignment=assignment.elements,
        )
        if oracle:
            run = SolverService.check_against_oracle(instance, run)
        logger.info(f"Solution found: H={cost:.6g} after {attempt} retries")
        return assignment, run

    @staticmethod
    def check_against_oracle(instance: NetworkInstance, run: RunReport) -> RunReport:
        optimum = InstanceService.eval_cost(instance, SolverService.brute_force_solve(instance))
        run.oracle_cost = optimum
        run.optimal = abs(run.cost - optimum) <= settings.reconstruction_tolerance
        return run
