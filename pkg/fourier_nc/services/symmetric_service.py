"""
Symmetric Service
Class-function costs on S_k, irrep-label sampling, the DMPC tree solver, query tables and the ECC study
"""
import itertools
import logging
import math
import re
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from fourier_nc.config import settings
from fourier_nc.exceptions import (
    DomainMismatchError, FrustrationError, GuardExceededError, InstanceValidationError,
    LinearisationError, SamplingBudgetError, UnsupportedGroupError, UsageError,
)
from fourier_nc.models import (
    AbelianIndex, Assignment, ClassFunction, CycleRecord, DomainKind, EccStatistics,
    FrustrationStatus, HolonomyReport, NetworkInstance, Partition, Permutation, QueryRow,
    SkDistribution, is_partition,
)
from fourier_nc.services import permutations as perm
from fourier_nc.services.character_service import CharacterService
from fourier_nc.services.instance_service import InstanceService
from fourier_nc.services.sampler_service import SamplerService, trial_rng
from fourier_nc.services.solver_service import SolverService, SpanningTree, spanning_tree, tree_walk

logger = logging.getLogger(__name__)

GROUP_PATTERN = re.compile(r"^\s*(?:(Z|D|S)|(cyclic|dihedral|symmetric)\s*:)\s*(\d+)\s*$", re.IGNORECASE)


def _require_symmetric(instance: NetworkInstance, operation: str) -> None:
    if instance.domain != DomainKind.SYMMETRIC:
        raise DomainMismatchError(f"{operation} needs a symmetric instance, got {instance.domain.value}")


def parse_group(descriptor: str) -> Tuple[DomainKind, int]:
    """'Z12', 'D8', 'S5' or 'cyclic:12' style descriptors"""
    match = GROUP_PATTERN.match(descriptor)
    if not match:
        raise UnsupportedGroupError(f"unsupported group descriptor {descriptor!r}")
    letter, word, order = match.groups()
    kind = {"z": DomainKind.CYCLIC, "d": DomainKind.DIHEDRAL, "s": DomainKind.SYMMETRIC}[(letter or word[0]).lower()]
    return kind, int(order)


def _generated_abelian(group: Set[Permutation], g: Permutation) -> Set[Permutation]:
    """<H, g> for an abelian H commuting with g: {h g^i}"""
    powers = []
    power = g
    identity = perm.identity(len(g))
    while True:
        powers.append(power)
        if power == identity:
            break
        power = perm.compose(g, power)
    return {perm.compose(h, p) for h in group for p in powers}


def _largest_abelian_brute(k: int) -> int:
    """Largest abelian subgroup of S_k by branch-and-bound over commuting generators"""
    identity = perm.identity(k)
    elements = list(perm.all_permutations(k))
    best = 1

    def commute(a: Permutation, b: Permutation) -> bool:
        return perm.compose(a, b) == perm.compose(b, a)

    def search(group: Set[Permutation], candidates: List[Permutation]) -> None:
        nonlocal best
        best = max(best, len(group))
        remaining = list(candidates)
        while remaining and len(group) + len(remaining) > best:
            g = remaining.pop(0)
            extended = _generated_abelian(group, g)
            search(extended, [c for c in remaining if c not in extended and commute(c, g)])

    # Every non-trivial abelian subgroup is conjugate to one holding a class representative
    for parts in CharacterService.partitions(k):
        if parts == (1,) * k:
            continue
        g = perm.class_representative(parts)
        group = _generated_abelian({identity}, g)
        search(group, [c for c in elements if c not in group and commute(c, g)])
    return best


class SymmetricService:
    """Service for Permutation Coordination over S_k with class-function edge costs"""

    # ============================================
    # Cost library
    # ============================================

    @staticmethod
    def hamming_cost(k: int) -> ClassFunction:
        """d_H(sigma) = k - fix(sigma)"""
        if k < 2:
            raise UsageError("hamming_cost needs k >= 2")
        return CharacterService.from_values(
            k, {mu: float(k - sum(1 for part in mu if part == 1)) for mu in CharacterService.partitions(k)}
        )

    @staticmethod
    def kendall_class_average(k: int) -> ClassFunction:
        """
        Per-class mean of the inversion count

        Inversions are not constant on classes, so the class average is the
        closest class function.

        Raises:
            GuardExceededError: if k exceeds the Kendall enumeration guard
        """
        if k > settings.kendall_guard:
            raise GuardExceededError(f"kendall_class_average enumerates k! permutations; k <= {settings.kendall_guard}")
        totals: Dict[Partition, Fraction] = defaultdict(Fraction)
        counts: Dict[Partition, int] = defaultdict(int)
        for sigma in perm.all_permutations(k):
            parts = perm.cycle_type(sigma)
            totals[parts] += perm.inversions(sigma)
            counts[parts] += 1
        return CharacterService.from_values(k, {mu: float(totals[mu] / counts[mu]) for mu in totals})

    @staticmethod
    def composite_cost(k: int, components: Sequence[Tuple[ClassFunction, float]]) -> ClassFunction:
        """
        Weighted sum of class functions

        Raises:
            DomainMismatchError: if a component lives on another S_k
        """
        totals = {mu: 0.0 for mu in CharacterService.partitions(k)}
        for f, weight in components:
            if f.k != k:
                raise DomainMismatchError(f"component over S_{f.k} in a composite over S_{k}")
            for mu, value in CharacterService.class_values(f).items():
                totals[mu] += weight * value
        return CharacterService.from_values(k, totals)

    # ============================================
    # Irrep-label sampling
    # ============================================

    @staticmethod
    def sk_measurement_distribution(f: ClassFunction) -> SkDistribution:
        """
        Irrep labels with probability proportional to d^2 c^2; trivial mass kept apart

        Raises:
            LinearisationError: if every coefficient vanishes
        """
        coefficients = CharacterService.class_dft(f).coefficient_map()
        trivial = (f.k,)
        weights = {
            lam: CharacterService.hook_dimension(lam) ** 2 * c * c for lam, c in coefficients.items() if c != 0.0
        }
        total = sum(weights.values())
        if total == 0.0:
            raise LinearisationError("zero spectrum: the class function vanishes identically")
        non_trivial = {lam: w for lam, w in weights.items() if lam != trivial}
        mass = sum(non_trivial.values())
        labels = tuple(sorted(non_trivial, reverse=True))
        return SkDistribution(
            k=f.k,
            trivial_mass=weights.get(trivial, 0.0) / total,
            labels=labels,
            probabilities=tuple(non_trivial[lam] / mass for lam in labels),
        )

    @staticmethod
    def _query_coefficient(f: ClassFunction, lam: Partition) -> float:
        """c_lambda = (1/k!) sum_mu |class mu| f(mu) chi^lambda(mu)"""
        sizes = CharacterService.class_sizes(f.k)
        values = CharacterService.class_values(f)
        return sum(sizes[mu] * values[mu] * CharacterService.character(lam, mu) for mu in sizes) / math.factorial(f.k)

    @staticmethod
    def sk_recover_support(
        f: ClassFunction, T: Optional[int] = None, seed: int = None, max_retries: int = None
    ) -> Dict[Partition, float]:
        """
        Sample irrep labels until every active one is seen, then read each c_lambda

        Args:
            T: draws per attempt (defaults to the coupon bound for the active labels)

        Raises:
            SamplingBudgetError: if labels are still missing after the retries
        """
        seed = settings.default_seed if seed is None else seed
        max_retries = settings.max_retries if max_retries is None else max_retries
        distribution = SymmetricService.sk_measurement_distribution(f)
        recovered: Dict[Partition, float] = {}
        trivial = (f.k,)
        if distribution.trivial_mass > 0.0:
            recovered[trivial] = SymmetricService._query_coefficient(f, trivial)
        if not distribution.labels:
            return recovered

        s = len(distribution.labels)
        T = T or SamplerService.coupon_draws(s, settings.delta)
        seen: Set[int] = set()
        for attempt in range(max_retries + 1):
            draws = trial_rng(seed, attempt).choice(s, size=T, p=np.asarray(distribution.probabilities))
            seen.update(int(d) for d in draws)
            if len(seen) == s:
                break
        else:
            missing = tuple(lam for index, lam in enumerate(distribution.labels) if index not in seen)
            mass = sum(p for index, p in enumerate(distribution.probabilities) if index not in seen)
            raise SamplingBudgetError(
                f"{len(missing)} irrep labels unseen after {max_retries} retries", missing=missing, missing_mass=mass
            )

        for lam in distribution.labels:
            recovered[lam] = SymmetricService._query_coefficient(f, lam)
        logger.debug(f"Recovered {len(recovered)} coefficients of a class function on S_{f.k}")
        return recovered

    # ============================================
    # Solvers
    # ============================================

    @staticmethod
    def minimizing_classes(f: ClassFunction) -> List[Partition]:
        """Minimising cycle types ordered by their lexicographically smallest member"""
        values = CharacterService.class_values(f)
        low = min(values.values())
        classes = [mu for mu, v in values.items() if v <= low + settings.reconstruction_tolerance]
        return sorted(classes, key=perm.class_representative)

    @staticmethod
    def _propagate(instance: NetworkInstance, tree: SpanningTree, relatives: Sequence[Permutation]) -> List[Permutation]:
        """sigma_root = e; tree edge (i, j) enforces sigma_i^{-1} sigma_j = relatives[e]"""
        sigma: List[Permutation] = [perm.identity(instance.order)] * instance.n
        for node in tree.order[1:]:
            e = tree.parent_edge[node]
            i, j = instance.graph.edges[e]
            if node == j:
                sigma[j] = perm.compose(sigma[i], relatives[e])
            else:
                sigma[i] = perm.compose(sigma[j], perm.inverse(relatives[e]))
        return sigma

    @staticmethod
    def _close_cycles(
        instance: NetworkInstance,
        tree: SpanningTree,
        relatives: Sequence[Permutation],
        classes: Sequence[Sequence[Partition]],
    ) -> Tuple[bool, List[CycleRecord], List[Permutation]]:
        """Holonomy of every fundamental cycle for one choice of tree-edge relatives"""
        sigma = SymmetricService._propagate(instance, tree, relatives)
        selection = list(relatives)
        cycles = []
        consistent = True
        for e in tree.non_tree_edges:
            i, j = instance.graph.edges[e]
            forced = perm.relative(sigma[i], sigma[j])
            if perm.cycle_type(forced) in classes[e]:
                selection[e] = forced
            else:
                consistent = False
            walk = ((i, j, 1),) + tuple(tree_walk(instance, tree, j, i))
            holonomy = perm.compose(perm.inverse(selection[e]), forced)
            cycles.append(CycleRecord(closing_edge=(i, j), walk=walk, holonomy=holonomy))
        return consistent, cycles, selection

    @staticmethod
    def sk_detect_frustration(
        instance: NetworkInstance,
        relatives: Optional[Sequence[Permutation]] = None,
        classes: Optional[Sequence[Sequence[Partition]]] = None,
    ) -> HolonomyReport:
        """
        Permutation holonomy of every fundamental cycle

        Tree edges take relative permutations from their allowed classes (the
        minimising classes by default). A non-tree edge is consistent when the
        relative permutation the tree forces on it lies in an allowed class; its
        selection then becomes that permutation and the holonomy is the identity.
        Without explicit relatives, every member of the allowed classes is tried
        on the tree edges in lexicographic order while the search space stays
        within the tie-search guard; beyond it only class representatives are
        tried and a failure is reported as undetermined.
        """
        _require_symmetric(instance, "sk_detect_frustration")
        k = instance.order
        tree = spanning_tree(instance)
        if classes is None:
            classes = [SymmetricService.minimizing_classes(f) for f in instance.costs]
        representatives = [perm.class_representative(allowed[0]) for allowed in classes]

        def report(selection, cycles, status) -> HolonomyReport:
            logger.debug(f"S_{k} holonomy check: beta={len(cycles)}, {status.value}")
            return HolonomyReport(
                cycle_rank=len(tree.non_tree_edges),
                cycles=tuple(cycles),
                status=status,
                tree_edges=tuple(instance.graph.edges[e] for e in tree.tree_edges),
                selection=tuple(selection),
            )

        if relatives is not None:
            consistent, cycles, selection = SymmetricService._close_cycles(instance, tree, relatives, classes)
            return report(selection, cycles, FrustrationStatus.FREE if consistent else FrustrationStatus.FRUSTRATED)

        sizes = CharacterService.class_sizes(k)
        space = math.prod(sum(sizes[mu] for mu in classes[e]) for e in tree.tree_edges)
        if space > settings.tie_search_guard:
            consistent, cycles, selection = SymmetricService._close_cycles(instance, tree, representatives, classes)
            if consistent:
                return report(selection, cycles, FrustrationStatus.FREE)
            logger.warning(f"Relative-permutation search space {space} exceeds the tie-search guard; frustration undetermined")
            return report(selection, cycles, FrustrationStatus.UNDETERMINED)

        candidates = [
            sorted(member for mu in classes[e] for member in perm.class_members(mu)) for e in tree.tree_edges
        ]
        first = None
        for choice in itertools.product(*candidates):
            relatives = list(representatives)
            for e, member in zip(tree.tree_edges, choice):
                relatives[e] = member
            consistent, cycles, selection = SymmetricService._close_cycles(instance, tree, relatives, classes)
            if consistent:
                return report(selection, cycles, FrustrationStatus.FREE)
            first = first or (selection, cycles)
        selection, cycles = first
        return report(selection, cycles, FrustrationStatus.FRUSTRATED)

    @staticmethod
    def dmpc_solve(instance: NetworkInstance, minimizer_hint: Optional[Sequence[Partition]] = None) -> Assignment:
        """
        Tree propagation of minimising relative permutations with sigma_root = e

        Args:
            minimizer_hint: one minimising cycle type per edge, known in advance

        Raises:
            InstanceValidationError: if a hint is not a partition of k
            FrustrationError: if the edges cannot all sit in a minimising class
        """
        _require_symmetric(instance, "dmpc_solve")
        k = instance.order
        if minimizer_hint is not None:
            if len(minimizer_hint) != instance.m:
                raise InstanceValidationError(f"hint has {len(minimizer_hint)} classes for {instance.m} edges", path="hint")
            classes = []
            for index, parts in enumerate(minimizer_hint):
                parts = tuple(sorted(parts, reverse=True))
                if not is_partition(parts, k):
                    raise InstanceValidationError(f"{parts} is not a cycle type of S_{k}", path=f"hint[{index}]")
                classes.append([parts])
        else:
            classes = [SymmetricService.minimizing_classes(f) for f in instance.costs]

        report = SymmetricService.sk_detect_frustration(instance, classes=classes)
        if report.status != FrustrationStatus.FREE:
            logger.error(f"S_{k} instance {report.status.value} on {report.cycle_rank} fundamental cycles")
            raise FrustrationError(
                f"{report.status.value} S_k instance: minimising permutations cannot be realised together", report
            )
        sigma = SymmetricService._propagate(instance, spanning_tree(instance), report.selection)
        return InstanceService.assignment(instance, sigma)

    @staticmethod
    def sk_brute_force_solve(instance: NetworkInstance) -> Assignment:
        _require_symmetric(instance, "sk_brute_force_solve")
        return SolverService.brute_force_solve(instance)

    # ============================================
    # Query complexity
    # ============================================

    @staticmethod
    def query_table(k_values: Sequence[int], m: int = 10, r: int = 3) -> List[QueryRow]:
        """quantum = m r k^2 ceil(log2 k), classical = m k!, exact"""
        rows = []
        for k in k_values:
            if k < 2:
                raise UsageError("query_table needs k >= 2")
            quantum = m * r * k * k * (k - 1).bit_length()
            classical = m * math.factorial(k)
            rows.append(QueryRow(
                k=k, group_order=math.factorial(k), quantum=quantum, classical=classical,
                speedup=Fraction(classical, quantum),
            ))
        return rows

    @staticmethod
    def crossover(rows: Sequence[QueryRow]) -> Optional[int]:
        """Smallest k whose speedup exceeds 1"""
        return next((row.k for row in rows if row.speedup > 1), None)

    # ============================================
    # Extremal conjugacy classes
    # ============================================

    @staticmethod
    def distinct_parts_coverage(k: int, threshold: int) -> Fraction:
        """Exact fraction of partitions of k with at most `threshold` distinct part sizes"""
        partitions = CharacterService.partitions(k)
        return Fraction(sum(1 for mu in partitions if len(set(mu)) <= threshold), len(partitions))

    @staticmethod
    def _ecc_trial(
        table: np.ndarray, classes: List[Partition], candidates: np.ndarray, r: int, seed: int, trial: int
    ) -> int:
        rng = trial_rng(seed, trial)
        chosen = rng.choice(candidates, size=r, replace=False)
        coefficients = rng.uniform(-1.0, 1.0, size=r)
        while np.any(np.abs(coefficients) < 0.01):
            small = np.abs(coefficients) < 0.01
            coefficients[small] = rng.uniform(-1.0, 1.0, size=int(small.sum()))
        values = coefficients @ table[chosen]
        best = int(np.flatnonzero(values <= values.min() + settings.reconstruction_tolerance)[0])
        return len(set(classes[best]))

    @staticmethod
    def ecc_experiment(k: int, r: int, trials: int, seed: int, threads: int = None) -> EccStatistics:
        """
        Do minimisers of random r-sparse class functions have at most r distinct part sizes?

        Coefficients sit on r distinct non-trivial irreps, uniform on [-1, 1] with |c| >= 0.01.

        Raises:
            GuardExceededError: if k exceeds the ECC guard
        """
        if k > settings.ecc_guard:
            raise GuardExceededError(f"ecc_experiment needs k <= {settings.ecc_guard}")
        table_model = CharacterService.character_table(k)
        classes = list(table_model.classes)
        table = np.array(table_model.values, dtype=float)
        candidates = np.array([index for index, lam in enumerate(table_model.irreps) if lam != (k,)])
        if r < 1 or r > len(candidates):
            raise UsageError(f"r must lie in [1, {len(candidates)}] for k={k}")
        threads = threads or settings.threads
        with ThreadPoolExecutor(max_workers=threads) as pool:
            distinct = list(pool.map(
                lambda trial: SymmetricService._ecc_trial(table, classes, candidates, r, seed, trial), range(trials)
            ))
        histogram: Dict[int, int] = defaultdict(int)
        for count in distinct:
            histogram[count] += 1
        outside = sum(1 for count in distinct if count > r) / trials
        logger.info(f"ECC k={k} r={r}: {outside:.3f} of {trials} minimisers outside the extremal set")
        return EccStatistics(
            k=k, r=r, trials=trials, seed=seed,
            fraction_outside=outside,
            max_distinct_parts=max(distinct),
            distinct_parts_histogram=dict(sorted(histogram.items())),
        )

    # ============================================
    # Abelian index
    # ============================================

    @staticmethod
    def largest_abelian_order(k: int) -> int:
        """max over partitions of k of the product of parts (orbits of a regular abelian action)"""
        return max(math.prod(mu) for mu in CharacterService.partitions(k))

    @staticmethod
    def abelian_index(group: Union[str, Tuple[DomainKind, int]], mode: str = "exact") -> AbelianIndex:
        """
        alpha(G) = |G| / largest abelian subgroup order

        Args:
            group: descriptor such as 'Z12', 'D8', 'S5' or (DomainKind, order)
            mode: 'exact', 'brute' (S_k search, k <= abelian guard) or 'formula' (k!/3^{k/3}, asymptotic)

        Raises:
            UnsupportedGroupError: unknown descriptor or mode
        """
        kind, order = parse_group(group) if isinstance(group, str) else group
        if kind == DomainKind.CYCLIC:
            return AbelianIndex(group=f"Z{order}", order=order, largest_abelian=order, alpha=Fraction(1), mode="exact")
        if kind == DomainKind.DIHEDRAL:
            largest = 2 * order if order <= 2 else order
            return AbelianIndex(
                group=f"D{order}", order=2 * order, largest_abelian=largest,
                alpha=Fraction(2 * order, largest), mode="exact",
            )
        k = order
        size = math.factorial(k)
        if mode == "formula":
            return AbelianIndex(
                group=f"S{k}", order=size, alpha=Fraction(size) / Fraction(3 ** (k / 3)), mode=mode, asymptotic=True,
            )
        if mode == "brute":
            if k > settings.abelian_brute_guard:
                raise GuardExceededError(f"abelian subgroup search needs k <= {settings.abelian_brute_guard}")
            largest = _largest_abelian_brute(k)
        elif mode == "exact":
            largest = SymmetricService.largest_abelian_order(k)
        else:
            raise UnsupportedGroupError(f"unknown abelian index mode {mode!r}")
        return AbelianIndex(group=f"S{k}", order=size, largest_abelian=largest, alpha=Fraction(size, largest), mode=mode)

    @staticmethod
    def fundamental_ineq_check(k: int) -> Tuple[bool, int, Fraction]:
        """
        d_max(S_k) <= alpha(S_k) with exact alpha

        Raises:
            GuardExceededError: if k exceeds the abelian guard
        """
        if k > settings.abelian_brute_guard:
            raise GuardExceededError(f"exact abelian index needs k <= {settings.abelian_brute_guard}")
        d_max = max(CharacterService.hook_dimension(lam) for lam in CharacterService.partitions(k))
        alpha = SymmetricService.abelian_index((DomainKind.SYMMETRIC, k)).alpha
        return d_max <= alpha, d_max, alpha
