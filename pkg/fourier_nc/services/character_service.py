"""
Character Service
Partitions, hook-length dimensions, Murnaghan-Nakayama characters and the class-function DFT on S_k
"""
import logging
from collections import Counter
from functools import lru_cache
from math import factorial, prod
from typing import Dict, Iterator, List, Mapping, Tuple

import pandas as pd

from fourier_nc.config import settings
from fourier_nc.exceptions import DomainMismatchError, GuardExceededError, InstanceValidationError
from fourier_nc.models import CharacterTable, ClassFunction, ClassValue, IrrepCoefficient, Partition, is_partition

logger = logging.getLogger(__name__)


def _partitions_bounded(n: int, largest: int) -> Iterator[Partition]:
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions_bounded(n - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _partitions(k: int) -> Tuple[Partition, ...]:
    return tuple(_partitions_bounded(k, k))


def _beta_set(shape: Partition) -> Tuple[int, ...]:
    length = len(shape)
    return tuple(part + length - 1 - index for index, part in enumerate(shape))


def _normalize(beads: Tuple[int, ...]) -> Tuple[int, ...]:
    """Drop beads sitting at 0, 1, ... (zero-length rows) so equal shapes share a cache key"""
    beads = tuple(sorted(beads, reverse=True))
    while beads and beads[-1] == 0:
        beads = tuple(b - 1 for b in beads[:-1])
    return beads


@lru_cache(maxsize=None)
def _murnaghan_nakayama(beads: Tuple[int, ...], cycles: Tuple[int, ...]) -> int:
    if not cycles:
        return 1
    length, rest = cycles[0], cycles[1:]
    occupied = set(beads)
    total = 0
    for bead in beads:
        target = bead - length
        if target < 0 or target in occupied:
            continue
        # rim-hook height = beads jumped over
        height = sum(1 for other in beads if target < other < bead)
        moved = _normalize(tuple(b if b != bead else target for b in beads))
        total += (-1 if height % 2 else 1) * _murnaghan_nakayama(moved, rest)
    return total


class CharacterService:
    """Service for the representation theory of S_k needed by the class-function solver"""

    @staticmethod
    def partitions(k: int) -> List[Partition]:
        """
        All partitions of k in descending lexicographic order

        Raises:
            GuardExceededError: if k exceeds the partition guard
        """
        if k < 1:
            raise InstanceValidationError("k must be >= 1", path="k")
        if k > settings.partition_guard:
            raise GuardExceededError(f"partitions of k={k} exceed the guard k <= {settings.partition_guard}")
        return list(_partitions(k))

    @staticmethod
    def conjugate(shape: Partition) -> Partition:
        return tuple(sum(1 for part in shape if part > column) for column in range(shape[0])) if shape else ()

    @staticmethod
    def hook_lengths(shape: Partition) -> List[List[int]]:
        columns = CharacterService.conjugate(shape)
        return [
            [(row_length - j) + (columns[j] - i) - 1 for j in range(row_length)]
            for i, row_length in enumerate(shape)
        ]

    @staticmethod
    def hook_dimension(shape: Partition) -> int:
        """d_lambda = k! / prod h(i, j), exact"""
        if not is_partition(tuple(shape)):
            raise InstanceValidationError(f"{shape} is not a partition", path="lambda")
        hooks = prod(h for row in CharacterService.hook_lengths(tuple(shape)) for h in row)
        return factorial(sum(shape)) // hooks

    @staticmethod
    def character(shape: Partition, cycle_type: Partition) -> int:
        """
        chi^lambda evaluated on the class of the given cycle type (Murnaghan-Nakayama)

        Raises:
            DomainMismatchError: if lambda and mu partition different k
        """
        shape, cycle_type = tuple(shape), tuple(cycle_type)
        if sum(shape) != sum(cycle_type):
            raise DomainMismatchError(f"lambda {shape} and mu {cycle_type} partition different k")
        return _murnaghan_nakayama(_normalize(_beta_set(shape)), cycle_type)

    @staticmethod
    def centralizer_order(cycle_type: Partition) -> int:
        """z_mu = prod l^{m_l} m_l!"""
        return prod(length ** count * factorial(count) for length, count in Counter(cycle_type).items())

    @staticmethod
    def class_sizes(k: int) -> Dict[Partition, int]:
        order = factorial(k)
        return {mu: order // CharacterService.centralizer_order(mu) for mu in CharacterService.partitions(k)}

    @staticmethod
    @lru_cache(maxsize=32)
    def character_table(k: int) -> CharacterTable:
        classes = CharacterService.partitions(k)
        sizes = CharacterService.class_sizes(k)
        logger.debug(f"Building character table of S_{k} ({len(classes)} classes)")
        return CharacterTable(
            k=k,
            irreps=tuple(classes),
            classes=tuple(classes),
            values=tuple(tuple(CharacterService.character(lam, mu) for mu in classes) for lam in classes),
            class_sizes=tuple(sizes[mu] for mu in classes),
        )

    @staticmethod
    def character_table_csv(k: int) -> str:
        """Integer CSV, header = class cycle types, one row per irrep"""
        table = CharacterService.character_table(k)

        def label(parts: Partition) -> str:
            return "(" + " ".join(str(p) for p in parts) + ")"

        frame = pd.DataFrame(
            [list(row) for row in table.values],
            index=pd.Index([label(lam) for lam in table.irreps], name="irrep"),
            columns=[label(mu) for mu in table.classes],
        )
        return frame.to_csv(lineterminator="\n")

    # ============================================
    # Class functions
    # ============================================

    @staticmethod
    def synthesize(k: int, coefficients: Mapping[Partition, float]) -> Dict[Partition, float]:
        """f(mu) = sum_lambda c_lambda chi^lambda(mu) for every class"""
        return {
            mu: float(sum(c * CharacterService.character(lam, mu) for lam, c in coefficients.items() if c != 0.0))
            for mu in CharacterService.partitions(k)
        }

    @staticmethod
    def analyze(k: int, values: Mapping[Partition, float]) -> Dict[Partition, float]:
        """c_lambda = (1/k!) sum_mu |class mu| f(mu) chi^lambda(mu), pruned at the tolerance"""
        order = factorial(k)
        sizes = CharacterService.class_sizes(k)
        coefficients = {}
        for lam in CharacterService.partitions(k):
            total = sum(sizes[mu] * values[mu] * CharacterService.character(lam, mu) for mu in sizes)
            c = total / order
            if abs(c) > settings.prune_tolerance:
                coefficients[lam] = c
        return coefficients

    @staticmethod
    def class_values(f: ClassFunction) -> Dict[Partition, float]:
        """Complete value form of a class function"""
        values = f.value_map()
        if values:
            missing = [mu for mu in CharacterService.partitions(f.k) if mu not in values]
            if not missing:
                return values
            if not f.coefficients:
                raise InstanceValidationError(f"class function misses values for {missing[:3]}", path="values")
        return CharacterService.synthesize(f.k, f.coefficient_map())

    @staticmethod
    def evaluate(f: ClassFunction, cycle_type: Partition) -> float:
        values = f.value_map()
        if cycle_type in values:
            return values[cycle_type]
        return float(sum(c * CharacterService.character(lam, cycle_type) for lam, c in f.coefficient_map().items()))

    @staticmethod
    def class_dft(f: ClassFunction) -> ClassFunction:
        """Return f with both forms filled; coefficients are the sparse c_lambda"""
        values = CharacterService.class_values(f)
        coefficients = CharacterService.analyze(f.k, values)
        return ClassFunction(
            k=f.k,
            class_values=tuple(ClassValue(cycle_type=mu, value=v) for mu, v in values.items()),
            coefficients=tuple(IrrepCoefficient(irrep=lam, coeff=c) for lam, c in coefficients.items()),
        )

    @staticmethod
    def from_coefficients(k: int, coefficients: Mapping[Partition, float]) -> ClassFunction:
        values = CharacterService.synthesize(k, coefficients)
        return ClassFunction(
            k=k,
            class_values=tuple(ClassValue(cycle_type=mu, value=v) for mu, v in values.items()),
            coefficients=tuple(
                IrrepCoefficient(irrep=tuple(lam), coeff=float(c)) for lam, c in coefficients.items() if c != 0.0
            ),
        )

    @staticmethod
    def from_values(k: int, values: Mapping[Partition, float]) -> ClassFunction:
        return CharacterService.class_dft(ClassFunction(
            k=k,
            class_values=tuple(ClassValue(cycle_type=tuple(mu), value=float(v)) for mu, v in values.items()),
        ))

    @staticmethod
    def validate(f: ClassFunction) -> None:
        """
        Check that the value and coefficient forms agree

        Raises:
            InstanceValidationError: if they differ by more than the reconstruction tolerance
        """
        if not (f.class_values and f.coefficients):
            CharacterService.class_values(f)
            return
        synthesized = CharacterService.synthesize(f.k, f.coefficient_map())
        for mu, value in CharacterService.class_values(f).items():
            if abs(synthesized[mu] - value) > settings.reconstruction_tolerance:
                raise InstanceValidationError(
                    f"value {value} on class {mu} disagrees with coefficient form ({synthesized[mu]})",
                    path="cost",
                )
