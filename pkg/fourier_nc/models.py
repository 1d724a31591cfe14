"""
Pydantic models for the Fourier-NC laboratory
Defines the problem representation, spectra, measurement records and reports
"""
from fractions import Fraction
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Partition = Tuple[int, ...]
Permutation = Tuple[int, ...]
ModeLabel = Tuple[int, int, int]  # (i, j, k_i)
GroupElement = Union[int, Tuple[int, ...]]


def is_partition(parts: Tuple[int, ...], k: Optional[int] = None) -> bool:
    """True when parts are positive, non-increasing and (optionally) sum to k"""
    if not parts or any(p <= 0 for p in parts):
        return False
    if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
        return False
    return k is None or sum(parts) == k


class DomainKind(str, Enum):
    """Group over which node elements live"""
    CYCLIC = "cyclic"
    DIHEDRAL = "dihedral"
    SYMMETRIC = "symmetric"


class CostKind(str, Enum):
    """Cost function families"""
    TABLE = "table"
    COSINE = "cosine"
    PWL = "pwl"
    CLASS = "class"


class FrustrationStatus(str, Enum):
    """Outcome of the holonomy check"""
    FREE = "frustration-free"
    FRUSTRATED = "frustrated"
    UNDETERMINED = "undetermined"


# ============================================
# Core problem representation
# ============================================

class Graph(BaseModel):
    """Network with n nodes and an ordered edge list"""
    model_config = ConfigDict(frozen=True)

    node_count: int = Field(ge=1)
    edges: Tuple[Tuple[int, int], ...] = ()
    directed: bool = False

    @model_validator(mode="after")
    def _check_edges(self) -> "Graph":
        seen = set()
        for index, (i, j) in enumerate(self.edges):
            if not (0 <= i < self.node_count and 0 <= j < self.node_count):
                raise ValueError(f"edge {index} ({i}, {j}) has a node index outside [0, {self.node_count})")
            if i == j:
                raise ValueError(f"edge {index} ({i}, {j}) is a self-loop")
            if not self.directed and i > j:
                raise ValueError(f"edge {index} ({i}, {j}) must be stored with i < j in an undirected graph")
            key = (i, j) if self.directed else (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"edge {index} ({i}, {j}) is a duplicate")
            seen.add(key)
        return self

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def cycle_rank(self) -> int:
        """beta = m - n + 1 for a connected graph"""
        return self.edge_count - self.node_count + 1

    def degrees(self) -> List[int]:
        degree = [0] * self.node_count
        for i, j in self.edges:
            degree[i] += 1
            degree[j] += 1
        return degree

    @property
    def max_degree(self) -> int:
        return max(self.degrees()) if self.edges else 0


class Breakpoint(BaseModel):
    """Corner of a periodic piecewise-linear cost"""
    model_config = ConfigDict(frozen=True)

    position: float = Field(ge=0)
    value: float


class CostFunction(BaseModel):
    """Edge cost over Z_C (or D_C as a 2C-entry table)

    table:  values[x] for every group element
    cosine: f(x) = sum_l weights[l-1] * cos(2*pi*l*x/C)
    pwl:    periodic linear interpolation through breakpoints, optionally
            truncated to the first `harmonics` Fourier harmonics
    """
    model_config = ConfigDict(frozen=True)

    kind: CostKind
    cycle_length: int = Field(ge=2)
    values: Tuple[float, ...] = ()
    weights: Tuple[float, ...] = ()
    breakpoints: Tuple[Breakpoint, ...] = ()
    harmonics: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _check_variant(self) -> "CostFunction":
        C = self.cycle_length
        if self.kind == CostKind.TABLE:
            if len(self.values) not in (C, 2 * C):
                raise ValueError(f"table has {len(self.values)} values, expected {C} (or {2 * C} over D_C)")
        elif self.kind == CostKind.COSINE:
            if not self.weights:
                raise ValueError("cosine cost needs at least one harmonic weight")
            if any(w <= 0 for w in self.weights):
                raise ValueError("cosine weights must be strictly positive")
            if len(self.weights) > C // 2:
                raise ValueError(f"{len(self.weights)} harmonics alias on a cycle of length {C}")
        elif self.kind == CostKind.PWL:
            if len(self.breakpoints) < 2:
                raise ValueError("pwl cost needs at least 2 breakpoints")
            positions = [b.position for b in self.breakpoints]
            if any(p >= C for p in positions):
                raise ValueError(f"pwl breakpoint positions must lie in [0, {C})")
            if any(positions[i] >= positions[i + 1] for i in range(len(positions) - 1)):
                raise ValueError("pwl breakpoints must be sorted by strictly increasing position")
        else:
            raise ValueError("class costs are ClassFunction objects, not CostFunction")
        return self

    @property
    def group_size(self) -> int:
        if self.kind == CostKind.TABLE:
            return len(self.values)
        return self.cycle_length


class ClassValue(BaseModel):
    """Value of a class function on one conjugacy class"""
    model_config = ConfigDict(frozen=True)

    cycle_type: Partition
    value: float


class IrrepCoefficient(BaseModel):
    """Coefficient c_lambda of the character chi^lambda"""
    model_config = ConfigDict(frozen=True)

    irrep: Partition
    coeff: float


class ClassFunction(BaseModel):
    """Function on S_k constant on conjugacy classes

    Holds the value form (per cycle type), the coefficient form
    f = sum_lambda c_lambda chi^lambda, or both.
    """
    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    class_values: Tuple[ClassValue, ...] = ()
    coefficients: Tuple[IrrepCoefficient, ...] = ()

    @model_validator(mode="after")
    def _check_forms(self) -> "ClassFunction":
        if not self.class_values and not self.coefficients:
            raise ValueError("class function needs values or coefficients")
        for entry in self.class_values:
            if not is_partition(entry.cycle_type, self.k):
                raise ValueError(f"{entry.cycle_type} is not a partition of {self.k}")
        for entry in self.coefficients:
            if not is_partition(entry.irrep, self.k):
                raise ValueError(f"{entry.irrep} is not a partition of {self.k}")
        return self

    @property
    def sparsity(self) -> int:
        return sum(1 for c in self.coefficients if c.coeff != 0.0)

    def value_map(self) -> Dict[Partition, float]:
        return {entry.cycle_type: entry.value for entry in self.class_values}

    def coefficient_map(self) -> Dict[Partition, float]:
        return {entry.irrep: entry.coeff for entry in self.coefficients}


EdgeCost = Union[CostFunction, ClassFunction]


class NetworkInstance(BaseModel):
    """Graph + group + per-edge costs: the problem being solved"""
    model_config = ConfigDict(frozen=True)

    graph: Graph
    domain: DomainKind
    order: int = Field(ge=2, description="C for cyclic/dihedral, k for symmetric")
    costs: Tuple[EdgeCost, ...]
    name: Optional[str] = None

    @model_validator(mode="after")
    def _check_costs(self) -> "NetworkInstance":
        if len(self.costs) != self.graph.edge_count:
            raise ValueError(f"{len(self.costs)} costs for {self.graph.edge_count} edges")
        for index, cost in enumerate(self.costs):
            if self.domain == DomainKind.SYMMETRIC:
                if not isinstance(cost, ClassFunction) or cost.k != self.order:
                    raise ValueError(f"edge {index} needs a class function over S_{self.order}")
                continue
            if not isinstance(cost, CostFunction) or cost.cycle_length != self.order:
                raise ValueError(f"edge {index} needs a cost over a cycle of length {self.order}")
            expected = 2 * self.order if self.domain == DomainKind.DIHEDRAL else self.order
            if cost.group_size != expected:
                raise ValueError(f"edge {index} cost covers {cost.group_size} elements, expected {expected}")
        return self

    @property
    def n(self) -> int:
        return self.graph.node_count

    @property
    def m(self) -> int:
        return self.graph.edge_count


class Assignment(BaseModel):
    """One group element per node: offsets, (rotation, reflection) pairs or permutations"""
    model_config = ConfigDict(frozen=True)

    domain: DomainKind
    order: int = Field(ge=2)
    elements: Tuple[GroupElement, ...]

    @model_validator(mode="after")
    def _check_elements(self) -> "Assignment":
        for index, element in enumerate(self.elements):
            if self.domain == DomainKind.CYCLIC:
                ok = isinstance(element, int) and 0 <= element < self.order
            elif self.domain == DomainKind.DIHEDRAL:
                ok = (
                    isinstance(element, tuple) and len(element) == 2
                    and 0 <= element[0] < self.order and element[1] in (0, 1)
                )
            else:
                ok = isinstance(element, tuple) and sorted(element) == list(range(self.order))
            if not ok:
                raise ValueError(f"element {index} ({element}) is not a valid {self.domain.value} group element")
        return self

    @property
    def n(self) -> int:
        return len(self.elements)


# ============================================
# Abelian Fourier structures
# ============================================

class SpectralCoefficient(BaseModel):
    """(frequency, complex coefficient) pair"""
    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=0)
    re: float
    im: float

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    @property
    def weight(self) -> float:
        """Squared magnitude |f(k)|^2"""
        return self.re * self.re + self.im * self.im


class EdgeSpectrum(BaseModel):
    """Sparse DFT of one edge cost"""
    model_config = ConfigDict(frozen=True)

    edge: Tuple[int, int]
    cycle_length: int = Field(ge=2)
    coefficients: Tuple[SpectralCoefficient, ...]

    @property
    def sparsity(self) -> int:
        return len(self.coefficients)

    def coefficient(self, k: int) -> complex:
        for entry in self.coefficients:
            if entry.k == k:
                return entry.value
        return 0j

    @property
    def frequencies(self) -> Tuple[int, ...]:
        return tuple(entry.k for entry in self.coefficients)


class GlobalMode(BaseModel):
    """Non-zero frequency vector supported on one edge's anti-diagonal"""
    model_config = ConfigDict(frozen=True)

    edge: Tuple[int, int]
    k_i: int = Field(ge=1)
    cycle_length: int = Field(ge=2)
    re: float
    im: float

    @property
    def k_j(self) -> int:
        return (-self.k_i) % self.cycle_length

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    @property
    def weight(self) -> float:
        return self.re * self.re + self.im * self.im

    @property
    def label(self) -> ModeLabel:
        return (self.edge[0], self.edge[1], self.k_i)

    def frequency_vector(self, n: int) -> Tuple[int, ...]:
        vector = [0] * n
        vector[self.edge[0]] = self.k_i
        vector[self.edge[1]] = self.k_j
        return tuple(vector)


class DihedralBlock(BaseModel):
    """Fourier coefficient of one D_C irrep (1x1 or 2x2 complex matrix)"""
    model_config = ConfigDict(frozen=True)

    label: str
    dimension: int = Field(ge=1, le=2)
    frequency: Optional[int] = None
    re: Tuple[Tuple[float, ...], ...]
    im: Tuple[Tuple[float, ...], ...]

    @property
    def energy(self) -> float:
        """d * ||f(rho)||_F^2"""
        total = sum(x * x for row in self.re for x in row) + sum(x * x for row in self.im for x in row)
        return self.dimension * total


class DihedralSpectrum(BaseModel):
    """Per-irrep coefficients of a cost over D_C"""
    model_config = ConfigDict(frozen=True)

    edge: Tuple[int, int]
    cycle_length: int = Field(ge=2)
    blocks: Tuple[DihedralBlock, ...]

    def block(self, label: str) -> DihedralBlock:
        for entry in self.blocks:
            if entry.label == label:
                return entry
        raise KeyError(label)


class LinearisationParams(BaseModel):
    """Phase scaling: K = P * m * max sup|f_ij|"""
    model_config = ConfigDict(frozen=True)

    P: float = Field(ge=1)
    K: float = Field(gt=0)


# ============================================
# Measurement simulation
# ============================================

class MeasurementDistribution(BaseModel):
    """First-order linearised measurement law"""
    model_config = ConfigDict(frozen=True)

    zero_probability: float = Field(ge=0, le=1)
    modes: Tuple[GlobalMode, ...]
    probabilities: Tuple[float, ...]

    @model_validator(mode="after")
    def _check_mass(self) -> "MeasurementDistribution":
        if len(self.modes) != len(self.probabilities):
            raise ValueError("one probability per mode required")
        total = self.zero_probability + sum(self.probabilities)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total}, not 1")
        return self

    @property
    def conditional_probabilities(self) -> Tuple[float, ...]:
        mass = sum(self.probabilities)
        return tuple(p / mass for p in self.probabilities)

    @property
    def labels(self) -> Tuple[ModeLabel, ...]:
        return tuple(mode.label for mode in self.modes)


class MeasurementBatch(BaseModel):
    """Seeded record of simulated outcomes; sequence holds indices into labels, -1 = zero mode"""
    model_config = ConfigDict(frozen=True)

    seed: int
    total: int = Field(ge=1)
    conditional: bool = False
    labels: Tuple[ModeLabel, ...]
    sequence: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_sequence(self) -> "MeasurementBatch":
        if len(self.sequence) != self.total:
            raise ValueError(f"batch holds {len(self.sequence)} samples, declared {self.total}")
        if any(s < -1 or s >= len(self.labels) for s in self.sequence):
            raise ValueError("sample index outside the label table")
        return self

    @property
    def zero_count(self) -> int:
        return sum(1 for s in self.sequence if s == -1)

    def counts(self) -> Dict[ModeLabel, int]:
        tally: Dict[ModeLabel, int] = {}
        for s in self.sequence:
            if s >= 0:
                label = self.labels[s]
                tally[label] = tally.get(label, 0) + 1
        return tally

    def observed(self) -> Tuple[ModeLabel, ...]:
        return tuple(sorted(self.counts()))


class ConvergenceCurve(BaseModel):
    """Mean fraction of distinct modes recovered versus draw count"""
    model_config = ConfigDict(frozen=True)

    draws: Tuple[int, ...]
    mean_fraction: Tuple[float, ...]
    stddev: Tuple[float, ...]
    trials: int = Field(ge=1)
    seed: int
    mode_count: int = Field(ge=1)
    conditional: bool = True
    threshold: float
    crossing: Optional[int] = None


# ============================================
# Reconstruction
# ============================================

class Congruence(BaseModel):
    """Admissible offset differences d = mu_i - mu_j for one edge"""
    model_config = ConfigDict(frozen=True)

    edge: Tuple[int, int]
    cycle_length: int = Field(ge=2)
    multipliers: Tuple[int, ...]
    residues: Tuple[int, ...]
    derivation: Tuple[ModeLabel, ...] = ()

    @field_validator("residues")
    @classmethod
    def _non_empty(cls, residues: Tuple[int, ...]) -> Tuple[int, ...]:
        if not residues:
            raise ValueError("residue set is empty")
        return residues

    @model_validator(mode="after")
    def _in_range(self) -> "Congruence":
        if any(not 0 <= d < self.cycle_length for d in self.residues):
            raise ValueError(f"residues must lie in [0, {self.cycle_length})")
        return self

    @property
    def is_determined(self) -> bool:
        return len(self.residues) == 1


class CycleRecord(BaseModel):
    """Fundamental cycle: oriented edge walk (i, j, sign) and its holonomy"""
    model_config = ConfigDict(frozen=True)

    closing_edge: Tuple[int, int]
    walk: Tuple[Tuple[int, int, int], ...]
    holonomy: Optional[GroupElement] = None


class HolonomyReport(BaseModel):
    """Cycle basis, per-cycle holonomy and frustration verdict"""
    model_config = ConfigDict(frozen=True)

    cycle_rank: int = Field(ge=0)
    cycles: Tuple[CycleRecord, ...]
    status: FrustrationStatus
    tree_edges: Tuple[Tuple[int, int], ...]
    selection: Tuple[Optional[GroupElement], ...] = ()

    @property
    def frustration_free(self) -> Optional[bool]:
        if self.status == FrustrationStatus.UNDETERMINED:
            return None
        return self.status == FrustrationStatus.FREE


class RunReport(BaseModel):
    """End-to-end run summary"""
    method: str
    p_min: Optional[float] = None
    T: int = 0
    modes_expected: int = 0
    modes_collected: int = 0
    retries: int = 0
    cost: float
    optimal: Optional[bool] = None
    oracle_cost: Optional[float] = None
    assignment: Tuple[GroupElement, ...]


# ============================================
# Symmetric group
# ============================================

class CharacterTable(BaseModel):
    """Integer character values chi^lambda(mu), rows = irreps, columns = classes"""
    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    irreps: Tuple[Partition, ...]
    classes: Tuple[Partition, ...]
    values: Tuple[Tuple[int, ...], ...]
    class_sizes: Tuple[int, ...]

    @property
    def dimensions(self) -> Tuple[int, ...]:
        identity = self.classes.index((1,) * self.k)
        return tuple(row[identity] for row in self.values)


class SkDistribution(BaseModel):
    """Irrep-label measurement law with trivial-irrep mass kept apart"""
    model_config = ConfigDict(frozen=True)

    k: int
    trivial_mass: float
    labels: Tuple[Partition, ...]
    probabilities: Tuple[float, ...]


class EccStatistics(BaseModel):
    """Extremal-conjugacy-class experiment summary"""
    model_config = ConfigDict(frozen=True)

    k: int
    r: int
    trials: int
    seed: int
    fraction_outside: float
    max_distinct_parts: int
    distinct_parts_histogram: Dict[int, int] = {}


class AbelianIndex(BaseModel):
    """alpha(G) = |G| / largest abelian subgroup order"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    group: str
    order: int
    largest_abelian: Optional[int] = None
    alpha: Fraction
    mode: str
    asymptotic: bool = False


# ============================================
# Analytics reports
# ============================================

class GateReport(BaseModel):
    """Exact gate-count projection (Fourier-NC edge oracle vs Grover global oracle)"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    m: int
    r: int
    C: int
    q: int
    search_space: int
    gates_per_repetition: int
    repetitions: int
    fourier_total: int
    grover_per_iteration: int
    grover_iterations: int
    grover_total: int
    speedup: Fraction


class QueryRow(BaseModel):
    """Permutation Coordination query counts for one k"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    k: int
    group_order: int
    quantum: int
    classical: int
    speedup: Fraction


class AdversaryRow(BaseModel):
    """Classical query lower bound next to Grover iterations"""
    model_config = ConfigDict(frozen=True)

    n: int
    C: int
    classical_queries: int
    grover_iterations: int


class ValidationRow(BaseModel):
    """One topology of the numerical validation harness"""
    model_config = ConfigDict(frozen=True)

    topology: str
    cost: str
    n: int
    m: int
    r: int
    p_min: float
    bound: float
    ratio: float
    mean_measurements: float
    reference_measurements: int
