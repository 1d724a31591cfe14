"""
Instance Service
Cost-function library, instance (de)serialisation and the exact global cost evaluator
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from fourier_nc.exceptions import DomainMismatchError, InstanceValidationError
from fourier_nc.models import (
    Assignment, Breakpoint, ClassFunction, ClassValue, CostFunction, CostKind, DomainKind,
    EdgeCost, Graph, GroupElement, IrrepCoefficient, NetworkInstance,
)
from fourier_nc.services import permutations as perm
from fourier_nc.services.character_service import CharacterService

logger = logging.getLogger(__name__)


def _location(error: ValidationError) -> str:
    """Dotted field path of the first pydantic error"""
    first = error.errors()[0]
    return ".".join(str(part) for part in first.get("loc", ()))


def _reject_constant(token: str):
    raise InstanceValidationError(f"non-finite number {token} is not permitted")


def _finite_float(token: str) -> float:
    value = float(token)
    if not np.isfinite(value):
        _reject_constant(token)
    return value


def dihedral_multiply(a: Tuple[int, int], b: Tuple[int, int], C: int) -> Tuple[int, int]:
    """(r^a1 s^b1)(r^a2 s^b2) = r^(a1 + (-1)^b1 a2) s^(b1 + b2)"""
    rotation = (a[0] + (b[0] if a[1] == 0 else -b[0])) % C
    return rotation, (a[1] + b[1]) % 2


def dihedral_inverse(a: Tuple[int, int], C: int) -> Tuple[int, int]:
    if a[1] == 1:
        return a
    return (-a[0]) % C, 0


class InstanceService:
    """Service for building, evaluating and (de)serialising Fourier-NC instances"""

    # ============================================
    # Cost functions
    # ============================================

    @staticmethod
    def make_cost(variant: Union[str, CostKind], cycle_length: int, **params: Any) -> CostFunction:
        """
        Build a cost function of the given family

        Args:
            variant: "table", "cosine" or "pwl"
            cycle_length: C
            params: values=[...] | weights=[...] | breakpoints=[(position, value), ...], harmonics=r'

        Returns:
            Validated CostFunction

        Raises:
            InstanceValidationError: if the parameters violate the family's invariants
        """
        kind = CostKind(variant)
        fields: Dict[str, Any] = {"kind": kind, "cycle_length": cycle_length}
        if kind == CostKind.CLASS:
            raise InstanceValidationError("class costs are built by SymmetricService", path="cost.type")
        key = {CostKind.TABLE: "values", CostKind.COSINE: "weights", CostKind.PWL: "breakpoints"}[kind]
        try:
            if kind == CostKind.PWL:
                breakpoints = tuple(
                    b if isinstance(b, Breakpoint) else Breakpoint(position=float(b[0]), value=float(b[1]))
                    for b in params[key]
                )
                numbers = [x for b in breakpoints for x in (b.position, b.value)]
                fields[key] = breakpoints
                fields["harmonics"] = params.get("harmonics")
            else:
                numbers = [float(v) for v in params[key]]
                fields[key] = tuple(numbers)
        except (TypeError, IndexError, ValueError, ValidationError) as e:
            raise InstanceValidationError(f"malformed {key} ({e})", path=f"cost.{key}") from e
        if not np.all(np.isfinite(numbers)):
            raise InstanceValidationError(f"non-finite number in {key}", path=f"cost.{key}")
        try:
            return CostFunction(**fields)
        except ValidationError as e:
            raise InstanceValidationError(e.errors()[0]["msg"], path=f"cost.{_location(e)}".rstrip(".")) from e

    @staticmethod
    def materialize(cost: CostFunction) -> np.ndarray:
        """Exact value table of a cost over its group (length C, or 2C for a D_C table)"""
        C = cost.cycle_length
        if cost.kind == CostKind.TABLE:
            return np.asarray(cost.values, dtype=float)
        x = np.arange(C, dtype=float)
        if cost.kind == CostKind.COSINE:
            table = np.zeros(C)
            for harmonic, weight in enumerate(cost.weights, start=1):
                table += weight * np.cos(2.0 * np.pi * harmonic * x / C)
            return table
        positions = np.array([b.position for b in cost.breakpoints])
        values = np.array([b.value for b in cost.breakpoints])
        table = np.interp(x, positions, values, period=C)
        if cost.harmonics is not None:
            table = InstanceService._truncate_table(table, cost.harmonics)
        return table

    @staticmethod
    def _truncate_table(table: np.ndarray, harmonics: int) -> np.ndarray:
        C = len(table)
        spectrum = np.fft.fft(table)
        k = np.arange(C)
        spectrum[np.minimum(k, C - k) > harmonics] = 0.0
        return np.fft.ifft(spectrum).real

    @staticmethod
    def truncate_harmonics(cost: CostFunction, harmonics: int) -> CostFunction:
        """Keep frequencies {0, +-1, ..., +-harmonics}; pwl costs keep their family"""
        if cost.kind == CostKind.PWL:
            return cost.model_copy(update={"harmonics": harmonics})
        table = InstanceService._truncate_table(InstanceService.materialize(cost), harmonics)
        return InstanceService.make_cost(CostKind.TABLE, cost.cycle_length, values=table.tolist())

    @staticmethod
    def total_variation(cost: CostFunction) -> float:
        """V_f = sum_x |f(x+1) - f(x)| around the cycle"""
        table = InstanceService.materialize(cost)
        return float(np.abs(np.roll(table, -1) - table).sum())

    @staticmethod
    def sup_norm(cost: EdgeCost) -> float:
        if isinstance(cost, ClassFunction):
            return max(abs(v) for v in CharacterService.class_values(cost).values())
        return float(np.abs(InstanceService.materialize(cost)).max())

    # ============================================
    # Instances
    # ============================================

    @staticmethod
    def make_graph(node_count: int, edges: Sequence[Tuple[int, int]], directed: bool = False) -> Graph:
        try:
            return Graph(node_count=node_count, edges=tuple((int(i), int(j)) for i, j in edges), directed=directed)
        except ValidationError as e:
            raise InstanceValidationError(e.errors()[0]["msg"], path="edges") from e

    @staticmethod
    def make_instance(
        graph: Graph,
        domain: Union[str, DomainKind],
        order: int,
        costs: Sequence[EdgeCost],
        name: str = None,
    ) -> NetworkInstance:
        try:
            return NetworkInstance(graph=graph, domain=DomainKind(domain), order=order, costs=tuple(costs), name=name)
        except ValidationError as e:
            raise InstanceValidationError(e.errors()[0]["msg"], path=_location(e) or "instance") from e

    @staticmethod
    def relative_element(instance: NetworkInstance, assignment: Assignment, edge_index: int) -> GroupElement:
        """(mu_i - mu_j) mod C, a_i^{-1} a_j in D_C, or sigma_i^{-1} sigma_j in S_k"""
        i, j = instance.graph.edges[edge_index]
        a, b = assignment.elements[i], assignment.elements[j]
        if instance.domain == DomainKind.CYCLIC:
            return (a - b) % instance.order
        if instance.domain == DomainKind.DIHEDRAL:
            return dihedral_multiply(dihedral_inverse(a, instance.order), b, instance.order)
        return perm.relative(a, b)

    @staticmethod
    def edge_value(instance: NetworkInstance, edge_index: int, element: GroupElement) -> float:
        cost = instance.costs[edge_index]
        if instance.domain == DomainKind.SYMMETRIC:
            return CharacterService.evaluate(cost, perm.cycle_type(element))
        table = InstanceService.materialize(cost)
        if instance.domain == DomainKind.DIHEDRAL:
            rotation, reflection = element
            return float(table[rotation + instance.order * reflection])
        return float(table[element])

    @staticmethod
    def eval_cost(instance: NetworkInstance, assignment: Assignment) -> float:
        """
        Exact global cost H = sum over edges of f_ij(relative element)

        Raises:
            DomainMismatchError: if the assignment is for another group or size
        """
        if assignment.domain != instance.domain or assignment.order != instance.order:
            raise DomainMismatchError(
                f"assignment over {assignment.domain.value}({assignment.order}) "
                f"for instance over {instance.domain.value}({instance.order})"
            )
        if assignment.n != instance.n:
            raise DomainMismatchError(f"assignment has {assignment.n} entries, instance has {instance.n} nodes")

        if instance.domain == DomainKind.CYCLIC:
            offsets = np.asarray(assignment.elements, dtype=int)
            total = 0.0
            for index, (i, j) in enumerate(instance.graph.edges):
                table = InstanceService.materialize(instance.costs[index])
                total += table[(offsets[i] - offsets[j]) % instance.order]
            return float(total)

        return float(sum(
            InstanceService.edge_value(instance, index, InstanceService.relative_element(instance, assignment, index))
            for index in range(instance.m)
        ))

    @staticmethod
    def assignment(instance: NetworkInstance, elements: Sequence[GroupElement]) -> Assignment:
        normalized = []
        for element in elements:
            if instance.domain == DomainKind.CYCLIC:
                normalized.append(int(element))
            else:
                normalized.append(perm.as_tuple(element))
        try:
            return Assignment(domain=instance.domain, order=instance.order, elements=tuple(normalized))
        except ValidationError as e:
            raise DomainMismatchError(e.errors()[0]["msg"]) from e

    # ============================================
    # Serialisation
    # ============================================

    @staticmethod
    def _cost_to_dict(cost: EdgeCost) -> Dict[str, Any]:
        if isinstance(cost, ClassFunction):
            document: Dict[str, Any] = {"type": CostKind.CLASS.value}
            if cost.class_values:
                document["values"] = [
                    {"cycle_type": list(v.cycle_type), "value": v.value} for v in cost.class_values
                ]
            if cost.coefficients:
                document["coefficients"] = [
                    {"irrep": list(c.irrep), "coeff": c.coeff} for c in cost.coefficients
                ]
            return document
        if cost.kind == CostKind.TABLE:
            return {"type": "table", "values": list(cost.values)}
        if cost.kind == CostKind.COSINE:
            return {"type": "cosine", "weights": list(cost.weights)}
        document = {"type": "pwl", "breakpoints": [[b.position, b.value] for b in cost.breakpoints]}
        if cost.harmonics is not None:
            document["harmonics"] = cost.harmonics
        return document

    @staticmethod
    def to_dict(instance: NetworkInstance) -> Dict[str, Any]:
        document: Dict[str, Any] = {
            "domain": {instance.domain.value: instance.order},
            "nodes": instance.n,
            "edges": [
                {"i": i, "j": j, "cost": InstanceService._cost_to_dict(cost)}
                for (i, j), cost in zip(instance.graph.edges, instance.costs)
            ],
        }
        if instance.graph.directed:
            document["directed"] = True
        if instance.name:
            document["name"] = instance.name
        return document

    @staticmethod
    def serialize_instance(instance: NetworkInstance) -> str:
        return json.dumps(InstanceService.to_dict(instance), indent=2, allow_nan=False)

    @staticmethod
    def _cost_from_dict(document: Any, domain: DomainKind, order: int, path: str) -> EdgeCost:
        if not isinstance(document, dict) or "type" not in document:
            raise InstanceValidationError("cost must be an object with a 'type'", path=path)
        kind = document["type"]
        if kind == CostKind.CLASS.value:
            if domain != DomainKind.SYMMETRIC:
                raise InstanceValidationError("class costs need a symmetric domain", path=f"{path}.type")
            try:
                f = ClassFunction(
                    k=order,
                    class_values=tuple(
                        ClassValue(cycle_type=tuple(v["cycle_type"]), value=float(v["value"]))
                        for v in document.get("values", [])
                    ),
                    coefficients=tuple(
                        IrrepCoefficient(irrep=tuple(c["irrep"]), coeff=float(c["coeff"]))
                        for c in document.get("coefficients", [])
                    ),
                )
            except (ValidationError, KeyError, TypeError) as e:
                raise InstanceValidationError(f"invalid class function ({e})", path=path) from e
            try:
                CharacterService.validate(f)
            except InstanceValidationError as e:
                raise InstanceValidationError(str(e), path=path) from e
            return f
        if domain == DomainKind.SYMMETRIC:
            raise InstanceValidationError("symmetric domains need class costs", path=f"{path}.type")
        if kind not in {"table", "cosine", "pwl"}:
            raise InstanceValidationError(f"unknown cost type {kind!r}", path=f"{path}.type")
        params = {key: value for key, value in document.items() if key != "type"}
        try:
            return InstanceService.make_cost(kind, order, **params)
        except KeyError as e:
            raise InstanceValidationError(f"missing parameter {e}", path=path) from e
        except InstanceValidationError as e:
            raise InstanceValidationError(str(e), path=path) from e

    @staticmethod
    def from_dict(document: Any) -> NetworkInstance:
        if not isinstance(document, dict):
            raise InstanceValidationError("instance document must be a JSON object")
        for key in ("domain", "nodes", "edges"):
            if key not in document:
                raise InstanceValidationError("missing field", path=key)

        domain_field = document["domain"]
        if not isinstance(domain_field, dict) or len(domain_field) != 1:
            raise InstanceValidationError("expected exactly one of cyclic/dihedral/symmetric", path="domain")
        (domain_name, order), = domain_field.items()
        try:
            domain = DomainKind(domain_name)
        except ValueError as e:
            raise InstanceValidationError(f"unknown domain {domain_name!r}", path="domain") from e
        if not isinstance(order, int) or order < 2:
            raise InstanceValidationError("group parameter must be an integer >= 2", path=f"domain.{domain_name}")

        nodes = document["nodes"]
        if not isinstance(nodes, int) or nodes < 1:
            raise InstanceValidationError("must be a positive integer", path="nodes")
        directed = bool(document.get("directed", False))

        edges: List[Tuple[int, int]] = []
        costs: List[EdgeCost] = []
        if not isinstance(document["edges"], list):
            raise InstanceValidationError("must be a list of edge objects", path="edges")
        for index, entry in enumerate(document["edges"]):
            path = f"edges[{index}]"
            if not isinstance(entry, dict) or not {"i", "j", "cost"} <= set(entry):
                raise InstanceValidationError("edge needs i, j and cost", path=path)
            i, j = entry["i"], entry["j"]
            if i == j:
                raise InstanceValidationError(f"self-loop on node {i}", path=path)
            edges.append((i, j))
            costs.append(InstanceService._cost_from_dict(entry["cost"], domain, order, f"{path}.cost"))

        try:
            graph = Graph(node_count=nodes, edges=tuple(edges), directed=directed)
        except ValidationError as e:
            raise InstanceValidationError(e.errors()[0]["msg"], path="edges") from e
        return InstanceService.make_instance(graph, domain, order, costs, name=document.get("name"))

    @staticmethod
    def parse_instance(text: str) -> NetworkInstance:
        """
        Parse an instance document

        Raises:
            InstanceValidationError: malformed JSON or an invariant violation (with field path)
        """
        try:
            document = json.loads(text, parse_float=_finite_float, parse_constant=_reject_constant)
        except json.JSONDecodeError as e:
            raise InstanceValidationError(f"malformed document: {e.msg} at line {e.lineno}") from e
        return InstanceService.from_dict(document)

    @staticmethod
    def load_instance(path: Union[str, Path]) -> NetworkInstance:
        text = Path(path).read_text(encoding="utf-8")
        instance = InstanceService.parse_instance(text)
        logger.info(f"Loaded instance from {path}: n={instance.n}, m={instance.m}, {instance.domain.value}({instance.order})")
        return instance

    @staticmethod
    def save_instance(instance: NetworkInstance, path: Union[str, Path]) -> None:
        Path(path).write_text(InstanceService.serialize_instance(instance) + "\n", encoding="utf-8")
