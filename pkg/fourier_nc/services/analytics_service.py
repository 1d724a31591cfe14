"""
Analytics Service
Exact gate-count projections, MAX-CUT reduction, adversary counts and the numerical validation harness
"""
import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd
import sympy

from fourier_nc.exceptions import UsageError
from fourier_nc.models import AdversaryRow, Assignment, GateReport, Graph, NetworkInstance, ValidationRow
from fourier_nc.services.fourier_service import FourierService
from fourier_nc.services.instance_service import InstanceService
from fourier_nc.services.sampler_service import SamplerService
from fourier_nc.services.topology_service import TopologyService

logger = logging.getLogger(__name__)

# Mean conditional measurements reported for the validation topologies at C = 32
REFERENCE_MEASUREMENTS = {"4x4 grid": 37, "8-ring": 36, "K8": 41, "barbell": 44, "8-ring pwl": 50}


def qubits_per_node(C: int) -> int:
    """q = ceil(log2 C)"""
    return (C - 1).bit_length()


def grover_iterations(C: int, n: int) -> int:
    """ceil(pi sqrt(C^n) / 4), evaluated exactly"""
    return int(sympy.ceiling(sympy.pi * sympy.sqrt(sympy.Integer(C) ** n) / 4))


def scientific(value: Union[int, Fraction], digits: int = 2) -> str:
    """Round half-up to `digits` significant figures on the exact value, e.g. 84319 -> '8.4e+04'"""
    value = Fraction(value)
    if value == 0:
        return f"{0:.{digits - 1}f}e+00"
    sign = "-" if value < 0 else ""
    value = abs(value)
    exponent = 0
    while value >= Fraction(10) ** (exponent + 1):
        exponent += 1
    while value < Fraction(10) ** exponent:
        exponent -= 1
    scale = Fraction(10) ** (exponent - digits + 1)
    mantissa = int(value / scale + Fraction(1, 2))
    if mantissa >= 10 ** digits:
        mantissa //= 10
        exponent += 1
    text = str(mantissa)
    body = text[0] + ("." + text[1:] if digits > 1 else "")
    return f"{sign}{body}e{'+' if exponent >= 0 else '-'}{abs(exponent):02d}"


class AnalyticsService:
    """Service for the closed-form projections and the validation harness"""

    # ============================================
    # Gate counts
    # ============================================

    @staticmethod
    def gate_counts(n: int, m: int, r: int, C: int) -> GateReport:
        """
        Fourier-NC vs Grover gate totals in exact integer arithmetic

        G_QFT = (mr + n) q^2 per repetition, T = max(1, mr n ceil(ln mr)) repetitions,
        Grover = m q^2 per iteration times ceil(pi sqrt(C^n) / 4) iterations.
        """
        if min(n, m, r, C) < 1:
            raise UsageError("gate_counts needs n, m, r, C >= 1")
        q = qubits_per_node(C)
        mr = m * r
        per_repetition = (mr + n) * q * q
        repetitions = max(1, mr * n * int(sympy.ceiling(sympy.log(mr))))
        per_iteration = m * q * q
        iterations = grover_iterations(C, n)
        fourier_total = per_repetition * repetitions
        grover_total = per_iteration * iterations
        return GateReport(
            n=n, m=m, r=r, C=C, q=q,
            search_space=C ** n,
            gates_per_repetition=per_repetition,
            repetitions=repetitions,
            fourier_total=fourier_total,
            grover_per_iteration=per_iteration,
            grover_iterations=iterations,
            grover_total=grover_total,
            speedup=Fraction(grover_total, fourier_total) if fourier_total else Fraction(0),
        )

    @staticmethod
    def dihedral_gate_counts(n: int, m: int, r: int, C: int) -> int:
        """(4mr + n) q^2 per repetition over D_C"""
        if min(n, m, r, C) < 1:
            raise UsageError("dihedral_gate_counts needs n, m, r, C >= 1")
        q = qubits_per_node(C)
        return (4 * m * r + n) * q * q

    @staticmethod
    def gate_frame(reports: Sequence[GateReport]) -> pd.DataFrame:
        return pd.DataFrame([
            {
                "n": g.n, "m": g.m, "r": g.r, "C": g.C,
                "search_space": scientific(g.search_space),
                "G_QFT": g.gates_per_repetition,
                "T": g.repetitions,
                "fourier_total": scientific(g.fourier_total),
                "grover_iterations": g.grover_iterations,
                "grover_total": scientific(g.grover_total),
                "speedup": scientific(g.speedup),
            }
            for g in reports
        ])

    # ============================================
    # Hardness constructions
    # ============================================

    @staticmethod
    def maxcut_reduce(graph: Graph) -> NetworkInstance:
        """C = 2 instance with f(x) = cos(pi x) on every edge, so H = m - 2 cut"""
        if graph.directed:
            raise UsageError("maxcut_reduce needs an undirected graph")
        cost = InstanceService.make_cost("cosine", 2, weights=[1.0])
        return InstanceService.make_instance(graph, "cyclic", 2, [cost] * graph.edge_count, name="maxcut")

    @staticmethod
    def cut_size(graph: Graph, assignment: Assignment) -> int:
        side = assignment.elements
        return sum(1 for i, j in graph.edges if side[i] != side[j])

    @staticmethod
    def adversary_query_count(n: int, C: int) -> int:
        """ceil(C^n / 2) classical queries"""
        if n < 1 or C < 1:
            raise UsageError("adversary_query_count needs n, C >= 1")
        return (C ** n + 1) // 2

    @staticmethod
    def adversary_table(n_values: Sequence[int], C: int) -> List[AdversaryRow]:
        return [
            AdversaryRow(
                n=n, C=C,
                classical_queries=AnalyticsService.adversary_query_count(n, C),
                grover_iterations=grover_iterations(C, n),
            )
            for n in n_values
        ]

    # ============================================
    # Validation harness
    # ============================================

    @staticmethod
    def validation_instances(seed: int, C: int = 32) -> List[Tuple[str, str, NetworkInstance]]:
        cosine = TopologyService.cosine_costs()
        pwl = TopologyService.skewed_pwl_costs()
        topologies = [
            ("4x4 grid", "cos", TopologyService.grid(4, 4), cosine),
            ("8-ring", "cos", TopologyService.ring(8), cosine),
            ("K8", "cos", TopologyService.complete(8), cosine),
            ("barbell", "cos", TopologyService.barbell(5), cosine),
            ("8-ring pwl", "pwl", TopologyService.ring(8), pwl),
        ]
        return [
            (name, cost, TopologyService.with_costs(graph, C, factory, seed + index, name=name))
            for index, (name, cost, graph, factory) in enumerate(topologies)
        ]

    @staticmethod
    def validation_suite(seed: int, trials: int = 100, C: int = 32, threads: Optional[int] = None) -> List[ValidationRow]:
        """
        p_min against 1/(n m r) and mean conditional draws to full recovery per topology

        Weights are uniform on [0.5, 1.5]; the pwl row is a zero-mean sawtooth kept to 2 harmonics.
        """
        rows = []
        for name, cost, instance in AnalyticsService.validation_instances(seed, C):
            p_min = FourierService.p_min(instance)
            bound = FourierService.polynomial_threshold(instance)
            mean = SamplerService.mean_collection_time(instance, trials, seed, threads)
            rows.append(ValidationRow(
                topology=name,
                cost=cost,
                n=instance.n,
                m=instance.m,
                r=FourierService.sparsity(instance),
                p_min=p_min,
                bound=bound,
                ratio=p_min / bound,
                mean_measurements=mean,
                reference_measurements=REFERENCE_MEASUREMENTS[name],
            ))
            logger.info(f"Validation {name}: p_min={p_min:.4g}, bound={bound:.4g}, mean draws={mean:.1f}")
        return rows

    @staticmethod
    def rows_frame(rows: Sequence) -> pd.DataFrame:
        """DataFrame of any sequence of report models"""
        return pd.DataFrame([row.model_dump() for row in rows])

    @staticmethod
    def render(frame: pd.DataFrame, fmt: str = "text") -> str:
        """CSV (RFC-4180 quoting) or aligned text"""
        if fmt == "csv":
            return frame.to_csv(index=False, lineterminator="\n")
        if fmt == "text":
            return frame.to_string(index=False) + "\n"
        raise UsageError(f"unknown output format {fmt!r}")

    @staticmethod
    def summary(rows: Sequence[ValidationRow]) -> Dict[str, float]:
        ratios = [row.ratio for row in rows]
        return {"min_ratio": min(ratios), "max_ratio": max(ratios)}
