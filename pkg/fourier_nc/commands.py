"""
Command handlers for the fourier-nc CLI
Each handler takes the parsed arguments, writes its report and returns an exit status
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd

from fourier_nc.exceptions import InstanceValidationError, UsageError
from fourier_nc.models import DomainKind, NetworkInstance, RunReport
from fourier_nc.services.analytics_service import AnalyticsService, scientific
from fourier_nc.services.character_service import CharacterService
from fourier_nc.services.dihedral_service import DihedralService
from fourier_nc.services.fourier_service import FourierService
from fourier_nc.services.instance_service import InstanceService
from fourier_nc.services.sampler_service import SamplerService
from fourier_nc.services.solver_service import SolverService
from fourier_nc.services.symmetric_service import SymmetricService

logger = logging.getLogger(__name__)

TABLE2_SIZES = (10, 20, 50, 100)


def emit(text: str, output: Optional[str] = None) -> None:
    """Write to the output file (UTF-8) or stdout"""
    if output:
        Path(output).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {output}")
    else:
        sys.stdout.write(text)


def parse_k_values(text: str) -> List[int]:
    """'3..15' (inclusive range) or '3,5,7'"""
    try:
        if ".." in text:
            low, high = (int(part) for part in text.split(".."))
            return list(range(low, high + 1))
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise UsageError(f"cannot parse k values {text!r}: use '3..15' or '3,5,7'") from e


def parse_edges(text: str) -> List[tuple]:
    """'0-1,1-2,0-2' -> [(0, 1), (1, 2), (0, 2)]"""
    try:
        return [tuple(int(x) for x in pair.split("-")) for pair in text.split(",") if pair.strip()]
    except ValueError as e:
        raise UsageError(f"cannot parse edge list {text!r}: use '0-1,1-2'") from e


def load(path: str) -> NetworkInstance:
    if not Path(path).is_file():
        raise InstanceValidationError(f"instance file not found: {path}", path="instance")
    instance = InstanceService.load_instance(path)
    if instance.m == 0:
        raise InstanceValidationError("instance has no edges", path="edges")
    return instance


def render(frame: pd.DataFrame, args: argparse.Namespace) -> None:
    emit(AnalyticsService.render(frame, args.format), args.output)


# ============================================
# Solving
# ============================================

def cmd_solve(args: argparse.Namespace) -> int:
    """Solve an instance: Fourier pipeline, or hybrid / brute force / DMPC by domain"""
    instance = load(args.instance)
    if instance.domain == DomainKind.SYMMETRIC:
        assignment = SymmetricService.dmpc_solve(instance)
        run = RunReport(method="dmpc", cost=InstanceService.eval_cost(instance, assignment),
                        assignment=assignment.elements)
    elif instance.domain == DomainKind.DIHEDRAL:
        logger.warning("Dihedral instances have no congruence decoder; solving by brute force")
        assignment = SolverService.brute_force_solve(instance)
        run = RunReport(method="brute-force", cost=InstanceService.eval_cost(instance, assignment),
                        assignment=assignment.elements)
    elif args.hybrid:
        assignment = SolverService.hybrid_solve(instance)
        run = RunReport(method="hybrid", cost=InstanceService.eval_cost(instance, assignment),
                        assignment=assignment.elements)
    else:
        _, run = SolverService.end_to_end_solve(instance, seed=args.seed, delta=args.delta)
    if args.oracle and run.oracle_cost is None:
        run = SolverService.check_against_oracle(instance, run)
    emit(run.model_dump_json(indent=2) + "\n", args.output)
    return 0


def cmd_frustration(args: argparse.Namespace) -> int:
    """Holonomy report plus the tree-solver gap bound"""
    instance = load(args.instance)
    if instance.domain == DomainKind.SYMMETRIC:
        report = SymmetricService.sk_detect_frustration(instance)
    else:
        report = SolverService.detect_frustration(instance)
    document = json.loads(report.model_dump_json())
    document["frustration_free"] = report.frustration_free
    if instance.domain == DomainKind.CYCLIC:
        document["gap_bound"] = SolverService.frustration_gap_bound(instance)
    emit(json.dumps(document, indent=2) + "\n", args.output)
    return 0


def cmd_spectrum(args: argparse.Namespace) -> int:
    instance = load(args.instance)
    if instance.domain == DomainKind.DIHEDRAL:
        spectra = [
            json.loads(DihedralService.dihedral_dft(cost, edge).model_dump_json())
            for edge, cost in zip(instance.graph.edges, instance.costs)
        ]
        emit(json.dumps(spectra, indent=2) + "\n", args.output)
    elif instance.domain == DomainKind.SYMMETRIC:
        spectra = [
            {"edge": list(edge), "coefficients": [
                {"irrep": list(lam), "coeff": c} for lam, c in CharacterService.class_dft(cost).coefficient_map().items()
            ]}
            for edge, cost in zip(instance.graph.edges, instance.costs)
        ]
        emit(json.dumps(spectra, indent=2) + "\n", args.output)
    else:
        emit(FourierService.export_spectra(instance) + "\n", args.output)
    return 0


# ============================================
# Sampling
# ============================================

def cmd_sample(args: argparse.Namespace) -> int:
    instance = load(args.instance)
    batch = SamplerService.sample_modes(instance, args.T, seed=args.seed, conditional=args.conditional)
    counts = batch.counts()
    rows = [{"i": i, "j": j, "k": k, "count": counts.get((i, j, k), 0)} for i, j, k in batch.labels]
    if not args.conditional:
        rows.insert(0, {"i": -1, "j": -1, "k": 0, "count": batch.zero_count})
    render(pd.DataFrame(rows), args)
    return 0


def cmd_converge(args: argparse.Namespace) -> int:
    instance = load(args.instance)
    curve = SamplerService.convergence_experiment(
        instance, args.max_T, args.trials, args.seed, conditional=not args.raw, threads=args.threads
    )
    render(SamplerService.curve_frame(curve), args)
    summary = f"s={curve.mode_count} T*={curve.threshold:.2f} crossing={curve.crossing}\n"
    if not args.output and args.format == "csv":
        summary = "# " + summary
    emit(summary)
    return 0


# ============================================
# Analytics
# ============================================

def cmd_gates(args: argparse.Namespace) -> int:
    if args.n is None:
        sizes = [(n, n * (n - 1) // 2) for n in TABLE2_SIZES]
    else:
        sizes = [(args.n, args.m if args.m is not None else args.n * (args.n - 1) // 2)]
    reports = [AnalyticsService.gate_counts(n, m, args.r, args.C) for n, m in sizes]
    frame = AnalyticsService.gate_frame(reports)
    if args.dihedral:
        frame["G_dihedral"] = [AnalyticsService.dihedral_gate_counts(n, m, args.r, args.C) for n, m in sizes]
    render(frame, args)
    return 0


def cmd_adversary(args: argparse.Namespace) -> int:
    rows = AnalyticsService.adversary_table(parse_k_values(args.n), args.C)
    render(AnalyticsService.rows_frame(rows), args)
    return 0


def cmd_reduce_maxcut(args: argparse.Namespace) -> int:
    edges = sorted((min(i, j), max(i, j)) for i, j in parse_edges(args.edges))
    nodes = args.nodes if args.nodes is not None else max(max(e) for e in edges) + 1
    instance = AnalyticsService.maxcut_reduce(InstanceService.make_graph(nodes, edges))
    emit(InstanceService.serialize_instance(instance) + "\n", args.output)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    rows = AnalyticsService.validation_suite(args.seed, trials=args.trials, C=args.C, threads=args.threads)
    render(AnalyticsService.rows_frame(rows), args)
    return 0


# ============================================
# Symmetric group
# ============================================

def cmd_sk_table(args: argparse.Namespace) -> int:
    rows = SymmetricService.query_table(parse_k_values(args.k), m=args.m, r=args.r)
    frame = pd.DataFrame([
        {
            "k": row.k,
            "group_order": row.group_order,
            "quantum": row.quantum,
            "classical": row.classical,
            "speedup": scientific(row.speedup),
        }
        for row in rows
    ])
    render(frame, args)
    logger.info(f"Crossover (first k with speedup > 1): {SymmetricService.crossover(rows)}")
    return 0


def cmd_ecc(args: argparse.Namespace) -> int:
    stats = SymmetricService.ecc_experiment(args.k, args.r, args.trials, args.seed, threads=args.threads)
    frame = pd.DataFrame([{
        "k": stats.k, "r": stats.r, "trials": stats.trials,
        "fraction_outside": stats.fraction_outside, "max_distinct_parts": stats.max_distinct_parts,
    }])
    render(frame, args)
    return 0


def cmd_characters(args: argparse.Namespace) -> int:
    emit(CharacterService.character_table_csv(args.k), args.output)
    return 0


def cmd_abelian(args: argparse.Namespace) -> int:
    index = SymmetricService.abelian_index(args.group, mode=args.mode)
    frame = pd.DataFrame([{
        "group": index.group,
        "order": index.order,
        "largest_abelian": index.largest_abelian,
        "alpha": str(index.alpha) if not index.asymptotic else f"{float(index.alpha):.6g}",
        "mode": index.mode,
        "asymptotic": index.asymptotic,
    }])
    render(frame, args)
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "frustration": cmd_frustration,
    "spectrum": cmd_spectrum,
    "sample": cmd_sample,
    "converge": cmd_converge,
    "gates": cmd_gates,
    "adversary": cmd_adversary,
    "reduce-maxcut": cmd_reduce_maxcut,
    "validate": cmd_validate,
    "sk-table": cmd_sk_table,
    "ecc": cmd_ecc,
    "characters": cmd_characters,
    "abelian": cmd_abelian,
}
