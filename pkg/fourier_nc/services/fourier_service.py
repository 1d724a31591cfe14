"""
Fourier Service
Edge-level DFT over Z_C, the global-mode factorisation, p_min and its analytic bounds
"""
import json
import logging
from typing import Dict, List, Tuple

import numpy as np

from fourier_nc.config import settings
from fourier_nc.exceptions import DomainMismatchError, GuardExceededError, LinearisationError
from fourier_nc.models import (
    CostFunction, CostKind, DomainKind, EdgeSpectrum, GlobalMode, LinearisationParams,
    NetworkInstance, SpectralCoefficient,
)
from fourier_nc.services.instance_service import InstanceService

logger = logging.getLogger(__name__)


def _require_cyclic(instance: NetworkInstance, operation: str) -> None:
    if instance.domain != DomainKind.CYCLIC:
        raise DomainMismatchError(f"{operation} needs a cyclic instance, got {instance.domain.value}")


class FourierService:
    """Service for sparse Fourier analysis of Fourier-NC instances over Z_C^n"""

    @staticmethod
    def edge_dft(cost: CostFunction, edge: Tuple[int, int] = (0, 1)) -> EdgeSpectrum:
        """
        Sparse DFT f(k) = (1/C) sum_x f(x) w^{-kx}

        Args:
            cost: cost over Z_C
            edge: edge id recorded in the spectrum

        Returns:
            EdgeSpectrum with every coefficient above the pruning threshold
        """
        table = InstanceService.materialize(cost)
        C = cost.cycle_length
        if len(table) != C:
            raise DomainMismatchError(f"edge_dft needs a Z_{C} table, got {len(table)} entries")
        spectrum = np.fft.fft(table) / C
        coefficients = tuple(
            SpectralCoefficient(k=int(k), re=float(value.real), im=float(value.imag))
            for k, value in enumerate(spectrum)
            if abs(value) > settings.prune_tolerance
        )
        return EdgeSpectrum(edge=edge, cycle_length=C, coefficients=coefficients)

    @staticmethod
    def edge_spectra(instance: NetworkInstance) -> List[EdgeSpectrum]:
        _require_cyclic(instance, "edge_spectra")
        return [FourierService.edge_dft(cost, edge) for edge, cost in zip(instance.graph.edges, instance.costs)]

    @staticmethod
    def sparsity(instance: NetworkInstance) -> int:
        """r = largest number of non-zero coefficients on any edge"""
        return max((spectrum.sparsity for spectrum in FourierService.edge_spectra(instance)), default=0)

    @staticmethod
    def global_modes(instance: NetworkInstance) -> List[GlobalMode]:
        """One mode per non-zero edge coefficient with k != 0 (anti-diagonal k_j = -k_i)"""
        modes = []
        for spectrum in FourierService.edge_spectra(instance):
            for entry in spectrum.coefficients:
                if entry.k == 0:
                    continue
                modes.append(GlobalMode(
                    edge=spectrum.edge, k_i=entry.k, cycle_length=spectrum.cycle_length, re=entry.re, im=entry.im,
                ))
        logger.debug(f"{len(modes)} global modes on {instance.m} edges")
        return modes

    @staticmethod
    def zero_mode(instance: NetworkInstance) -> complex:
        return sum((spectrum.coefficient(0) for spectrum in FourierService.edge_spectra(instance)), 0j)

    @staticmethod
    def aggregate_modes(instance: NetworkInstance) -> Dict[Tuple[int, ...], complex]:
        """Global frequency vector -> summed coefficient over every contributing edge"""
        aggregated: Dict[Tuple[int, ...], complex] = {}
        for mode in FourierService.global_modes(instance):
            vector = mode.frequency_vector(instance.n)
            aggregated[vector] = aggregated.get(vector, 0j) + mode.value
        return aggregated

    @staticmethod
    def global_dft_from_modes(instance: NetworkInstance) -> Dict[Tuple[int, ...], complex]:
        """Sparse H-hat assembled from the factorisation, zero mode included"""
        dft = FourierService.aggregate_modes(instance)
        zero = FourierService.zero_mode(instance)
        if abs(zero) > settings.prune_tolerance:
            dft[(0,) * instance.n] = zero
        return dft

    # ============================================
    # Exhaustive oracle
    # ============================================

    @staticmethod
    def _check_dense_guard(instance: NetworkInstance) -> None:
        size = instance.order ** instance.n
        if size > settings.dense_dft_guard:
            raise GuardExceededError(f"C^n = {size} exceeds the dense oracle guard {settings.dense_dft_guard}")

    @staticmethod
    def cost_landscape(instance: NetworkInstance) -> np.ndarray:
        """H(mu) for every mu in Z_C^n as an n-dimensional array"""
        _require_cyclic(instance, "cost_landscape")
        C, n = instance.order, instance.n
        grid = np.indices((C,) * n)
        landscape = np.zeros((C,) * n)
        for (i, j), cost in zip(instance.graph.edges, instance.costs):
            landscape += InstanceService.materialize(cost)[(grid[i] - grid[j]) % C]
        return landscape

    @staticmethod
    def brute_force_global_dft(instance: NetworkInstance) -> np.ndarray:
        """
        Dense DFT of H over Z_C^n from all C^n cost evaluations

        Returns:
            Complex array indexed by the frequency vector

        Raises:
            GuardExceededError: if C^n exceeds the dense oracle guard
        """
        _require_cyclic(instance, "brute_force_global_dft")
        FourierService._check_dense_guard(instance)
        landscape = FourierService.cost_landscape(instance)
        return np.fft.fftn(landscape) / landscape.size

    @staticmethod
    def dense_support(dense: np.ndarray) -> Dict[Tuple[int, ...], complex]:
        """Non-zero entries of a dense DFT keyed by frequency vector"""
        indices = np.argwhere(np.abs(dense) > settings.prune_tolerance * max(1.0, np.abs(dense).max()))
        return {tuple(int(x) for x in index): complex(dense[tuple(index)]) for index in indices}

    # ============================================
    # p_min and its bounds
    # ============================================

    @staticmethod
    def mode_weights(instance: NetworkInstance) -> Dict[Tuple[int, ...], float]:
        return {vector: abs(value) ** 2 for vector, value in FourierService.aggregate_modes(instance).items()}

    @staticmethod
    def p_min(instance: NetworkInstance) -> float:
        """
        Minimum normalised squared weight over the non-zero global modes

        Raises:
            LinearisationError: if every edge cost is constant
        """
        weights = [w for w in FourierService.mode_weights(instance).values() if w > settings.prune_tolerance ** 2]
        if not weights:
            raise LinearisationError("instance has no non-zero mode (all edge costs constant)")
        return min(weights) / sum(weights)

    @staticmethod
    def _costs_of_kind(instance: NetworkInstance, kind: CostKind, operation: str) -> List[CostFunction]:
        _require_cyclic(instance, operation)
        for index, cost in enumerate(instance.costs):
            if cost.kind != kind:
                raise DomainMismatchError(f"{operation} needs {kind.value} costs; edge {index} is {cost.kind.value}")
        return list(instance.costs)

    @staticmethod
    def pmin_bound_cosine(instance: NetworkInstance) -> float:
        """1 / (Delta * m * r' * kappa^2) for cosine couplings"""
        costs = FourierService._costs_of_kind(instance, CostKind.COSINE, "pmin_bound_cosine")
        weights = [w for cost in costs for w in cost.weights]
        harmonics = max(len(cost.weights) for cost in costs)
        kappa = max(weights) / min(weights)
        if instance.m < 2:
            logger.warning("Cosine p_min bound applied to a single-edge instance; the bound is stated for m >= 2")
        return 1.0 / (instance.graph.max_degree * instance.m * harmonics * kappa ** 2)

    @staticmethod
    def pmin_bound_pwl(instance: NetworkInstance) -> float:
        """1 / (Delta * m * r' * (r')^4): cosine bound with kappa = (r')^2"""
        costs = FourierService._costs_of_kind(instance, CostKind.PWL, "pmin_bound_pwl")
        if any(cost.harmonics is None for cost in costs):
            raise DomainMismatchError("pmin_bound_pwl needs pwl costs truncated to r' harmonics")
        harmonics = max(max(cost.harmonics for cost in costs), 1)
        return 1.0 / (instance.graph.max_degree * instance.m * harmonics * harmonics ** 4)

    @staticmethod
    def polynomial_threshold(instance: NetworkInstance) -> float:
        """1 / (n * m * r)"""
        return 1.0 / (instance.n * instance.m * FourierService.sparsity(instance))

    @staticmethod
    def linearisation_params(instance: NetworkInstance) -> LinearisationParams:
        """P = (m r)^2 n and K = P * m * max sup|f_ij|"""
        _require_cyclic(instance, "linearisation_params")
        r = FourierService.sparsity(instance)
        P = float((instance.m * r) ** 2 * instance.n)
        sup = max(InstanceService.sup_norm(cost) for cost in instance.costs)
        if sup == 0.0:
            raise LinearisationError("all edge costs vanish; no phase to linearise")
        return LinearisationParams(P=max(P, 1.0), K=max(P, 1.0) * instance.m * sup)

    # ============================================
    # Export
    # ============================================

    @staticmethod
    def export_spectra(instance: NetworkInstance) -> str:
        """JSON array of {edge, modes: [{k, re, im}]}"""
        return json.dumps([
            {
                "edge": list(spectrum.edge),
                "modes": [{"k": c.k, "re": c.re, "im": c.im} for c in spectrum.coefficients],
            }
            for spectrum in FourierService.edge_spectra(instance)
        ], indent=2)
