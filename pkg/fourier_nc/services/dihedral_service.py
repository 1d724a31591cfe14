"""
Dihedral Service
Irreps of D_C (dimension <= 2), the Peter-Weyl transform and its inverse for direction-dependent costs
"""
import logging
from typing import List, Tuple

import numpy as np

from fourier_nc.config import settings
from fourier_nc.exceptions import DomainMismatchError
from fourier_nc.models import CostFunction, DihedralBlock, DihedralSpectrum

logger = logging.getLogger(__name__)

Irrep = Tuple[str, int, object]  # (label, frequency, element -> matrix)


def _one_dimensional(rotation_sign: int, reflection_sign: int):
    def rho(a: int, b: int) -> np.ndarray:
        return np.array([[float(rotation_sign ** a * reflection_sign ** b)]], dtype=complex)
    return rho


def _two_dimensional(j: int, C: int):
    swap = np.array([[0, 1], [1, 0]], dtype=complex)

    def rho(a: int, b: int) -> np.ndarray:
        w = np.exp(2j * np.pi * j * a / C)
        rotation = np.array([[w, 0], [0, np.conj(w)]], dtype=complex)
        return rotation @ swap if b else rotation
    return rho


class DihedralService:
    """Service for Fourier analysis over D_C = <r, s | r^C = s^2 = e, srs = r^-1>

    Group elements are (a, b) = r^a s^b, tabulated at index a + C*b.
    """

    @staticmethod
    def irreps(C: int) -> List[Irrep]:
        """4 one-dimensional irreps (C even) or 2 (C odd), then 2-dim irreps j = 1..ceil(C/2)-1"""
        irreps: List[Irrep] = [
            ("trivial", 0, _one_dimensional(1, 1)),
            ("sign", 0, _one_dimensional(1, -1)),
        ]
        if C % 2 == 0:
            irreps.append(("alternating", C // 2, _one_dimensional(-1, 1)))
            irreps.append(("alternating-sign", C // 2, _one_dimensional(-1, -1)))
        for j in range(1, (C + 1) // 2):
            irreps.append((f"rho_{j}", j, _two_dimensional(j, C)))
        return irreps

    @staticmethod
    def elements(C: int) -> List[Tuple[int, int]]:
        return [(a, b) for b in (0, 1) for a in range(C)]

    @staticmethod
    def dihedral_dft(cost: CostFunction, edge: Tuple[int, int] = (0, 1)) -> DihedralSpectrum:
        """
        Per-irrep coefficients f(rho) = (1/2C) sum_g f(g) rho(g)^dagger

        Raises:
            DomainMismatchError: if the cost is not a 2C-entry table
        """
        C = cost.cycle_length
        if len(cost.values) != 2 * C:
            raise DomainMismatchError(f"dihedral_dft needs a {2 * C}-entry table over D_{C}, got {len(cost.values)}")
        table = np.asarray(cost.values, dtype=float)
        blocks = []
        for label, frequency, rho in DihedralService.irreps(C):
            coefficient = sum(
                table[a + C * b] * rho(a, b).conj().T for a, b in DihedralService.elements(C)
            ) / (2 * C)
            blocks.append(DihedralBlock(
                label=label,
                dimension=coefficient.shape[0],
                frequency=frequency,
                re=tuple(tuple(float(x) for x in row) for row in coefficient.real),
                im=tuple(tuple(float(x) for x in row) for row in coefficient.imag),
            ))
        return DihedralSpectrum(edge=edge, cycle_length=C, blocks=tuple(blocks))

    @staticmethod
    def reconstruct(spectrum: DihedralSpectrum) -> np.ndarray:
        """Peter-Weyl synthesis f(g) = sum_rho d_rho tr(f(rho) rho(g))"""
        C = spectrum.cycle_length
        table = np.zeros(2 * C)
        for (label, _, rho), block in zip(DihedralService.irreps(C), spectrum.blocks):
            matrix = np.array(block.re) + 1j * np.array(block.im)
            for a, b in DihedralService.elements(C):
                table[a + C * b] += block.dimension * np.trace(matrix @ rho(a, b)).real
        return table

    @staticmethod
    def active_irreps(spectrum: DihedralSpectrum) -> List[str]:
        return [block.label for block in spectrum.blocks if block.energy > settings.prune_tolerance]
