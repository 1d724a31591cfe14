"""
Sampler Service
Classical simulation of the linearised measurement statistics and Monte-Carlo recovery experiments
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from fourier_nc.config import settings
from fourier_nc.exceptions import LinearisationError, UsageError
from fourier_nc.models import (
    ConvergenceCurve, LinearisationParams, MeasurementBatch, MeasurementDistribution, NetworkInstance,
)
from fourier_nc.services.fourier_service import FourierService

logger = logging.getLogger(__name__)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream per (seed, trial) so results do not depend on scheduling"""
    return np.random.default_rng([seed, trial])


def _first_seen(draws: np.ndarray, mode_count: int) -> np.ndarray:
    """1-based draw index at which each mode first appears (0 if never)"""
    first = np.zeros(mode_count, dtype=int)
    valid = draws >= 0
    positions = np.nonzero(valid)[0]
    labels = draws[valid]
    unique, index = np.unique(labels, return_index=True)
    first[unique] = positions[index] + 1
    return first


class SamplerService:
    """Service simulating Algorithm 1's measurement stage in the linearisation regime"""

    @staticmethod
    def measurement_distribution(
        instance: NetworkInstance, params: Optional[LinearisationParams] = None
    ) -> MeasurementDistribution:
        """
        p(k) = (2 pi / K)^2 |H(k)|^2 for k != 0 and p0 = 1 - sum of the rest

        Raises:
            LinearisationError: if the instance has no non-zero mode or K is too small
        """
        modes = FourierService.global_modes(instance)
        if not modes:
            raise LinearisationError("empty global mode set: every edge cost is constant")
        params = params or FourierService.linearisation_params(instance)
        scale = (2.0 * math.pi / params.K) ** 2
        probabilities = [scale * mode.weight for mode in modes]
        zero = 1.0 - sum(probabilities)
        if zero < 0.0:
            raise LinearisationError(f"phase divisor K={params.K} too small for the first-order model")
        return MeasurementDistribution(zero_probability=zero, modes=tuple(modes), probabilities=tuple(probabilities))

    @staticmethod
    def conditional_distribution(instance: NetworkInstance) -> MeasurementDistribution:
        """Law conditioned on a non-zero outcome: |H(k)|^2 / ||H||^2"""
        modes = FourierService.global_modes(instance)
        if not modes:
            raise LinearisationError("empty global mode set: every edge cost is constant")
        total = sum(mode.weight for mode in modes)
        return MeasurementDistribution(
            zero_probability=0.0,
            modes=tuple(modes),
            probabilities=tuple(mode.weight / total for mode in modes),
        )

    @staticmethod
    def _draw(distribution: MeasurementDistribution, count: int, rng: np.random.Generator) -> np.ndarray:
        outcomes = np.array((distribution.zero_probability,) + distribution.probabilities)
        outcomes = outcomes / outcomes.sum()
        return rng.choice(len(outcomes), size=count, p=outcomes) - 1

    @staticmethod
    def sample_modes(
        instance: NetworkInstance,
        T: int,
        seed: int,
        conditional: bool = False,
        params: Optional[LinearisationParams] = None,
    ) -> MeasurementBatch:
        """
        T independent draws from the measurement law, reproducible from the seed

        Args:
            conditional: draw from the non-zero-mode law (effective measurements)

        Raises:
            UsageError: if T < 1
        """
        if T < 1:
            raise UsageError("T must be at least 1")
        distribution = (
            SamplerService.conditional_distribution(instance) if conditional
            else SamplerService.measurement_distribution(instance, params)
        )
        draws = SamplerService._draw(distribution, T, np.random.default_rng(seed))
        return MeasurementBatch(
            seed=seed,
            total=T,
            conditional=conditional,
            labels=distribution.labels,
            sequence=tuple(int(d) for d in draws),
        )

    # ============================================
    # Coupon-collector accounting
    # ============================================

    @staticmethod
    def coupon_threshold(s: int) -> float:
        """T* = s ln s"""
        if s < 1:
            raise UsageError("mode count must be at least 1")
        return s * math.log(s)

    @staticmethod
    def coupon_draws(s: int, delta: float = None) -> int:
        """ceil(s ln(s / delta)) conditional draws miss a mode with probability <= delta"""
        delta = delta if delta is not None else settings.delta
        return max(1, math.ceil(s * math.log(s / delta)))

    @staticmethod
    def raw_measurement_bound(instance: NetworkInstance, params: LinearisationParams = None, delta: float = None) -> int:
        """ceil((P^2 / p_min) ln(s / delta)) raw measurements (zero outcomes included)"""
        delta = delta if delta is not None else settings.delta
        params = params or FourierService.linearisation_params(instance)
        s = len(FourierService.global_modes(instance))
        return math.ceil(params.P ** 2 / FourierService.p_min(instance) * math.log(s / delta))

    @staticmethod
    def expected_collection_time(probabilities: Sequence[float]) -> float:
        """E[draws to see every outcome] = integral of 1 - prod(1 - exp(-p t)) over t >= 0"""
        p = np.asarray(probabilities, dtype=float)
        p = p[p > 0] / p[p > 0].sum()
        horizon = (math.log(len(p)) + 40.0) / p.min()
        t = np.linspace(0.0, horizon, 200_001)
        survival = 1.0 - np.prod(1.0 - np.exp(-np.outer(t, p)), axis=1)
        return float(np.trapz(survival, t))

    @staticmethod
    def collection_time(probabilities: Sequence[float], rng: np.random.Generator) -> int:
        """Conditional draws until every outcome has appeared once"""
        p = np.asarray(probabilities, dtype=float)
        p = p / p.sum()
        s = len(p)
        chunk = max(16, int(2 * s * math.log(s + 1)))
        seen = np.zeros(s, dtype=bool)
        remaining = s
        drawn = 0
        while True:
            draws = rng.choice(s, size=chunk, p=p)
            for position, label in enumerate(draws, start=1):
                if not seen[label]:
                    seen[label] = True
                    remaining -= 1
                    if remaining == 0:
                        return drawn + position
            drawn += chunk

    @staticmethod
    def mean_collection_time(instance: NetworkInstance, trials: int, seed: int, threads: int = None) -> float:
        probabilities = SamplerService.conditional_distribution(instance).probabilities
        threads = threads or settings.threads
        with ThreadPoolExecutor(max_workers=threads) as pool:
            times = list(pool.map(
                lambda trial: SamplerService.collection_time(probabilities, trial_rng(seed, trial)), range(trials)
            ))
        return float(np.mean(times))

    # ============================================
    # Convergence experiment
    # ============================================

    @staticmethod
    def _trial_curve(
        distribution: MeasurementDistribution, max_T: int, seed: int, trial: int
    ) -> np.ndarray:
        draws = SamplerService._draw(distribution, max_T, trial_rng(seed, trial))
        first = _first_seen(draws, len(distribution.modes))
        first = first[first > 0]
        T = np.arange(1, max_T + 1)
        return np.searchsorted(np.sort(first), T, side="right") / len(distribution.modes)

    @staticmethod
    def convergence_experiment(
        instance: NetworkInstance,
        max_T: int,
        trials: int,
        seed: int,
        conditional: bool = True,
        threads: int = None,
    ) -> ConvergenceCurve:
        """
        Mean fraction of distinct modes recovered after T = 1..max_T draws

        The crossing is the first T at which the mean recovered count reaches s - 1.
        """
        if trials < 1 or max_T < 1:
            raise UsageError("trials and max_T must be at least 1")
        distribution = (
            SamplerService.conditional_distribution(instance) if conditional
            else SamplerService.measurement_distribution(instance)
        )
        s = len(distribution.modes)
        threads = threads or settings.threads
        with ThreadPoolExecutor(max_workers=threads) as pool:
            curves: List[np.ndarray] = list(pool.map(
                lambda trial: SamplerService._trial_curve(distribution, max_T, seed, trial), range(trials)
            ))
        fractions = np.vstack(curves)
        mean = fractions.mean(axis=0)
        target = (s - 1) / s if s > 1 else 1.0
        reached = np.nonzero(mean >= target - 1e-12)[0]
        crossing = int(reached[0]) + 1 if len(reached) else None
        logger.info(f"Convergence over {trials} trials: s={s}, crossing={crossing}, T*={SamplerService.coupon_threshold(s):.2f}")
        return ConvergenceCurve(
            draws=tuple(range(1, max_T + 1)),
            mean_fraction=tuple(float(x) for x in mean),
            stddev=tuple(float(x) for x in fractions.std(axis=0)),
            trials=trials,
            seed=seed,
            mode_count=s,
            conditional=conditional,
            threshold=SamplerService.coupon_threshold(s),
            crossing=crossing,
        )

    @staticmethod
    def curve_frame(curve: ConvergenceCurve) -> pd.DataFrame:
        """Curve as a DataFrame with columns T, mean_fraction, stddev"""
        return pd.DataFrame({"T": curve.draws, "mean_fraction": curve.mean_fraction, "stddev": curve.stddev})
