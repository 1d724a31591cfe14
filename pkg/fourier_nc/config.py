"""
Configuration module for the Fourier-NC laboratory
Loads tolerances, guards and reproducibility defaults from the environment (.env supported)
"""
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv
import logging

logger = logging.getLogger(__name__)

# Load environment variables from .env file
load_dotenv()


class Settings(BaseSettings):
    """Laboratory settings loaded from FOURIER_NC_* environment variables

    Guards bound the exhaustive oracles; tolerances define what counts as a
    non-zero coefficient and what counts as an exact reconstruction.
    """

    # Reproducibility
    default_seed: int = 42
    threads: int = 1
    log_level: str = "INFO"

    # Numerical tolerances
    prune_tolerance: float = 1e-12
    reconstruction_tolerance: float = 1e-9

    # Sampling contract (coupon-collector bound)
    delta: float = 0.01
    max_retries: int = 3

    # Exhaustive-search guards
    dense_dft_guard: int = 10**6
    brute_force_guard: int = 10**7
    hybrid_guard: int = 10**6
    tie_search_guard: int = 10**4
    partition_guard: int = 40
    kendall_guard: int = 10
    ecc_guard: int = 30
    abelian_brute_guard: int = 8

    model_config = SettingsConfigDict(
        env_prefix="FOURIER_NC_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",  # Ignore extra fields from .env that aren't in the model
    )

    def __repr__(self) -> str:
        return (
            f"Settings(default_seed={self.default_seed}, threads={self.threads}, "
            f"delta={self.delta}, max_retries={self.max_retries})"
        )


# Global settings instance
settings = Settings()


def validate_settings(current: Settings = None) -> bool:
    """Validate that settings are usable before any experiment starts

    Raises:
        ValueError: if a guard, tolerance or sampling parameter is out of range
    """
    current = current or settings
    problems = []

    if not 0.0 < current.delta < 1.0:
        problems.append("delta must lie in (0, 1)")
    if current.threads < 1:
        problems.append("threads must be >= 1")
    if current.max_retries < 0:
        problems.append("max_retries must be >= 0")
    if current.prune_tolerance <= 0 or current.reconstruction_tolerance <= 0:
        problems.append("tolerances must be positive")

    guards = [
        "dense_dft_guard", "brute_force_guard", "hybrid_guard", "tie_search_guard",
        "partition_guard", "kendall_guard", "ecc_guard", "abelian_brute_guard",
    ]
    problems.extend(f"{name} must be positive" for name in guards if getattr(current, name) <= 0)

    if problems:
        raise ValueError(f"Invalid settings: {'; '.join(problems)}")

    logger.info("Settings validated successfully")
    return True
