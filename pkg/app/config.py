import logging
import sys
from functools import lru_cache
from typing import Optional

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Symbolic case analysis
    eps_sym: float = 1e-9  # snap band for c_i = 0, c_i = c_j, alpha = 1, D = 1
    isomorphism_tol: float = 1e-12

    # Residual decisions
    eps_res: float = 1e-9
    eps_b: float = 1e-12
    unit_tol: float = 1e-9
    check_unit_tol: float = 1e-6  # CLI/API renormalize within this band
    anyq_b_tol: float = 1e-10

    # Numeric scan
    grid_n: int = 128
    reproduce_grid_n: int = 256
    newton_max_iter: int = 50
    newton_tol: float = 1e-12
    newton_step_tol: float = 1e-14
    scan_seed_threshold: float = 0.2
    scan_neighbours: int = 8
    scan_workers: int = 4
    scan_chunk_size: int = 4096
    dedup_angle: float = 1e-6

    # Comparison
    match_angle: float = 1e-6
    match_q: float = 1e-8
    match_q_double_root: float = 1e-6  # charge at a double root is only known to ~sqrt(eps)
    min_family_hits: int = 8

    # Reproduce
    reproduce_samples: int = 5
    reproduce_seed: int = 1

    # Logging
    log_level: str = "WARNING"

    # Environment
    environment: str = "development"

    class Config:
        env_file = ".env"
        env_prefix = "MAGNETIC_"
        extra = "ignore"


@lru_cache()
def get_settings() -> Settings:
    return Settings()


settings = get_settings()


def configure_logging(level: Optional[str] = None) -> None:
    """Send log records to stderr so stdout stays machine-readable."""
    logging.basicConfig(
        stream=sys.stderr,
        level=(level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )
