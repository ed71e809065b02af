"""
Configuration for scale_variations.

Numerical defaults live here so every operation can fall back on one place.
Values come from environment variables prefixed with SCALE_ (or a local .env
file); explicit keyword arguments on the public functions always win.

USAGE:
    from scale_variations.config import settings

    tol = settings.residual_tol

    # Override for one shell session
    export SCALE_SCAN_POINTS=400
    export SCALE_LOG_JSON=true
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from scale_variations.logging_config import get_logger

logger = get_logger(__name__)


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="SCALE_", env_file=".env", case_sensitive=False, extra="ignore")

    # Logging
    log_level: str = "INFO"
    log_json: bool = False

    # Residual verdicts: |r| <= residual_tol + consistency_slack * h
    residual_tol: float = Field(1e-6, gt=0)
    consistency_slack: float = Field(0.75, ge=0)

    # Inner Newton solve
    newton_step_tol: float = Field(1e-10, gt=0)
    newton_max_iter: int = Field(200, ge=1)
    newton_residual_floor: float = Field(1e-8, gt=0)
    jacobian_step: float = Field(1e-7, gt=0)

    # Free terminal point scan
    scan_points: int = Field(200, ge=3)
    indeterminate_fraction: float = Field(0.5, gt=0, le=1)

    # Gateaux oracle
    gateaux_eps: float = Field(1e-5, gt=0)

    # Extrapolation ladders
    ladder_ratio: float = Field(0.5, gt=0, lt=1)
    ladder_rungs: int = Field(5, ge=3)
    ladder_tol: float = Field(1e-6, gt=0)

    # Hoelder exponent fit: dyadic scales 2^-min .. 2^-max
    holder_min_exp: int = Field(4, ge=1)
    holder_max_exp: int = Field(12, ge=2)

    # Generators and identity checks
    weierstrass_terms: int = Field(30, ge=1)
    identity_tol: float = Field(0.5, gt=0)
    hypothesis_draws: int = Field(5, ge=1)


settings = Settings()


def print_config_summary() -> None:
    """Log the effective configuration (useful at CLI start-up with --verbose logging)."""
    logger.info("Effective configuration", **settings.model_dump())
