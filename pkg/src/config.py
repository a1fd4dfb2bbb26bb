from functools import lru_cache
from typing import Literal, Optional

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Centralized lab configuration using Pydantic Settings.
    Reads from environment variables and .env file.
    """

    # App Config
    APP_NAME: str = "regulus"
    APP_VERSION: str = "0.1.0"
    DEBUG: bool = False

    # Randomness
    REGULUS_SEED: Optional[int] = None  # Fallback master seed when --seed is absent

    # Harness
    THREADS: Optional[int] = None  # None = all available cores
    CI_METHOD: Literal["wilson", "clopper-pearson"] = "wilson"
    CI_LEVEL: float = 0.95
    MIN_SUCCESSES: int = 50  # Scaling points below this are flagged
    SIMPLE_MAX_ATTEMPTS: int = 10_000  # Rejection cap when conditioning on simplicity

    # Oracles
    EXACT_MAX_HORIZON: int = 30  # Lattice DP runs in exact rationals up to this horizon
    ORACLE_MAX_STUBS: int = 14  # Enumeration cap on d*n

    # Output
    FLOAT_DIGITS: int = 12

    # Logging
    LOG_LEVEL: str = "INFO"

    # Run audit trail
    AUDIT_LOG_ENABLED: bool = True
    AUDIT_LOG_PATH: str = "logs/audit.log"

    # Prometheus textfile export (node-exporter style), disabled when unset
    METRICS_TEXTFILE: Optional[str] = None

    # OpenTelemetry Tracing
    OTEL_ENABLED: bool = False
    OTEL_EXPORTER_OTLP_ENDPOINT: str = "http://localhost:4318/v1/traces"
    OTEL_SERVICE_NAME: str = "regulus"

    model_config = SettingsConfigDict(
        env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    @field_validator("CI_LEVEL")
    @classmethod
    def _level_in_unit_interval(cls, v: float) -> float:
        if not 0 < v < 1:
            raise ValueError("CI_LEVEL must lie in (0, 1)")
        return v

    @field_validator("THREADS", "SIMPLE_MAX_ATTEMPTS", "EXACT_MAX_HORIZON", "ORACLE_MAX_STUBS")
    @classmethod
    def _positive(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError("must be >= 1")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def _upper(cls, v: str) -> str:
        return v.upper()


@lru_cache
def get_settings():
    try:
        return Settings()
    except PermissionError:
        # Fallback if .env is inaccessible (e.g. during CI/constrained environments)
        # Pydantic will still use environment variables
        class SafeSettings(Settings):
            model_config = SettingsConfigDict(env_file=None)

        return SafeSettings()


settings = get_settings()
