"""
Core configuration management for the Driven Dicke Toolkit.
Process-level settings come from the environment (or a .env file);
per-run physics lives in ``dicke_toolkit.models.run_config``.
"""

import os
from enum import Enum
from typing import Optional

from pydantic import AliasChoices, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class LogLevel(str, Enum):
    """Logging levels."""
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class IntegratorMethod(str, Enum):
    """Time-stepping schemes available to the trajectory integrators."""
    RK45 = "RK45"
    DOP853 = "DOP853"
    RK4 = "RK4"


class PropagatorMethod(str, Enum):
    """Schemes for the linear propagator used by Floquet analysis."""
    ADAPTIVE = "adaptive"
    MAGNUS = "magnus"


class IntegratorDefaults(BaseSettings):
    """Default tolerances for mean-field and joint integrations."""
    model_config = SettingsConfigDict(env_prefix="DICKE_", extra="ignore")

    method: IntegratorMethod = Field(default=IntegratorMethod.DOP853)
    rtol: float = Field(default=1e-10, gt=0)
    atol: float = Field(default=1e-12, gt=0)


class FloquetDefaults(BaseSettings):
    """Floquet and stability-sweep configuration."""
    model_config = SettingsConfigDict(env_prefix="DICKE_FLOQUET_", extra="ignore")

    rtol: float = Field(default=1e-12, gt=0)
    atol: float = Field(default=1e-14, gt=0)
    gamma_threshold: float = Field(default=1e-8, gt=0)
    sweep_method: PropagatorMethod = Field(default=PropagatorMethod.MAGNUS)
    # Magnus step in units of the inverse fastest frequency of the drive.
    magnus_step: float = Field(default=0.05, gt=0)


class MonitoringConfig(BaseSettings):
    """Run-metrics configuration."""
    model_config = SettingsConfigDict(env_prefix="DICKE_METRICS_", extra="ignore")

    enabled: bool = Field(default=True)
    filename: str = Field(default="metrics.prom")


class Settings(BaseSettings):
    """Main application settings."""
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
        populate_by_name=True,
    )

    # Application
    app_name: str = Field(default="Driven Dicke Toolkit")
    version: str = Field(default="0.1.0")
    debug: bool = Field(default=False)
    log_level: LogLevel = Field(default=LogLevel.INFO)

    # Worker pool size for sweeps; None falls back to the CPU count.
    workers: Optional[int] = Field(
        default=None, validation_alias=AliasChoices("DICKE_WORKERS", "workers")
    )

    # Sub-configurations
    integrator: IntegratorDefaults = IntegratorDefaults()
    floquet: FloquetDefaults = FloquetDefaults()
    monitoring: MonitoringConfig = MonitoringConfig()

    @field_validator("workers")
    @classmethod
    def validate_workers(cls, v: Optional[int]) -> Optional[int]:
        """A worker count must be positive when given."""
        if v is not None and v < 1:
            raise ValueError("DICKE_WORKERS must be >= 1")
        return v

    def default_workers(self) -> int:
        """Worker count used when neither the CLI nor the run config sets one."""
        return self.workers or os.cpu_count() or 1


# Global settings instance
settings = Settings()
