"""Process-wide settings for the SDF simulator."""

from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from .constants import (
    DEFAULT_FOCK_DIM,
    DEFAULT_SERIES_ORDER,
    DEFAULT_STEPS_PER_PERIOD,
    DEFAULT_TRUNCATION_THRESHOLD,
)


class SimulationSettings(BaseSettings):
    """Numerical defaults applied when a config leaves them unset."""

    model_config = SettingsConfigDict(env_prefix="SIGMAZ_SDF_SIMULATION_")

    fock_dim: int = Field(default=DEFAULT_FOCK_DIM, ge=2)
    steps_per_period: int = Field(default=DEFAULT_STEPS_PER_PERIOD, ge=4)
    truncation_threshold: float = Field(default=DEFAULT_TRUNCATION_THRESHOLD, gt=0)
    series_order: int = Field(default=DEFAULT_SERIES_ORDER, ge=1)
    method: str = "magnus4"


class ExecutionSettings(BaseSettings):
    """Sweep execution configuration."""

    model_config = SettingsConfigDict(env_prefix="SIGMAZ_SDF_EXECUTION_")

    # conservative, balanced, aggressive, maximum
    performance_mode: str = "balanced"
    max_workers: Optional[int] = None  # Auto-calculated if None
    fail_fast: bool = False


class LoggingSettings(BaseSettings):
    """Logging configuration."""

    model_config = SettingsConfigDict(env_prefix="SIGMAZ_SDF_LOGGING_")

    level: str = "WARNING"
    format: str = "console"
    file_path: Optional[str] = None


class StorageSettings(BaseSettings):
    """Storage configuration."""

    model_config = SettingsConfigDict(env_prefix="SIGMAZ_SDF_STORAGE_")

    results_dir: Path = Path("results")


class Settings(BaseSettings):
    """Main application settings."""

    model_config = SettingsConfigDict(
        env_prefix="SIGMAZ_SDF_",
        env_file=".env",
        env_nested_delimiter="__",
        extra="ignore",
    )

    debug: bool = False

    simulation: SimulationSettings = Field(default_factory=SimulationSettings)
    execution: ExecutionSettings = Field(default_factory=ExecutionSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)
    storage: StorageSettings = Field(default_factory=StorageSettings)


settings = Settings()
