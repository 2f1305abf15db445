"""
Core configuration module using Pydantic Settings.

This module defines the process-wide settings loaded from environment variables.
Experiment parameters live in schemas.experiment; everything here is about how
the toolkit runs (logging, output location, seeds, parallelism).
"""

from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Toolkit settings loaded from environment variables.

    All settings are read from the environment (prefix ``STATEMERGE_``) or a
    ``.env`` file. ``STATEMERGE_SEED`` and ``STATEMERGE_THREADS`` provide the
    defaults for the ``--seed`` and ``--threads`` CLI flags.
    """

    model_config = SettingsConfigDict(
        env_prefix="STATEMERGE_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # -------------------------------------------------------------------------
    # Application Settings
    # -------------------------------------------------------------------------
    app_name: str = Field(default="statemerge")
    version: str = Field(default="0.1.0")
    debug: bool = Field(default=False)

    # -------------------------------------------------------------------------
    # Run Defaults
    # -------------------------------------------------------------------------
    seed: int = Field(default=0, ge=0, description="Default seed for --seed")
    threads: int = Field(
        default=1, ge=1, le=256, description="Parallel jobs for --threads"
    )
    output_dir: str = Field(default="runs")
    profile: Literal["desk", "paper"] = Field(default="desk")

    # -------------------------------------------------------------------------
    # Logging Configuration
    # -------------------------------------------------------------------------
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="INFO"
    )
    log_format: Literal["json", "console"] = Field(default="console")
    log_file_enabled: bool = Field(default=False)
    log_file_path: str = Field(default="logs/statemerge.log")
    log_file_max_bytes: int = Field(default=10485760)  # 10 MB
    log_file_backup_count: int = Field(default=5)


# Singleton instance of settings
# Import this instance throughout the application
settings = Settings()
