"""Toolkit configuration via Pydantic Settings.

Reads environment variables (and an optional .env file) and validates
them once. Use ``get_settings()`` to obtain a cached singleton.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Literal

from pydantic import field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

EntryMethod = Literal["auto", "quadrature", "confluent"]


class Settings(BaseSettings):
    """Validated numerical defaults sourced from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
    )

    # --- Logging ----------------------------------------------------------
    LOG_LEVEL: str = "WARNING"

    # --- Exact (Hankel) paths --------------------------------------------
    HANKEL_PRECISION_BITS: int = 256
    GUARD_BITS_PER_N: int = 8
    ENTRY_METHOD: EntryMethod = "auto"
    QUADRATURE_MAX_NODES: int = 512

    # --- Fredholm determinants -------------------------------------------
    FREDHOLM_TOLERANCE: float = 1e-10
    FREDHOLM_CUTOFF: float = 2500.0
    FREDHOLM_MAX_NODES: int = 1024

    # --- Limits / extrapolation ------------------------------------------
    RICHARDSON_EXPONENTS: str = "1,2,3"
    REFERENCE_B: float = 0.5

    # --- Monte Carlo -----------------------------------------------------
    MC_CHAINS: int = 1000
    MC_BURN_IN: int = 400
    MC_THINNING: int = 2

    # --- Runtime ---------------------------------------------------------
    MAX_WORKERS: int = 1
    MOMENTS_CACHE_DIR: str = ".moments-cache"

    # --- Validators ------------------------------------------------------
    @field_validator("LOG_LEVEL")
    @classmethod
    def _validate_log_level(cls, v: str) -> str:
        level = v.strip().upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"LOG_LEVEL must be a logging level name, got {v!r}")
        return level

    @field_validator("HANKEL_PRECISION_BITS")
    @classmethod
    def _validate_precision(cls, v: int) -> int:
        if v < 64:
            raise ValueError("HANKEL_PRECISION_BITS must be at least 64")
        return v

    @field_validator("GUARD_BITS_PER_N")
    @classmethod
    def _validate_guard_bits(cls, v: int) -> int:
        if v < 0:
            raise ValueError("GUARD_BITS_PER_N must not be negative")
        return v

    @field_validator(
        "QUADRATURE_MAX_NODES",
        "FREDHOLM_TOLERANCE",
        "FREDHOLM_CUTOFF",
        "FREDHOLM_MAX_NODES",
        "MC_CHAINS",
        "MC_BURN_IN",
        "MC_THINNING",
    )
    @classmethod
    def _validate_positive(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("Value must be positive")
        return v

    @field_validator("MAX_WORKERS")
    @classmethod
    def _validate_workers(cls, v: int) -> int:
        if v < 1:
            raise ValueError("MAX_WORKERS must be at least 1")
        return v

    @field_validator("REFERENCE_B")
    @classmethod
    def _validate_reference_b(cls, v: float) -> float:
        if v <= -1:
            raise ValueError("REFERENCE_B must be greater than -1")
        return v

    @field_validator("RICHARDSON_EXPONENTS")
    @classmethod
    def _validate_exponents(cls, v: str) -> str:
        try:
            values = [int(x.strip()) for x in v.split(",") if x.strip()]
        except ValueError:
            raise ValueError("RICHARDSON_EXPONENTS must be a comma-separated list of integers")
        if not values or any(p <= 0 for p in values):
            raise ValueError("RICHARDSON_EXPONENTS must list positive integers")
        return v

    @model_validator(mode="after")
    def _validate_fredholm_nodes(self) -> Settings:
        """The doubling cap must leave room for at least one refinement."""
        if self.FREDHOLM_MAX_NODES < 32:
            raise ValueError("FREDHOLM_MAX_NODES must be at least 32")
        return self

    @property
    def richardson_exponents_list(self) -> list[int]:
        """Return parsed RICHARDSON_EXPONENTS as a list of ints."""
        return [int(x.strip()) for x in self.RICHARDSON_EXPONENTS.split(",") if x.strip()]


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return a cached Settings singleton."""
    return Settings()
