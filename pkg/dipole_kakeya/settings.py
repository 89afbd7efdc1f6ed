import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Literal

from pydantic_settings import BaseSettings, SettingsConfigDict

ENVIRONMENT = os.getenv("ENVIRONMENT", "dev")
BASE_DIR = Path(__file__).parent

_runtime_overrides: Dict[str, Any] = {}


class Settings(BaseSettings):
    # Geometry tolerances
    geometry_tolerance: float = 1e-12  # exact identities (unit radius, pivots)
    containment_slack: float = 1e-9
    unit_pair_tolerance: float = 1e-9

    # Resource caps
    point_cap: int = 50_000_000
    arc_cap: int = 50_000_000

    # Randomness
    seed: int = 20240417

    # Default desk schedule: delta_k = 2^-(a*k^2 + b*k + offset)
    schedule_a: float = 1.0
    schedule_b: float = 0.0
    schedule_offset: float = 2.0

    # Covering counts
    arc_sample_fraction: float = 0.25  # arcs sampled at r/4
    min_cover_scale: float = 2.0**-40
    assouad_max_centres: int = 10_000

    # Incidence machinery
    degree_threshold_factor: float = 100.0
    annulus_width_factor: float = 10.0
    window_factor: float = 100.0
    oracle_sample_fraction: float = 0.1  # circle sampled at delta/10
    oracle_coarse_samples: int = 65_536

    # Sampling of arcs when measuring direction coverage
    coverage_samples_per_arc: int = 2048

    # Output
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    output_dir: str = "."

    model_config = SettingsConfigDict(
        env_file=BASE_DIR / f".{ENVIRONMENT}.env",
        env_file_encoding="utf-8",
        env_prefix="DK_",
    )


def configure_settings(**kwargs):
    """
    Configure settings with runtime overrides.

    Updates the runtime overrides dictionary and clears the settings cache.
    Runtime overrides take precedence over environment variables.

    Args:
        **kwargs: Settings to override (e.g., seed=7, point_cap=10**6)

    Example:
        configure_settings(
            point_cap=200_000_000,
            log_level="DEBUG",
        )
    """
    global _runtime_overrides
    _runtime_overrides.update(kwargs)
    get_settings.cache_clear()


def reset_settings() -> None:
    """Drop every runtime override and rebuild settings from the environment."""
    _runtime_overrides.clear()
    get_settings.cache_clear()


@lru_cache
def get_settings() -> Settings:
    """
    Get the current settings.
    If `configure_settings()` was called, runtime overrides take precedence.
    Otherwise, loads from environment variables (defaults).
    """
    return Settings(**_runtime_overrides)
