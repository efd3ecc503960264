"""
Runtime settings loaded from the environment.

A `.env` file in the working directory is honoured through python-dotenv, the
same way the web application reads its configuration.
"""

import logging
import os
from dataclasses import dataclass

from dotenv import find_dotenv, load_dotenv

from abflux.errors import ConfigError

logger = logging.getLogger(__name__)

TRUTHY = ("true", "1", "yes")


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from e


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return float(raw)
    except ValueError as e:
        raise ConfigError(f"{name} must be a number, got {raw!r}") from e


@dataclass(frozen=True)
class Settings:
    """Process-wide knobs for the CLI and the HTTP server."""

    log_level: str = "INFO"
    workers: int = 1
    max_sweep_points: int = 1_000_000
    forward_cone: float = 1e-4
    port: int = 3000
    debug: bool = False

    @classmethod
    def from_env(cls) -> "Settings":
        """Build settings from ABFLUX_* variables (and PORT / FLASK_DEBUG)."""
        load_dotenv(find_dotenv(usecwd=True))
        settings = cls(
            log_level=os.getenv("ABFLUX_LOG_LEVEL", "INFO").upper(),
            workers=_env_int("ABFLUX_WORKERS", 1),
            max_sweep_points=_env_int("ABFLUX_MAX_SWEEP_POINTS", 1_000_000),
            forward_cone=_env_float("ABFLUX_FORWARD_CONE", 1e-4),
            port=_env_int("PORT", 3000),
            debug=os.getenv("FLASK_DEBUG", "false").lower() in TRUTHY,
        )
        if settings.workers < 1:
            raise ConfigError("ABFLUX_WORKERS must be at least 1")
        if settings.max_sweep_points < 1:
            raise ConfigError("ABFLUX_MAX_SWEEP_POINTS must be at least 1")
        if not 0.0 < settings.forward_cone < 3.14:
            raise ConfigError("ABFLUX_FORWARD_CONE must lie in (0, pi)")
        if not isinstance(logging.getLevelName(settings.log_level), int):
            raise ConfigError(f"Unknown ABFLUX_LOG_LEVEL {settings.log_level!r}")
        return settings
