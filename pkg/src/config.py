"""Runtime configuration from environment variables.

Configure via environment (or a .env file):
    BOXSPACE_SIZE_CAP=1048576        # max vertices of a homology cover
    BOXSPACE_ORDER_CAP=65536         # max automorphism order before giving up
    BOXSPACE_TOL_PSD=1e-8            # eigenvalue clipping threshold for PSD kernels
    BOXSPACE_TOL_NORM=1e-9           # unit-norm tolerance
    BOXSPACE_EXHAUSTIVE_LIMIT=256    # full-table checks up to this group order
    BOXSPACE_LOG_LEVEL=INFO
"""

import logging
import os
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, replace

from dotenv import load_dotenv


@dataclass(frozen=True)
class Settings:
    size_cap: int = 2**20
    order_cap: int = 2**16
    tol_psd: float = 1e-8
    tol_norm: float = 1e-9
    exhaustive_limit: int = 256
    log_level: str = "INFO"


def _get_int(key: str, default: int) -> int:
    env_val = os.environ.get(key)
    if env_val is None or env_val.strip() == "":
        return default
    value = int(env_val)
    if value <= 0:
        raise ValueError(f"{key} must be positive, got {value}")
    return value


def _get_float(key: str, default: float) -> float:
    env_val = os.environ.get(key)
    if env_val is None or env_val.strip() == "":
        return default
    value = float(env_val)
    if value <= 0:
        raise ValueError(f"{key} must be positive, got {value}")
    return value


def _load_settings() -> Settings:
    load_dotenv()
    defaults = Settings()
    return Settings(
        size_cap=_get_int("BOXSPACE_SIZE_CAP", defaults.size_cap),
        order_cap=_get_int("BOXSPACE_ORDER_CAP", defaults.order_cap),
        tol_psd=_get_float("BOXSPACE_TOL_PSD", defaults.tol_psd),
        tol_norm=_get_float("BOXSPACE_TOL_NORM", defaults.tol_norm),
        exhaustive_limit=_get_int("BOXSPACE_EXHAUSTIVE_LIMIT", defaults.exhaustive_limit),
        log_level=os.environ.get("BOXSPACE_LOG_LEVEL", defaults.log_level).upper(),
    )


# Module-level cache (computed on first use)
_SETTINGS: Settings | None = None


def get_settings() -> Settings:
    """Return the process-wide settings, reading the environment on first use."""
    global _SETTINGS
    if _SETTINGS is None:
        _SETTINGS = _load_settings()
        logging.getLogger("config").debug(f"Loaded settings: {_SETTINGS}")
    return _SETTINGS


def reset_settings() -> None:
    """Forget cached settings so the next call re-reads the environment."""
    global _SETTINGS
    _SETTINGS = None


@contextmanager
def overridden_settings(**changes) -> Iterator[Settings]:
    """Settings with the given non-None fields replaced until the block exits.

    The environment is left alone; the previous cache is restored afterwards.
    """
    global _SETTINGS
    previous = _SETTINGS
    _SETTINGS = replace(get_settings(), **{key: value for key, value in changes.items() if value is not None})
    try:
        yield _SETTINGS
    finally:
        _SETTINGS = previous
