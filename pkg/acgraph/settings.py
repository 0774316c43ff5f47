"""Environment-driven defaults shared by the library and the cli."""

from __future__ import annotations

from dataclasses import dataclass
import os

from .utils import LOG_ENV, env_int

BITS_ENV = "AC_GRAPH_BITS"
MAX_HALVINGS_ENV = "AC_GRAPH_MAX_HALVINGS"

DEFAULT_BITS = 64
DEFAULT_MAX_HALVINGS = 24


def default_bits() -> int:
    return env_int(BITS_ENV, DEFAULT_BITS, minimum=2)


def default_max_halvings() -> int:
    return env_int(MAX_HALVINGS_ENV, DEFAULT_MAX_HALVINGS, minimum=1)


@dataclass(frozen=True)
class Settings:
    bits: int = DEFAULT_BITS
    max_halvings: int = DEFAULT_MAX_HALVINGS
    log_path: str = ""


def load_settings() -> Settings:
    return Settings(
        bits=default_bits(),
        max_halvings=default_max_halvings(),
        log_path=str(os.environ.get(LOG_ENV) or "").strip(),
    )
