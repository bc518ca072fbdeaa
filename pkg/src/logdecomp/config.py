"""Settings for logdecomp: capability caps, enumeration defaults, output and logging.

Values come from a ``.env`` file in the working directory when one exists and
from the process environment otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Final, Literal

from decouple import Config as DecoupleConfig, RepositoryEnv

_DOTENV: Final[Path] = Path(".env")

if _DOTENV.exists():
    _source: Final[DecoupleConfig] = DecoupleConfig(RepositoryEnv(str(_DOTENV)))
else:
    from decouple import config as _env_config
    _source: Final[DecoupleConfig] = _env_config  # type: ignore[assignment]

OutputFormat = Literal["table", "json"]

_TRUTHY: Final = frozenset({"1", "true", "t", "yes", "y", "on"})
_FALSY: Final = frozenset({"0", "false", "f", "no", "n", "off"})


@dataclass(slots=True, frozen=True)
class LatticeSettings:
    """Capability limits of the lattice kernel."""

    hilbert_rank_cap: int
    group_bruteforce_limit: int


@dataclass(slots=True, frozen=True)
class EnumerationSettings:
    max_vertices: int
    max_edges: int
    max_u: int


@dataclass(slots=True, frozen=True)
class Settings:
    environment: str
    lattice: LatticeSettings
    enumeration: EnumerationSettings
    output_format: OutputFormat
    log_level: str
    log_json_enabled: bool
    log_rich_enabled: bool


def _raw(name: str, default: str) -> str:
    return str(_source(name, default=default))


def _bool(value: str, *, default: bool) -> bool:
    flag = value.strip().lower()
    if flag in _TRUTHY:
        return True
    if flag in _FALSY:
        return False
    return default


def _int(value: str, *, default: int) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        return default


def _at_least(name: str, default: int, floor: int) -> int:
    """Integer setting clamped below by ``floor``; unparsable values give ``default``."""
    return max(floor, _int(_raw(name, str(default)), default=default))


def _output_format() -> OutputFormat:
    value = _raw("OUTPUT_FORMAT", "table").strip().lower()
    return "json" if value == "json" else "table"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings(
        environment=_raw("APP_ENVIRONMENT", "development"),
        lattice=LatticeSettings(
            hilbert_rank_cap=_at_least("LATTICE_HILBERT_RANK_CAP", 3, 1),
            group_bruteforce_limit=_at_least("GROUP_BRUTE_FORCE_LIMIT", 10_000, 0),
        ),
        enumeration=EnumerationSettings(
            max_vertices=_at_least("ENUM_MAX_VERTICES", 3, 1),
            max_edges=_at_least("ENUM_MAX_EDGES", 4, 0),
            max_u=_at_least("ENUM_MAX_U", 2, 1),
        ),
        output_format=_output_format(),
        log_level=_raw("LOG_LEVEL", "WARNING"),
        log_json_enabled=_bool(_raw("LOG_JSON_ENABLED", "false"), default=False),
        log_rich_enabled=_bool(_raw("LOG_RICH_ENABLED", "true"), default=True),
    )


def clear_settings_cache() -> None:
    """Forget cached settings so the next ``get_settings()`` rereads the environment."""
    get_settings.cache_clear()
