"""Configuration management."""

import os
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

from .errors import ConfigError

try:
    from dotenv import dotenv_values, load_dotenv
    load_dotenv()
except ImportError:
    dotenv_values = None  # python-dotenv is optional for env-only use

ENV_PREFIX = "PAIRLAB_"


@dataclass
class NumericsConfig:
    """Truncation and tolerance settings."""
    n_max: int = 60                  # default shell truncation of the ground-state series
    n_max_cap: int = 200             # escalation ceiling
    norm_tolerance: float = 1e-3     # bosonic defect that triggers escalation
    max_defect: float = 0.5          # decompositions refuse above this defect
    rank_threshold: float = 1e-10    # eigenvalues above count toward rank
    pairing_tolerance: float = 1e-6  # Slater doublet agreement


@dataclass
class GridConfig:
    """Quadrature grid for the oracle."""
    extent: float = 12.0  # half-width L
    points: int = 801     # odd point count


@dataclass
class RuntimeConfig:
    """Process-level settings."""
    threads: int = field(default_factory=lambda: os.cpu_count() or 1)
    output_format: str = "csv"  # "csv" or "json"
    log_level: str = "INFO"


@dataclass
class AppConfig:
    """Complete application configuration."""
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    runtime: RuntimeConfig = field(default_factory=RuntimeConfig)


# key -> (section, attribute, parser)
_KEYS = {
    "N_MAX": ("numerics", "n_max", int),
    "N_MAX_CAP": ("numerics", "n_max_cap", int),
    "NORM_TOLERANCE": ("numerics", "norm_tolerance", float),
    "MAX_DEFECT": ("numerics", "max_defect", float),
    "RANK_THRESHOLD": ("numerics", "rank_threshold", float),
    "PAIRING_TOLERANCE": ("numerics", "pairing_tolerance", float),
    "GRID_EXTENT": ("grid", "extent", float),
    "GRID_POINTS": ("grid", "points", int),
    "THREADS": ("runtime", "threads", int),
    "FORMAT": ("runtime", "output_format", str),
    "LOG_LEVEL": ("runtime", "log_level", str),
}


def _normalize_key(key: str) -> str:
    key = key.strip().upper().replace("-", "_")
    if key.startswith(ENV_PREFIX):
        key = key[len(ENV_PREFIX):]
    return key


def _read_env() -> Dict[str, str]:
    """Collect PAIRLAB_* variables plus LOG_LEVEL from the environment."""
    values = {}
    for key in _KEYS:
        raw = os.getenv(f"{ENV_PREFIX}{key}")
        if raw is not None and raw.strip():
            values[key] = raw
    log_level = os.getenv("LOG_LEVEL")
    if log_level and "LOG_LEVEL" not in values:
        values["LOG_LEVEL"] = log_level
    return values


def read_config_file(path: str) -> Dict[str, str]:
    """
    Parse a key=value config file.

    Args:
        path: Path to the file. Keys may carry the PAIRLAB_ prefix; case is ignored.

    Returns:
        Mapping of normalized keys to raw string values.

    Raises:
        ConfigError: If the file is missing, python-dotenv is unavailable,
            or a key is unknown.
    """
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    if dotenv_values is None:
        raise ConfigError("python-dotenv is required to read --config files")
    values = {}
    for key, raw in dotenv_values(path).items():
        name = _normalize_key(key)
        if name not in _KEYS:
            raise ConfigError(f"unknown config key '{key}' in {path}")
        if raw is None:
            raise ConfigError(f"config key '{key}' in {path} has no value")
        values[name] = raw
    return values


def _apply(config: AppConfig, key: str, raw) -> None:
    section_name, attribute, parser = _KEYS[key]
    try:
        value = parser(raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid value for {key}: {raw!r}") from e
    setattr(getattr(config, section_name), attribute, value)


def validate_config(config: AppConfig) -> AppConfig:
    """Check ranges; raise ConfigError on the first violation."""
    numerics, grid, runtime = config.numerics, config.grid, config.runtime
    if numerics.n_max < 1:
        raise ConfigError(f"n_max must be positive, got {numerics.n_max}")
    if numerics.n_max_cap < numerics.n_max:
        raise ConfigError(f"n_max_cap ({numerics.n_max_cap}) is below n_max ({numerics.n_max})")
    if numerics.norm_tolerance <= 0 or numerics.max_defect <= 0:
        raise ConfigError("tolerances must be positive")
    if grid.extent <= 0:
        raise ConfigError(f"grid extent must be positive, got {grid.extent}")
    if grid.points < 3 or grid.points % 2 == 0:
        raise ConfigError(f"grid points must be odd and at least 3, got {grid.points}")
    if runtime.threads < 1:
        raise ConfigError(f"threads must be at least 1, got {runtime.threads}")
    if runtime.output_format not in ("csv", "json"):
        raise ConfigError(f"output format must be csv or json, got {runtime.output_format}")
    runtime.log_level = runtime.log_level.upper()
    return config


def load_config(config_file: Optional[str] = None, overrides: Optional[Mapping[str, object]] = None) -> AppConfig:
    """
    Load configuration from defaults, environment, an optional file and CLI overrides.

    Later sources win: defaults < environment < config file < overrides.
    Override keys use the same names as the file (e.g. "n_max", "threads");
    None values are ignored so unset CLI flags fall through.

    Raises:
        ConfigError: If any value is invalid.
    """
    config = AppConfig()
    for key, raw in _read_env().items():
        _apply(config, key, raw)
    if config_file:
        for key, raw in read_config_file(config_file).items():
            _apply(config, key, raw)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        name = _normalize_key(key)
        if name not in _KEYS:
            raise ConfigError(f"unknown override '{key}'")
        _apply(config, name, value)
    return validate_config(config)
