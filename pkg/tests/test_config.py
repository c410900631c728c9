"""Configuration precedence and validation."""

from __future__ import annotations

import pytest

from pairlab.config import _KEYS, ENV_PREFIX, load_config, read_config_file
from pairlab.errors import ConfigError


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in _KEYS:
        monkeypatch.delenv(f"{ENV_PREFIX}{key}", raising=False)
    monkeypatch.delenv("LOG_LEVEL", raising=False)


def _write(tmp_path, text: str) -> str:
    path = tmp_path / "pairlab.env"
    path.write_text(text)
    return str(path)


def test_defaults():
    config = load_config()
    assert config.numerics.n_max == 60
    assert config.numerics.n_max_cap == 200
    assert config.numerics.max_defect == 0.5
    assert config.grid.extent == 12.0
    assert config.grid.points == 801
    assert config.runtime.output_format == "csv"
    assert config.runtime.log_level == "INFO"
    assert config.runtime.threads >= 1


def test_environment_overrides_defaults(monkeypatch):
    monkeypatch.setenv("PAIRLAB_N_MAX", "40")
    monkeypatch.setenv("LOG_LEVEL", "debug")
    config = load_config()
    assert config.numerics.n_max == 40
    assert config.runtime.log_level == "DEBUG"


def test_file_overrides_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("PAIRLAB_N_MAX", "40")
    path = _write(tmp_path, "PAIRLAB_N_MAX=80\nmax_defect=0.1\n")
    config = load_config(path)
    assert config.numerics.n_max == 80
    assert config.numerics.max_defect == 0.1


def test_overrides_win_and_none_falls_through(tmp_path):
    path = _write(tmp_path, "N_MAX=80\nGRID_POINTS=401\n")
    config = load_config(path, {"n_max": 100, "grid_points": None, "format": "json"})
    assert config.numerics.n_max == 100
    assert config.grid.points == 401
    assert config.runtime.output_format == "json"


def test_read_config_file_normalizes_keys(tmp_path):
    path = _write(tmp_path, "pairlab_threads=3\ngrid-extent=9\n")
    assert read_config_file(path) == {"THREADS": "3", "GRID_EXTENT": "9"}


@pytest.mark.parametrize(
    "text",
    ["COLOUR=blue\n", "GRID_POINTS=800\n", "THREADS=0\n", "FORMAT=xml\n", "N_MAX=abc\n", "N_MAX=300\n"],
)
def test_invalid_file_values(tmp_path, text):
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, text))


def test_missing_file_and_unknown_override(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.env"))
    with pytest.raises(ConfigError):
        load_config(overrides={"colour": "blue"})
