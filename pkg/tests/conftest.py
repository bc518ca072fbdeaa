from __future__ import annotations

from pathlib import Path

import pytest

from logdecomp.config import clear_settings_cache
from logdecomp.formats import build_complex, build_type, read_document

FIXTURE_DATA = Path(__file__).resolve().parents[1] / "src" / "logdecomp" / "fixture_data"


@pytest.fixture
def isolated_env(monkeypatch):
    """Pin settings to known values and reset the cache around the test."""
    monkeypatch.setenv("APP_ENVIRONMENT", "test")
    monkeypatch.setenv("LATTICE_HILBERT_RANK_CAP", "3")
    monkeypatch.setenv("GROUP_BRUTE_FORCE_LIMIT", "10000")
    monkeypatch.setenv("ENUM_MAX_VERTICES", "3")
    monkeypatch.setenv("ENUM_MAX_EDGES", "4")
    monkeypatch.setenv("ENUM_MAX_U", "2")
    monkeypatch.setenv("OUTPUT_FORMAT", "json")
    monkeypatch.setenv("LOG_LEVEL", "ERROR")
    monkeypatch.setenv("LOG_RICH_ENABLED", "false")
    clear_settings_cache()
    try:
        yield
    finally:
        clear_settings_cache()


@pytest.fixture
def fixture_path():
    def resolve(fixture: str, filename: str) -> Path:
        return FIXTURE_DATA / fixture / filename

    return resolve


@pytest.fixture
def load_complex(fixture_path):
    def load(fixture: str, filename: str = "complex.json"):
        return build_complex(read_document(fixture_path(fixture, filename)))

    return load


@pytest.fixture
def load_type(fixture_path):
    def load(fixture: str, filename: str):
        return build_type(read_document(fixture_path(fixture, filename), "type"))

    return load
