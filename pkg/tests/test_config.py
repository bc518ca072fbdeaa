from __future__ import annotations

from logdecomp.config import clear_settings_cache, get_settings


def test_settings_from_environment(isolated_env, monkeypatch):
    monkeypatch.setenv("ENUM_MAX_U", "5")
    monkeypatch.setenv("LATTICE_HILBERT_RANK_CAP", "4")
    monkeypatch.setenv("LOG_JSON_ENABLED", "yes")
    clear_settings_cache()

    settings = get_settings()

    assert settings.environment == "test"
    assert settings.enumeration.max_u == 5
    assert settings.lattice.hilbert_rank_cap == 4
    assert settings.log_json_enabled is True
    assert settings.output_format == "json"


def test_settings_fall_back_on_bad_values(isolated_env, monkeypatch):
    monkeypatch.setenv("OUTPUT_FORMAT", "yaml")
    monkeypatch.setenv("ENUM_MAX_VERTICES", "many")
    monkeypatch.setenv("ENUM_MAX_EDGES", "-3")
    monkeypatch.setenv("LOG_RICH_ENABLED", "perhaps")
    clear_settings_cache()

    settings = get_settings()

    assert settings.output_format == "table"
    assert settings.enumeration.max_vertices == 3
    assert settings.enumeration.max_edges == 0
    assert settings.log_rich_enabled is True


def test_settings_are_cached(isolated_env, monkeypatch):
    first = get_settings()
    monkeypatch.setenv("ENUM_MAX_U", "7")

    assert get_settings() is first
    clear_settings_cache()
    assert get_settings().enumeration.max_u == 7
