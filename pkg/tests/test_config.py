import pytest
from pydantic import ValidationError

from graphca.config import Settings, get_settings


def test_defaults():
    settings = Settings()
    assert settings.max_vertices == 4
    assert settings.budget_configs == 2 ** 24
    assert settings.schema_version == 1


def test_environment_override(monkeypatch):
    monkeypatch.setenv("GRAPHCA_BUDGET_STATES", "128")
    monkeypatch.setenv("GRAPHCA_JOBS", "3")
    get_settings.cache_clear()
    settings = get_settings()
    assert settings.budget_states == 128
    assert settings.jobs == 3
    assert get_settings() is settings


def test_isolated_cache_location(tmp_path):
    settings = get_settings()
    assert settings.cache_backend == "none"
    assert settings.cache_dir == str(tmp_path / "cache")


@pytest.mark.parametrize("name", ["GRAPHCA_BUDGET_CONFIGS", "GRAPHCA_MAX_STEPS", "GRAPHCA_JOBS"])
def test_non_positive_limits_rejected(monkeypatch, name):
    monkeypatch.setenv(name, "0")
    with pytest.raises(ValidationError):
        Settings()


def test_settings_config(monkeypatch):
    assert Settings.model_config["env_prefix"] == "GRAPHCA_"
    monkeypatch.setenv("graphca_log_level", "DEBUG")
    monkeypatch.setenv("GRAPHCA_NOT_A_FIELD", "x")
    settings = Settings()
    assert settings.log_level == "DEBUG"
    assert not hasattr(settings, "not_a_field")
