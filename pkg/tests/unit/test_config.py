"""Tests for environment-driven settings."""

import pytest

from abflux.config import Settings
from abflux.errors import ConfigError

ENV_NAMES = (
    "ABFLUX_LOG_LEVEL",
    "ABFLUX_WORKERS",
    "ABFLUX_MAX_SWEEP_POINTS",
    "ABFLUX_FORWARD_CONE",
    "PORT",
    "FLASK_DEBUG",
)


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    """Settings read from an empty environment and a directory without .env."""
    for name in ENV_NAMES:
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
    return monkeypatch


class TestSettings:
    """Tests for Settings.from_env."""

    def test_defaults(self, clean_env):
        settings = Settings.from_env()
        assert settings == Settings()
        assert settings.max_sweep_points == 1_000_000
        assert settings.forward_cone == 1e-4

    def test_reads_environment(self, clean_env):
        clean_env.setenv("ABFLUX_LOG_LEVEL", "debug")
        clean_env.setenv("ABFLUX_WORKERS", "4")
        clean_env.setenv("ABFLUX_MAX_SWEEP_POINTS", "10")
        clean_env.setenv("FLASK_DEBUG", "yes")
        settings = Settings.from_env()
        assert settings.log_level == "DEBUG"
        assert settings.workers == 4
        assert settings.max_sweep_points == 10
        assert settings.debug is True

    def test_reads_dotenv_file(self, clean_env, tmp_path):
        (tmp_path / ".env").write_text("ABFLUX_WORKERS=3\n", encoding="utf-8")
        assert Settings.from_env().workers == 3

    @pytest.mark.parametrize(
        "name,value",
        [
            ("ABFLUX_WORKERS", "many"),
            ("ABFLUX_WORKERS", "0"),
            ("ABFLUX_MAX_SWEEP_POINTS", "-1"),
            ("ABFLUX_FORWARD_CONE", "4.0"),
            ("ABFLUX_FORWARD_CONE", "tiny"),
            ("ABFLUX_LOG_LEVEL", "LOUD"),
        ],
    )
    def test_rejects_invalid_values(self, clean_env, name, value):
        clean_env.setenv(name, value)
        with pytest.raises(ConfigError):
            Settings.from_env()
