"""Unit tests for the environment-driven lab configuration."""

import os
from unittest.mock import patch

import pytest

from entropy_lab.core.config import LabConfig
from entropy_lab.core.constants import QuadratureDefaults


class TestLabConfig:
    """Test dataclass-based configuration."""

    def test_config_defaults(self):
        """Test that default config values are correct."""
        with patch.dict(os.environ, {}, clear=True):
            config = LabConfig()

            assert config.log_level == "INFO"
            assert config.log_file == ""
            assert config.workers == 1
            assert config.quad_epsrel == QuadratureDefaults.EPSREL
            assert config.quad_limit == QuadratureDefaults.LIMIT

    def test_config_from_environment_variables(self):
        """Test that config can be overridden by environment variables."""
        env_vars = {
            "ENTROPY_LAB_LOG_LEVEL": "debug",
            "ENTROPY_LAB_LOG_FILE": "runs/lab.log",
            "ENTROPY_LAB_WORKERS": "4",
            "ENTROPY_LAB_QUAD_EPSREL": "1e-9",
            "ENTROPY_LAB_QUAD_LIMIT": "500",
        }

        with patch.dict(os.environ, env_vars, clear=True):
            config = LabConfig()

            assert config.log_level == "DEBUG"
            assert config.log_file == "runs/lab.log"
            assert config.workers == 4
            assert config.quad_epsrel == 1e-9
            assert config.quad_limit == 500

    @pytest.mark.parametrize(
        ("name", "value"),
        [
            ("ENTROPY_LAB_LOG_LEVEL", "LOUD"),
            ("ENTROPY_LAB_WORKERS", "0"),
            ("ENTROPY_LAB_WORKERS", "many"),
            ("ENTROPY_LAB_QUAD_EPSREL", "1e-3"),
            ("ENTROPY_LAB_QUAD_EPSREL", "0"),
            ("ENTROPY_LAB_QUAD_LIMIT", "10"),
        ],
    )
    def test_config_validation(self, name, value):
        """Test that invalid values are rejected."""
        with patch.dict(os.environ, {name: value}, clear=True):
            with pytest.raises(ValueError):
                LabConfig()

    def test_config_is_frozen(self):
        """Test that the configuration cannot be changed after creation."""
        config = LabConfig()
        with pytest.raises(AttributeError):
            config.workers = 8

    def test_environment_case_sensitivity(self):
        """Test that lowercase variable names are ignored."""
        with patch.dict(os.environ, {"entropy_lab_workers": "3"}, clear=True):
            assert LabConfig().workers == 1
