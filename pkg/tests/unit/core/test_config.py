"""Tests for isoforms.core.config module."""

import pytest
from pydantic import ValidationError

from isoforms.core.config import PortraitConfiguration, get_app_settings


class TestAppSettings:
    """Tests for AppSettings configuration class."""

    def test_defaults(self, clean_env, clear_settings_cache):
        """Test AppSettings defaults without any environment variables."""
        settings = get_app_settings()

        assert settings.epsilon == 1e-8
        assert settings.residue_epsilon == 1e-7
        assert settings.angular_tolerance == 1e-6
        assert settings.parabolic_tolerance == 1e-7
        assert settings.max_order == 100
        assert settings.closure_cap == 200
        assert settings.probe_seed == 20240521
        assert settings.max_rejections == 10_000
        assert settings.borderline_factor == 1000.0

    def test_values_from_env(self, clean_env, mock_env_vars, clear_settings_cache):
        """Test ISOFORMS_ prefixed variables override the defaults."""
        with mock_env_vars(ISOFORMS_EPSILON="1e-6", ISOFORMS_MAX_ORDER="12"):
            settings = get_app_settings()

            assert settings.epsilon == 1e-6
            assert settings.max_order == 12

    def test_unprefixed_variables_ignored(self, clean_env, mock_env_vars, clear_settings_cache):
        """Test that variables without the prefix do not leak into the settings."""
        with mock_env_vars(EPSILON="0.5"):
            assert get_app_settings().epsilon == 1e-8

    def test_non_positive_epsilon_rejected(self, clean_env, mock_env_vars, clear_settings_cache):
        """Test that a non-positive tolerance raises validation error."""
        with mock_env_vars(ISOFORMS_EPSILON="0"):
            with pytest.raises(ValidationError) as exc_info:
                get_app_settings()
            assert "epsilon" in str(exc_info.value).lower()

    def test_max_order_lower_bound(self, clean_env, mock_env_vars, clear_settings_cache):
        """Test that max_order below 2 is rejected."""
        with mock_env_vars(ISOFORMS_MAX_ORDER="1"):
            with pytest.raises(ValidationError):
                get_app_settings()

    def test_settings_are_cached(self, clean_env, clear_settings_cache):
        """Test that get_app_settings returns cached instance."""
        settings1 = get_app_settings()
        settings2 = get_app_settings()
        assert settings1 is settings2

    def test_settings_frozen(self, clean_env, clear_settings_cache):
        """Test that settings are immutable (frozen)."""
        settings = get_app_settings()
        with pytest.raises(ValidationError):
            settings.epsilon = 1e-3


class TestPortraitConfiguration:
    """Tests for PortraitConfiguration model."""

    def test_default_configuration(self):
        """Test the default style."""
        config = PortraitConfiguration()
        assert config.vertex_marker == "^"
        assert config.face_marker == "s"
        assert config.zero_marker == "x"
        assert len(config.orbit_colors) == 6
        assert config.max_length == 12.0

    def test_orbit_colors_from_string(self):
        """Test a comma separated colour string is split and normalised."""
        config = PortraitConfiguration(orbit_colors=" #FF0000, #00ff00 ,")
        assert config.orbit_colors == ["#ff0000", "#00ff00"]

    def test_orbit_colors_from_list(self):
        """Test colour lists are lower-cased."""
        config = PortraitConfiguration(orbit_colors=["Red", "BLUE"])
        assert config.orbit_colors == ["red", "blue"]

    def test_empty_orbit_colors_rejected(self):
        """Test that an empty palette raises error."""
        with pytest.raises(ValueError) as exc_info:
            PortraitConfiguration(orbit_colors=[])
        assert "at least one colour" in str(exc_info.value)

    def test_orbit_colors_invalid_type(self):
        """Test that a non-list palette raises error."""
        with pytest.raises(TypeError):
            PortraitConfiguration(orbit_colors=42)

    def test_unknown_marker_rejected(self):
        """Test that marker codes outside the renderer vocabulary raise error."""
        with pytest.raises(ValueError) as exc_info:
            PortraitConfiguration(vertex_marker="triangle")
        assert "Invalid marker" in str(exc_info.value)

    def test_chart_radius_must_exceed_one(self):
        """Test that the chart switch radius is validated."""
        with pytest.raises(ValidationError):
            PortraitConfiguration(chart_radius=0.5)
