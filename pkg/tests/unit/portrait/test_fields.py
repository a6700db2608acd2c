"""Tests for isoforms.portrait.fields module."""

import math

import numpy as np
import pytest

from isoforms.catalog import catalog_form, load_catalog
from isoforms.core.config import PortraitConfiguration
from isoforms.core.errors import InvalidPointError
from isoforms.forms.oneform import RationalOneForm, scale
from isoforms.geometry.sphere import INFINITY, SpherePoint
from isoforms.portrait.fields import (
    Window,
    integrate_streamline,
    sample_grid,
    separatrices,
    trajectory_psi_drift,
)

WINDOW = Window(xmin=-3, xmax=3, ymin=-3, ymax=3)


@pytest.fixture
def radial_form() -> RationalOneForm:
    """dz / z: the dual field z points away from the origin."""
    return RationalOneForm(lambda_=1, poles=(SpherePoint.from_complex(0), INFINITY))


class TestWindow:
    """Tests for Window model."""

    def test_parse(self):
        """Test parsing of comma-separated bounds."""
        window = Window.parse("-1,2,-3,4")
        assert (window.xmin, window.xmax, window.ymin, window.ymax) == (-1, 2, -3, 4)
        assert window.contains(1 + 1j)
        assert not window.contains(3)

    def test_parse_wrong_count(self):
        """Test that anything but four numbers raises error."""
        with pytest.raises(ValueError) as exc_info:
            Window.parse("0,1,0")
        assert "four comma-separated numbers" in str(exc_info.value)

    def test_empty_window(self):
        """Test that degenerate bounds raise error."""
        with pytest.raises(ValueError):
            Window(xmin=1, xmax=1, ymin=0, ymax=1)


class TestSampleGrid:
    """Tests for sample_grid function."""

    def test_samples_skip_the_pole(self, center_form):
        """Test X = -iz on a 3 by 3 grid whose center is the pole."""
        window = Window(xmin=-1, xmax=1, ymin=-1, ymax=1)
        samples = sample_grid(center_form, window, 3, 3)
        assert len(samples) == 8
        for sample in samples:
            assert sample.value == pytest.approx(-1j * sample.at)

    def test_rotation(self, center_form):
        """Test that theta multiplies the field by e^{-i theta}."""
        window = Window(xmin=1, xmax=2, ymin=1, ymax=2)
        plain = sample_grid(center_form, window, 2, 2)
        turned = sample_grid(center_form, window, 2, 2, theta=math.pi / 2)
        for a, b in zip(plain, turned, strict=True):
            assert b.value == pytest.approx(-1j * a.value)

    def test_grid_too_small(self, center_form):
        """Test that fewer than two points per axis raise error."""
        with pytest.raises(ValueError):
            sample_grid(center_form, WINDOW, 1, 5)


class TestIntegrateStreamline:
    """Tests for integrate_streamline function."""

    def test_circle_closes(self, center_form):
        """Test that the unit circle around a center closes after arc length 2 pi."""
        trajectory = integrate_streamline(center_form, 1)
        assert trajectory.status == "closed"
        assert trajectory.kind == "streamline"
        np.testing.assert_allclose(np.abs(trajectory.as_array()), 1, atol=1e-4)
        assert trajectory.arc_length == pytest.approx(2 * math.pi, rel=1e-3)

    def test_level_set_is_kept(self, center_form):
        """Test that Im Psi stays constant along the trajectory."""
        trajectory = integrate_streamline(center_form, 1.5)
        assert trajectory_psi_drift(center_form, trajectory, 0.0) < 1e-4

    def test_level_set_is_kept_on_octahedral_form(self, rng):
        """Test the Im Psi drift of a hundred streamlines of the octahedral center form."""
        octa = catalog_form("octa")
        form = scale(octa, -1j / octa.lambda_)
        special = np.asarray([p.to_complex() for p in form.special_points() if not p.is_infinite])
        starts: list[complex] = []
        while len(starts) < 100:
            z = complex(*rng.uniform(-2, 2, size=2))
            if np.min(np.abs(special - z)) > 0.05:
                starts.append(z)
        for start in starts:
            trajectory = integrate_streamline(form, start, tolerance=1e-9, window=WINDOW)
            assert trajectory_psi_drift(form, trajectory, 0.0) <= 1e-5, start

    def test_window_and_singularity(self, radial_form):
        """Test that the radial field leaves the window forward and hits the pole backward."""
        forward = integrate_streamline(radial_form, 1, window=WINDOW)
        backward = integrate_streamline(radial_form, 1, window=WINDOW, backward=True)
        assert forward.status == "window"
        assert backward.status == "singularity"
        assert abs(backward.points[-1]) < 0.01

    def test_crosses_infinity(self, radial_form):
        """Test that without a window the radial field runs through the 1/z chart into the pole."""
        trajectory = integrate_streamline(radial_form, 1)
        assert trajectory.status == "singularity"
        assert abs(trajectory.points[-1]) > 100

    def test_max_length(self, center_form):
        """Test the arc length cap."""
        trajectory = integrate_streamline(center_form, 1, max_length=1.0)
        assert trajectory.status == "max_length"
        assert trajectory.arc_length == pytest.approx(1.0)

    def test_config_is_used(self, center_form):
        """Test that a portrait configuration supplies the defaults."""
        config = PortraitConfiguration(max_length=0.5)
        assert integrate_streamline(center_form, 1, config=config).status == "max_length"

    def test_start_at_pole(self, fourth_roots_form):
        """Test that starting on a pole raises error."""
        with pytest.raises(InvalidPointError):
            integrate_streamline(fourth_roots_form, 1j)


class TestSeparatrices:
    """Tests for separatrices function."""

    def test_four_per_zero(self, fourth_roots_form):
        """Test the four critical trajectories at the zero in the origin."""
        found = separatrices(fourth_roots_form, window=WINDOW)
        assert len(found) == 4
        for trajectory in found:
            assert trajectory.kind == "separatrix"
            assert trajectory.points[0] == 0
            assert trajectory.origin.is_close(SpherePoint.from_complex(0))

    def test_no_finite_zeros(self, center_form):
        """Test that a form without finite zeros has no separatrices."""
        assert separatrices(center_form, window=WINDOW) == []

    @pytest.mark.parametrize("name", load_catalog().names())
    def test_four_per_zero_on_catalog(self, name):
        """Test that every bundled form has four separatrices per finite zero."""
        form = catalog_form(name)
        found = separatrices(form, window=WINDOW, config=PortraitConfiguration(max_length=0.5))
        assert len(found) == 4 * len(form.finite_zeros())
