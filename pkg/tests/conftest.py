"""Shared fixtures for isoforms tests."""

import json
import os
from collections.abc import Callable, Generator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from isoforms.catalog import catalog_form
from isoforms.forms.oneform import RationalOneForm
from isoforms.geometry.mobius import MobiusMap
from isoforms.geometry.sphere import INFINITY, SpherePoint


@pytest.fixture
def sample_form_document() -> dict[str, Any]:
    """z dz / (z^4 - 1) in divisor style: zeros at 0 and infinity, poles at the 4th roots of 1."""
    return {
        "lambda": [1.0, 0.0],
        "zeros": [[0.0, 0.0], "inf"],
        "poles": [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]],
    }


@pytest.fixture
def sample_style() -> dict[str, Any]:
    """A portrait style overriding a few defaults."""
    return {"grid_density": 3, "orbit_colors": ["#FF0000", "#00FF00"], "vertex_marker": "v"}


@pytest.fixture
def fourth_roots_form() -> RationalOneForm:
    """z dz / (z^4 - 1), built directly from its divisor."""
    return RationalOneForm(
        lambda_=1,
        zeros=(SpherePoint.from_complex(0), INFINITY),
        poles=tuple(SpherePoint.from_complex(p) for p in (1, -1, 1j, -1j)),
    )


@pytest.fixture
def center_form() -> RationalOneForm:
    """i dz / z: a single center at 0, trajectories are circles around it."""
    return RationalOneForm(lambda_=1j, poles=(SpherePoint.from_complex(0), INFINITY))


@pytest.fixture
def catalog_forms() -> dict[str, RationalOneForm]:
    """A handful of bundled forms, built once per test."""
    names = ("ejemplo1", "ejemplo2", "tetra", "diedrico3", "ciclico3", "contraejemplo")
    return {name: catalog_form(name) for name in names}


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def random_mobius(rng: np.random.Generator) -> Callable[[], MobiusMap]:
    """Factory of random Möbius maps with determinant 1 and matrix norm at most 4."""

    def draw() -> MobiusMap:
        while True:
            m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            m = m / np.sqrt(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
            if np.linalg.norm(m) <= 4:
                return MobiusMap.from_matrix(m)

    return draw


@pytest.fixture
def random_form(rng: np.random.Generator) -> Callable[[int], RationalOneForm]:
    """Factory of random forms with k poles; every third one has its pole at infinity."""
    drawn = 0

    def draw(k: int) -> RationalOneForm:
        nonlocal drawn
        drawn += 1
        values = rng.normal(size=2 * k - 2) + 1j * rng.normal(size=2 * k - 2)
        poles = [SpherePoint.from_complex(v) for v in values[:k]]
        if drawn % 3 == 0:
            poles[-1] = INFINITY
        return RationalOneForm(
            lambda_=complex(rng.normal(), rng.normal()),
            zeros=tuple(SpherePoint.from_complex(v) for v in values[k:]),
            poles=tuple(poles),
        )

    return draw


@pytest.fixture
def temp_form_file(tmp_path: Path, sample_form_document: dict[str, Any]) -> Path:
    """Create a temporary JSON file with the sample form."""
    file_path = tmp_path / "form.json"
    file_path.write_text(json.dumps(sample_form_document), encoding="utf-8")
    return file_path


@pytest.fixture
def temp_yaml_file(tmp_path: Path, sample_style: dict[str, Any]) -> Path:
    """Create a temporary YAML file with the sample portrait style."""
    import yaml

    file_path = tmp_path / "style.yaml"
    file_path.write_text(yaml.dump(sample_style), encoding="utf-8")
    return file_path


@pytest.fixture
def temp_invalid_json_file(tmp_path: Path) -> Path:
    """Create a temporary file with invalid JSON."""
    file_path = tmp_path / "invalid.json"
    file_path.write_text("{invalid json content", encoding="utf-8")
    return file_path


@pytest.fixture
def temp_invalid_yaml_file(tmp_path: Path) -> Path:
    """Create a temporary file with invalid YAML."""
    file_path = tmp_path / "invalid.yaml"
    file_path.write_text("invalid: yaml: content: [", encoding="utf-8")
    return file_path


@contextmanager
def env_vars(**kwargs: str | None) -> Generator[None, None, None]:
    """Context manager for temporarily setting environment variables.

    Args:
        **kwargs: Environment variable name-value pairs.
                  Use None to unset a variable.
    """
    old_values: dict[str, str | None] = {}

    for key, value in kwargs.items():
        old_values[key] = os.environ.get(key)
        if value is None:
            os.environ.pop(key, None)
        else:
            os.environ[key] = value

    try:
        yield
    finally:
        for key, old_value in old_values.items():
            if old_value is None:
                os.environ.pop(key, None)
            else:
                os.environ[key] = old_value


@pytest.fixture
def mock_env_vars():
    """Fixture that provides the env_vars context manager."""
    return env_vars


@pytest.fixture
def clean_env():
    """Remove all ISOFORMS_ prefixed environment variables for clean tests."""
    prefixed = [key for key in os.environ if key.startswith("ISOFORMS_")]
    old_values = {key: os.environ.pop(key) for key in prefixed}

    yield

    for key, value in old_values.items():
        os.environ[key] = value


@pytest.fixture
def clear_settings_cache():
    """Clear the lru_cache on get_app_settings before and after test."""
    from isoforms.core.config import get_app_settings

    get_app_settings.cache_clear()
    yield
    get_app_settings.cache_clear()
