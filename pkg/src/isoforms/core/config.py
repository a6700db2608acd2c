from functools import lru_cache

from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# Marker codes understood by the SVG renderer (matplotlib marker vocabulary)
MARKER_CODES = frozenset({"^", "v", "s", "o", "D", "d", "p", "h", "*", "x", "X", "+", "P"})


class AppSettings(BaseSettings):
    """Numerical settings shared by every isoforms operation.

    Values are read from ``ISOFORMS_*`` environment variables (or a ``.env`` file). Each
    operation that consumes one of them also accepts a keyword override.

    Attributes:
        epsilon: Chordal tolerance for point equality and multiset matching
        residue_epsilon: Tolerance of the residue theorem checks
        angular_tolerance: Radians allowed when testing "purely imaginary" and collinearity
        parabolic_tolerance: Bound on abs(trace^2 - 4) below which a map is parabolic
        max_order: Largest rotation order detected by iterated composition
        closure_cap: Largest group a closure may grow to
        probe_seed: Seed of the deterministic probe points used to compare forms
    """

    # Chordal matching tolerance
    epsilon: float = Field(1e-8, gt=0, description="Chordal tolerance for point equality")
    # Residue theorem tolerance
    residue_epsilon: float = Field(1e-7, gt=0, description="Tolerance on residue sums")
    # Isochrony tests work in radians
    angular_tolerance: float = Field(
        1e-6, gt=0, description="Angular tolerance (radians) for residue directions"
    )
    parabolic_tolerance: float = Field(
        1e-7, gt=0, description="Bound on abs(trace^2 - 4) for parabolic maps"
    )
    max_order: int = Field(100, ge=2, description="Finite-order detection cap")
    closure_cap: int = Field(200, ge=1, description="Maximum size of a generated group")
    probe_seed: int = Field(20240521, description="Seed for probe points")
    probe_tolerance: float = Field(
        1e-6, gt=0, description="Relative tolerance when comparing forms at probe points"
    )
    root_separation: float = Field(
        1e-6, gt=0, description="Distance below which two polynomial roots coincide"
    )
    max_rejections: int = Field(10_000, ge=1, description="Stratum sampling rejection cap")
    sample_separation: float = Field(
        1e-3, gt=0, description="Chordal clearance required around sampled orbit points"
    )
    borderline_factor: float = Field(
        1000.0, ge=1, description="Width of the isotropy warning band, in multiples of epsilon"
    )

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="ISOFORMS_",  # Environment variables should be prefixed with ISOFORMS_
        frozen=True,
    )


class PortraitConfiguration(BaseModel):
    """Styling and integration parameters for phase portraits."""

    figure_size: tuple[float, float] = Field(
        default=(6.0, 6.0), description="Figure size in inches (width, height)"
    )
    vertex_marker: str = Field(default="^", description="Marker for poles on vertices")
    edge_marker: str = Field(default="P", description="Marker for poles on edge midpoints")
    face_marker: str = Field(default="s", description="Marker for poles on face centers")
    generic_marker: str = Field(default="o", description="Marker for poles on full orbits")
    zero_marker: str = Field(default="x", description="Marker for zeros of the form")
    zero_color: str = Field(default="#1f1f1f", description="Colour of zero markers")
    orbit_colors: list[str] = Field(
        default=["#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b"],
        description="Colour cycle for pole orbits",
    )
    streamline_color: str = "#4c72b0"
    streamline_width: float = Field(default=0.6, gt=0)
    separatrix_color: str = "#c44e52"
    separatrix_width: float = Field(default=1.1, gt=0)
    grid_density: int = Field(default=7, ge=0, description="Streamline seeds per axis")
    max_length: float = Field(default=12.0, gt=0, description="Spherical arc length cap")
    tolerance: float = Field(default=1e-6, gt=0, description="Integrator relative tolerance")
    max_step: float = Field(default=0.05, gt=0, description="Largest integration step")
    guard_radius: float = Field(default=1e-3, gt=0, description="Chordal stop radius")
    chart_radius: float = Field(default=1e3, gt=1, description="Modulus switching to 1/z")
    closure_tolerance: float = Field(default=1e-3, gt=0, description="Closed-orbit tolerance")

    @field_validator("orbit_colors", mode="before")
    @classmethod
    def split_colors(cls, v: object) -> list[str]:
        if isinstance(v, str):
            v = v.split(",")
        if not isinstance(v, list | tuple):
            msg = f"Invalid type for orbit_colors: {type(v)}"
            raise TypeError(msg)
        colors = [str(item).strip().lower() for item in v if str(item).strip()]
        if not colors:
            msg = "orbit_colors must contain at least one colour"
            raise ValueError(msg)
        return colors

    @field_validator(
        "vertex_marker", "edge_marker", "face_marker", "generic_marker", "zero_marker"
    )
    @classmethod
    def known_marker(cls, v: str) -> str:
        if v not in MARKER_CODES:
            msg = f"Invalid marker: {v}. Supported markers are: {sorted(MARKER_CODES)}"
            raise ValueError(msg)
        return v


@lru_cache
def get_app_settings() -> AppSettings:
    """Get the isoforms numerical settings.

    This function caches the settings to avoid reloading them multiple times.
    It uses environment variables prefixed with ISOFORMS_ to populate the configuration.

    Returns:
        An instance of AppSettings with the loaded settings.
    """
    return AppSettings()
