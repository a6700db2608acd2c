from .fields import (
    FieldSample,
    Trajectory,
    Window,
    integrate_streamline,
    sample_grid,
    separatrices,
    trajectory_psi_drift,
)
from .render import RenderOptions, render_svg

__all__ = [
    "FieldSample",
    "RenderOptions",
    "Trajectory",
    "Window",
    "integrate_streamline",
    "render_svg",
    "sample_grid",
    "separatrices",
    "trajectory_psi_drift",
]
