"""SVG phase portraits: streamlines, separatrices and pole/zero markers, optionally on a sphere.

Figures are assembled on a bare ``matplotlib.figure.Figure`` (no pyplot state) and saved with a
fixed hash salt and no date, so the same input always gives the same bytes.
"""

import io
import logging
from typing import Literal

import matplotlib as mpl
import numpy as np
from matplotlib.axes import Axes
from matplotlib.figure import Figure
from pydantic import BaseModel, ConfigDict, Field

from isoforms.core.config import PortraitConfiguration
from isoforms.core.errors import GroupTypeError
from isoforms.forms.isotropy import IsotropyResult, isotropy, orbit_labels
from isoforms.forms.oneform import RationalOneForm
from isoforms.geometry.polyhedra import MobiusPolyhedron, Role, embed
from isoforms.geometry.sphere import SpherePoint, pairs_to_unit_vectors, pairwise_chordal
from isoforms.portrait.fields import Trajectory, Window, integrate_streamline, separatrices

logger = logging.getLogger(__name__)

_ROLE_TOLERANCE = 1e-6
_SVG_SALT = "isoforms"
_FAR_ALPHA = 0.3


class RenderOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    window: Window = Window(xmin=-3, xmax=3, ymin=-3, ymax=3)
    theta: float = 0.0
    sphere: bool = False
    separatrices: bool = True
    style: PortraitConfiguration = Field(default_factory=PortraitConfiguration)


class Marker(BaseModel):
    """A pole or zero of the form as drawn: its cell role and the index of its orbit."""

    model_config = ConfigDict(frozen=True)

    at: SpherePoint
    kind: Literal["pole", "zero"]
    cell: Role | None = None
    orbit: int = 0


def _polyhedron(result: IsotropyResult) -> MobiusPolyhedron | None:
    if result.group is None:
        return None
    try:
        return embed(result.group)
    except GroupTypeError:
        return None


def markers(form: RationalOneForm, result: IsotropyResult | None = None) -> list[Marker]:
    """Markers of the poles (coloured by orbit of the isotropy group) and of the zeros."""
    result = result or isotropy(form)
    polyhedron = _polyhedron(result)

    def cell_of(point: SpherePoint) -> Role | None:
        return polyhedron.role_of(point, _ROLE_TOLERANCE) if polyhedron else None

    if result.group is not None:
        labels = orbit_labels(form.poles, result.group)
        order = {label: index for index, label in enumerate(dict.fromkeys(labels.tolist()))}
        orbits = [order[label] for label in labels.tolist()]
    else:
        orbits = [0] * form.k

    found = [
        Marker(at=pole, kind="pole", cell=cell_of(pole), orbit=index)
        for pole, index in zip(form.poles, orbits, strict=True)
    ]
    found.extend(Marker(at=zero, kind="zero", cell=cell_of(zero)) for zero in form.zeros)
    return found


def infinity_note(found: list[Marker]) -> str | None:
    """Text naming what sits at infinity, which the plane panel cannot show."""
    for marker in found:
        if marker.at.is_infinite:
            return f"∞: {marker.kind}" + (f" ({marker.cell})" if marker.cell else "")
    return None


def _seeds(form: RationalOneForm, options: RenderOptions) -> list[complex]:
    density = options.style.grid_density
    if density == 0:
        return []
    window = options.window
    xs = window.xmin + (np.arange(density) + 0.5) * (window.xmax - window.xmin) / density
    ys = window.ymin + (np.arange(density) + 0.5) * (window.ymax - window.ymin) / density
    seeds = (xs[None, :] + 1j * ys[:, None]).ravel()
    pairs = np.stack([seeds, np.ones_like(seeds)], axis=-1)
    clearance = pairwise_chordal(pairs, form.special_points().as_pairs()).min(axis=1)
    return [complex(s) for s in seeds[clearance > 10 * options.style.guard_radius]]


def trajectories(form: RationalOneForm, options: RenderOptions) -> list[Trajectory]:
    """Streamlines from a grid of seeds (both directions) followed by the separatrices."""
    style = options.style
    found: list[Trajectory] = []
    for seed in _seeds(form, options):
        for backward in (False, True):
            found.append(
                integrate_streamline(
                    form,
                    seed,
                    options.theta,
                    window=options.window,
                    backward=backward,
                    config=style,
                )
            )
    if options.separatrices:
        found.extend(separatrices(form, options.theta, window=options.window, config=style))
    logger.info("Portrait with %d trajectories", len(found))
    return found


def _style_for(trajectory: Trajectory, style: PortraitConfiguration) -> tuple[str, float]:
    if trajectory.kind == "separatrix":
        return style.separatrix_color, style.separatrix_width
    return style.streamline_color, style.streamline_width


def _marker_style(marker: Marker, style: PortraitConfiguration) -> tuple[str, str]:
    if marker.kind == "zero":
        return style.zero_marker, style.zero_color
    symbol = {
        "vertex": style.vertex_marker,
        "edge": style.edge_marker,
        "face": style.face_marker,
    }.get(marker.cell or "", style.generic_marker)
    return symbol, style.orbit_colors[marker.orbit % len(style.orbit_colors)]


def _draw_plane(
    axes: Axes, paths: list[Trajectory], found: list[Marker], options: RenderOptions
) -> None:
    style, window = options.style, options.window
    for path in paths:
        points = path.as_array()
        color, width = _style_for(path, style)
        axes.plot(points.real, points.imag, color=color, linewidth=width)
    for marker in found:
        if marker.at.is_infinite:
            continue
        z = marker.at.to_complex()
        symbol, color = _marker_style(marker, style)
        axes.plot([z.real], [z.imag], linestyle="none", marker=symbol, color=color, markersize=6)
    note = infinity_note(found)
    if note:
        axes.text(0.02, 0.98, note, transform=axes.transAxes, va="top", fontsize=8)
    axes.set_xlim(window.xmin, window.xmax)
    axes.set_ylim(window.ymin, window.ymax)
    axes.set_aspect("equal")


def orthographic(pairs: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(x, y, front) of points seen from above infinity; ``front`` marks the near hemisphere."""
    vectors = pairs_to_unit_vectors(pairs)
    return vectors[:, 0], vectors[:, 1], vectors[:, 2] >= 0


def _draw_sphere(
    axes: Axes, paths: list[Trajectory], found: list[Marker], style: PortraitConfiguration
) -> None:
    # Orthographic view from above the north pole (infinity). The far hemisphere, with the
    # unit disc and 0 at its centre, shows through faded.
    circle = np.exp(1j * np.linspace(0, 2 * np.pi, 200))
    axes.plot(circle.real, circle.imag, color="#888888", linewidth=0.5)
    for path in paths:
        points = path.as_array()
        x, y, front = orthographic(np.stack([points, np.ones_like(points)], axis=-1))
        color, width = _style_for(path, style)
        far_x, far_y = np.where(front, np.nan, x), np.where(front, np.nan, y)
        axes.plot(far_x, far_y, color=color, linewidth=width, alpha=_FAR_ALPHA)
        near_x, near_y = np.where(front, x, np.nan), np.where(front, y, np.nan)
        axes.plot(near_x, near_y, color=color, linewidth=width)
    for marker in found:
        x, y, front = orthographic(np.asarray([marker.at.pair()]))
        symbol, color = _marker_style(marker, style)
        alpha = 1.0 if front[0] else _FAR_ALPHA
        axes.plot(x, y, linestyle="none", marker=symbol, color=color, alpha=alpha)
    axes.set_xlim(-1.05, 1.05)
    axes.set_ylim(-1.05, 1.05)
    axes.set_aspect("equal")
    axes.set_axis_off()


def render_svg(
    form: RationalOneForm,
    options: RenderOptions | None = None,
    *,
    result: IsotropyResult | None = None,
) -> str:
    """The phase portrait of the dual field of ``form`` as an SVG document."""
    options = options or RenderOptions()
    style = options.style
    found = markers(form, result)
    paths = trajectories(form, options)

    columns = 2 if options.sphere else 1
    width, height = style.figure_size
    figure = Figure(figsize=(width * columns, height))
    plane = figure.add_subplot(1, columns, 1)
    _draw_plane(plane, paths, found, options)
    if options.sphere:
        _draw_sphere(figure.add_subplot(1, columns, 2), paths, found, style)

    buffer = io.StringIO()
    with mpl.rc_context({"svg.hashsalt": _SVG_SALT, "svg.fonttype": "none"}):
        figure.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue()
