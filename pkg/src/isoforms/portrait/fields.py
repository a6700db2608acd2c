"""The vector field dual to a form, its samples and its trajectories.

For eta = f dz the dual field is X = e^{-i theta} / f. Trajectories are integrated with unit
speed in spherical arc length, in the chart z or in the chart w = 1/z once the point runs far
out, so that they cross infinity without blowing up. Along every trajectory the imaginary part
of e^{i theta} Psi, with Psi a primitive of eta, stays constant.
"""

import cmath
import logging
import math
from collections.abc import Callable
from typing import Literal, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.integrate import RK45
from scipy.optimize import brentq

from isoforms.core.config import PortraitConfiguration
from isoforms.core.errors import InvalidPointError
from isoforms.forms.oneform import RationalOneForm, coefficient_values, derivative_at_zero, residues
from isoforms.geometry.sphere import ComplexJson, SpherePoint, pairwise_chordal

logger = logging.getLogger(__name__)

type Chart = Literal["z", "w"]
type TrajectoryStatus = Literal["closed", "singularity", "window", "max_length", "stalled"]

# Arc length a trajectory must cover before a return to its start counts as closing
_MIN_LOOP = 1e-2


class Window(BaseModel):
    """Axis-aligned rectangle of the z-plane."""

    model_config = ConfigDict(frozen=True)

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    @model_validator(mode="after")
    def _check_bounds(self) -> Self:
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            msg = f"Empty window [{self.xmin}, {self.xmax}] x [{self.ymin}, {self.ymax}]"
            raise ValueError(msg)
        return self

    @classmethod
    def parse(cls, text: str) -> Self:
        """From ``"xmin,xmax,ymin,ymax"``."""
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 4:
            msg = f"A window needs four comma-separated numbers, got {text!r}"
            raise ValueError(msg)
        return cls(xmin=parts[0], xmax=parts[1], ymin=parts[2], ymax=parts[3])

    def contains(self, z: complex) -> bool:
        return self.xmin <= z.real <= self.xmax and self.ymin <= z.imag <= self.ymax


class FieldSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    at: ComplexJson
    value: ComplexJson


class Trajectory(BaseModel):
    """A polyline of finite points following the dual field."""

    model_config = ConfigDict(frozen=True)

    points: tuple[complex, ...]
    kind: Literal["streamline", "separatrix"] = "streamline"
    origin: SpherePoint | None = None
    status: TrajectoryStatus
    arc_length: float

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=np.complex128)


def _chart_coefficient(form: RationalOneForm, u: complex, chart: Chart) -> complex:
    """Coefficient of eta in the given chart; in w = 1/z it is -f(1/w) / w^2."""
    if chart == "z":
        return complex(coefficient_values(form, u))
    zeros, poles = form.finite_zeros(), form.finite_poles()
    exponent = len(poles) - len(zeros) - 2
    if u == 0 and exponent < 0:
        return complex("inf")
    numerator = np.prod(1 - zeros * u) if len(zeros) else 1.0
    denominator = np.prod(1 - poles * u) if len(poles) else 1.0
    return complex(-form.lambda_ * u**exponent * numerator / denominator)


def _to_sphere(u: complex, chart: Chart) -> tuple[complex, complex]:
    return (u, 1) if chart == "z" else (1, u)


def _to_plane(u: complex, chart: Chart) -> complex | None:
    if chart == "z":
        return u
    return None if u == 0 else 1 / u


def sample_grid(
    form: RationalOneForm,
    window: Window,
    nx: int,
    ny: int,
    theta: float = 0.0,
    *,
    guard_radius: float | None = None,
) -> list[FieldSample]:
    """X = e^{-i theta} / f on an nx by ny grid, without points near poles and zeros of eta."""
    if nx < 2 or ny < 2:
        msg = f"A sample grid needs at least 2 points per axis, got {nx} x {ny}"
        raise ValueError(msg)
    guard = PortraitConfiguration().guard_radius if guard_radius is None else guard_radius
    xs = np.linspace(window.xmin, window.xmax, nx)
    ys = np.linspace(window.ymin, window.ymax, ny)
    grid = (xs[None, :] + 1j * ys[:, None]).ravel()
    special = form.special_points().as_pairs()
    pairs = np.stack([grid, np.ones_like(grid)], axis=-1)
    clear = pairwise_chordal(pairs, special).min(axis=1) > guard
    values = coefficient_values(form, grid[clear])
    field = cmath.exp(-1j * theta) / np.asarray(values)
    return [
        FieldSample(at=complex(z), value=complex(v))
        for z, v in zip(grid[clear], field, strict=True)
    ]


class _Integrator:
    """Unit-speed integration of the dual field with chart switching and stop conditions."""

    def __init__(
        self,
        form: RationalOneForm,
        theta: float,
        sign: int,
        config: PortraitConfiguration,
        window: Window | None,
        exempt: SpherePoint | None,
    ) -> None:
        self.form = form
        self.rotation = cmath.exp(-1j * theta) * sign
        self.config = config
        self.window = window
        self.special = form.special_points().as_pairs()
        self.guards = np.full(len(self.special), config.guard_radius)
        self.exempt = exempt

    def velocity(self, chart: Chart) -> Callable[[float, np.ndarray], np.ndarray]:
        def rhs(_s: float, y: np.ndarray) -> np.ndarray:
            u = complex(y[0], y[1])
            coefficient = _chart_coefficient(self.form, u, chart)
            if coefficient == 0 or not cmath.isfinite(coefficient):
                return np.zeros(2)
            direction = self.rotation * coefficient.conjugate() / abs(coefficient)
            speed = (1 + abs(u) ** 2) / 2
            step = speed * direction
            return np.array([step.real, step.imag])

        return rhs

    def run(self, start: complex) -> tuple[list[complex], TrajectoryStatus, float]:
        config = self.config
        chart: Chart = "z" if abs(start) <= config.chart_radius else "w"
        u0 = start if chart == "z" else 1 / start
        if self.exempt is not None:
            # A separatrix starts inside the guard of its own zero
            start_pair = np.array([[start, 1]], dtype=np.complex128)
            distances = pairwise_chordal(start_pair, self.special)[0]
            index = int(np.argmin(distances))
            self.guards[index] = distances[index] / 2

        points = [start]
        s = 0.0
        solver = self._solver(chart, u0, s)
        start_chart, start_u = chart, u0
        initial = self.velocity(chart)(0.0, np.array([u0.real, u0.imag]))
        normal = complex(initial[0], initial[1])

        while True:
            previous_u = complex(solver.y[0], solver.y[1])
            message = solver.step()
            if solver.status == "failed":
                logger.warning("Trajectory from %s stalled at s=%.3g: %s", start, s, message)
                return points, "stalled", s
            s = solver.t
            u = complex(solver.y[0], solver.y[1])

            if chart == start_chart and s > _MIN_LOOP and normal != 0:
                closing = self._closing_point(solver, previous_u, u, start_u, normal)
                if closing is not None:
                    points.append(closing if chart == "z" else 1 / closing)
                    return points, "closed", s

            z = _to_plane(u, chart)
            if z is not None:
                points.append(z)
            pair = np.array([_to_sphere(u, chart)], dtype=np.complex128)
            if np.any(pairwise_chordal(pair, self.special)[0] < self.guards):
                return points, "singularity", s
            if self.window is not None and (z is None or not self.window.contains(z)):
                return points, "window", s
            if solver.status == "finished":
                return points, "max_length", s

            if chart == "z" and abs(u) > config.chart_radius:
                chart, u = "w", 1 / u
                solver = self._solver(chart, u, s)
            elif chart == "w" and abs(u) > 1:
                chart, u = "z", 1 / u
                solver = self._solver(chart, u, s)

    def _solver(self, chart: Chart, u: complex, s: float) -> RK45:
        return RK45(
            self.velocity(chart),
            s,
            np.array([u.real, u.imag]),
            t_bound=self.config.max_length,
            rtol=self.config.tolerance,
            atol=self.config.tolerance * 1e-2,
            max_step=self.config.max_step,
        )

    def _closing_point(
        self, solver: RK45, previous: complex, current: complex, start: complex, normal: complex
    ) -> complex | None:
        # Crossing of the line through the start point perpendicular to the initial direction
        def side(u: complex) -> float:
            return (np.conj(normal) * (u - start)).real

        if not (side(previous) < 0 <= side(current)):
            return None
        if min(abs(previous - start), abs(current - start)) > 2 * self.config.max_step + abs(
            current - previous
        ):
            return None
        dense = solver.dense_output()

        def crossing(t: float) -> float:
            y = dense(t)
            return side(complex(y[0], y[1]))

        t_cross = brentq(crossing, solver.t_old, solver.t)
        y = dense(t_cross)
        closing = complex(y[0], y[1])
        scale = 1 + abs(start) ** 2
        if abs(closing - start) > self.config.closure_tolerance * scale:
            return None
        return closing


def integrate_streamline(
    form: RationalOneForm,
    start: complex,
    theta: float = 0.0,
    *,
    max_length: float | None = None,
    tolerance: float | None = None,
    window: Window | None = None,
    backward: bool = False,
    config: PortraitConfiguration | None = None,
) -> Trajectory:
    """Trajectory of e^{-i theta} / f from ``start`` until it closes or stops.

    The trajectory stops when it returns to its start (``closed``), comes within the guard
    radius of a pole or zero (``singularity``), leaves ``window``, reaches ``max_length`` or the
    integrator fails (``stalled``). Stopping is never an error.

    Raises:
        InvalidPointError: If ``start`` is a pole or zero of the form
    """
    settings = config or PortraitConfiguration()
    updates: dict[str, float] = {}
    if max_length is not None:
        updates["max_length"] = max_length
    if tolerance is not None:
        updates["tolerance"] = tolerance
    settings = settings.model_copy(update=updates)
    if form.special_points().contains(SpherePoint.from_complex(start)):
        msg = f"Trajectory start {start} is a pole or zero of the form"
        raise InvalidPointError(msg)

    integrator = _Integrator(form, theta, -1 if backward else 1, settings, window, None)
    points, status, length = integrator.run(start)
    if status in ("stalled", "max_length"):
        logger.debug("Trajectory from %s ended with status %s", start, status)
    return Trajectory(points=tuple(points), status=status, arc_length=length)


def separatrices(
    form: RationalOneForm,
    theta: float = 0.0,
    *,
    window: Window | None = None,
    config: PortraitConfiguration | None = None,
) -> list[Trajectory]:
    """Four critical trajectories leaving every finite zero of the form.

    Near a simple zero q, e^{i theta} Psi - e^{i theta} Psi(q) is about c (z - q)^2 / 2 with
    c = f'(q); the separatrices leave q along the rays where this is real.
    """
    settings = config or PortraitConfiguration()
    finite_special = [p.to_complex() for p in form.special_points() if not p.is_infinite]
    result: list[Trajectory] = []
    for zero in form.finite_zeros():
        others = [abs(p - zero) for p in finite_special if abs(p - zero) > 1e-12]
        radius = 1e-3 * (min(others) if others else 1.0)
        c = derivative_at_zero(form, complex(zero))
        origin = SpherePoint.from_complex(complex(zero))
        for m in range(4):
            angle = (m * math.pi - theta - cmath.phase(c)) / 2
            start = complex(zero) + radius * cmath.exp(1j * angle)
            # Along the ray the field points outward for even m and inward for odd m
            sign = 1 if m % 2 == 0 else -1
            integrator = _Integrator(form, theta, sign, settings, window, origin)
            points, status, length = integrator.run(start)
            result.append(
                Trajectory(
                    points=(complex(zero), *points),
                    kind="separatrix",
                    origin=origin,
                    status=status,
                    arc_length=length,
                )
            )
    logger.debug("Traced %d separatrices", len(result))
    return result


def psi_values(form: RationalOneForm, points: np.ndarray) -> np.ndarray:
    """A primitive Psi of eta along a polyline, continued segment by segment.

    Psi = sum r_j log(z - p_j) over the finite poles; each step adds the principal logarithm of
    a ratio close to 1, and far from the origin the ratio is taken in the chart w = 1/z.
    """
    found = [(r.at.to_complex(), r.value) for r in residues(form) if not r.at.is_infinite]
    poles = np.asarray([p for p, _ in found], dtype=np.complex128)
    values = np.asarray([r for _, r in found], dtype=np.complex128)
    total = complex(np.sum(values))
    increments = np.zeros(len(points), dtype=np.complex128)
    for i in range(1, len(points)):
        a, b = points[i - 1], points[i]
        if min(abs(a), abs(b)) > 1:
            wa, wb = 1 / a, 1 / b
            step = np.sum(values * (np.log((1 - poles * wb) / (1 - poles * wa))))
            step -= total * np.log(wb / wa)
        else:
            step = np.sum(values * np.log((b - poles) / (a - poles)))
        increments[i] = step
    return np.cumsum(increments)


def trajectory_psi_drift(form: RationalOneForm, trajectory: Trajectory, theta: float) -> float:
    """Largest change of Im(e^{i theta} Psi) along the trajectory, per unit arc length."""
    points = trajectory.as_array()
    if len(points) < 2:
        return 0.0
    level = (cmath.exp(1j * theta) * psi_values(form, points)).imag
    return float(np.max(np.abs(level - level[0])) / max(trajectory.arc_length, 1.0))
