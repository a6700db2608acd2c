"""Rational 1-forms eta = lambda * prod(z - q) / prod(z - p) dz with simple zeros and poles.

Only finite zeros and poles contribute factors; a zero or pole at infinity is encoded by the
degree deficit between the two products. Every form satisfies #poles - #zeros = 2.
"""

import cmath
import logging
from collections.abc import Sequence
from typing import Any, Self

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    field_validator,
    model_serializer,
    model_validator,
)

from isoforms.core.config import get_app_settings
from isoforms.core.errors import InvalidFormError, InvalidPointError, NumericalError
from isoforms.forms import polynomials
from isoforms.geometry.mobius import MobiusMap
from isoforms.geometry.sphere import (
    INFINITY,
    ComplexArray,
    ComplexJson,
    Point,
    PointMultiset,
    SpherePoint,
    as_pairs,
    complex_to_json,
    multiset_match,
    pairwise_chordal,
)

logger = logging.getLogger(__name__)

# Probe candidates drawn per comparison; the best separated ones are used
_PROBE_POOL = 32
_PROBE_COUNT = 3


class Residue(BaseModel):
    """Residue of a form at one of its poles."""

    model_config = ConfigDict(frozen=True)

    at: Point
    value: ComplexJson


class RationalOneForm(BaseModel):
    """A meromorphic 1-form on the sphere with simple zeros and simple poles."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lambda_: ComplexJson = Field(alias="lambda")
    zeros: PointMultiset = PointMultiset()
    poles: PointMultiset

    _finite_zeros: tuple[complex, ...] = PrivateAttr(default=())
    _finite_poles: tuple[complex, ...] = PrivateAttr(default=())

    @field_validator("lambda_")
    @classmethod
    def _check_lambda(cls, v: complex) -> complex:
        if v == 0 or not cmath.isfinite(v):
            msg = f"Leading coefficient must be a nonzero finite complex number, got {v}"
            raise InvalidFormError(msg)
        return v

    @model_validator(mode="after")
    def _check_divisor(self) -> Self:
        if len(self.poles) - len(self.zeros) != 2:
            msg = (
                f"Form has {len(self.poles)} poles and {len(self.zeros)} zeros; "
                "#poles - #zeros must be 2"
            )
            raise InvalidFormError(msg)
        for zero in self.zeros:
            if self.poles.contains(zero):
                msg = f"Point {zero!r} is both a zero and a pole"
                raise InvalidFormError(msg)
        return self

    def model_post_init(self, context: Any, /) -> None:
        self._finite_zeros = tuple(complex(v) for v in self.zeros.finite_values())
        self._finite_poles = tuple(complex(v) for v in self.poles.finite_values())

    @property
    def k(self) -> int:
        """Number of poles."""
        return len(self.poles)

    def finite_zeros(self) -> ComplexArray:
        return np.asarray(self._finite_zeros, dtype=np.complex128)

    def finite_poles(self) -> ComplexArray:
        return np.asarray(self._finite_poles, dtype=np.complex128)

    def special_points(self) -> PointMultiset:
        """Poles followed by zeros."""
        return self.poles.union(self.zeros)

    @model_serializer
    def _serialize(self) -> dict[str, Any]:
        return {
            "lambda": complex_to_json(self.lambda_),
            "zeros": self.zeros.model_dump(),
            "poles": self.poles.model_dump(),
        }


def coefficient_values(
    form: RationalOneForm, values: complex | ComplexArray
) -> complex | ComplexArray:
    """The coefficient function f (eta = f dz) at finite points, without pole checks."""
    return form.lambda_ * polynomials.ratio_product(
        values, form.finite_zeros(), form.finite_poles()
    )


def evaluate(
    form: RationalOneForm, z: SpherePoint | complex, epsilon: float | None = None
) -> complex:
    """f(z) for a finite regular point z.

    Raises:
        InvalidPointError: If ``z`` is infinity
        InvalidFormError: If ``z`` is within ``epsilon`` of a pole
    """
    point = z if isinstance(z, SpherePoint) else SpherePoint.from_complex(z)
    if point.is_infinite:
        msg = "The coefficient function is evaluated at finite points only"
        raise InvalidPointError(msg)
    if form.poles.contains(point, epsilon):
        msg = f"Evaluation at pole {point!r}"
        raise InvalidFormError(msg)
    return complex(coefficient_values(form, point.to_complex()))


def probe_points(
    avoid: ComplexArray, count: int = _PROBE_COUNT, seed: int | None = None
) -> ComplexArray:
    """Deterministic finite points far (chordally) from every pair in ``avoid``."""
    settings = get_app_settings()
    rng = np.random.default_rng(settings.probe_seed if seed is None else seed)
    draws = rng.normal(size=(_PROBE_POOL, 2))
    candidates = draws[:, 0] + 1j * draws[:, 1]
    if len(avoid) == 0:
        return candidates[:count]
    pairs = np.stack([candidates, np.ones_like(candidates)], axis=-1)
    clearance = pairwise_chordal(pairs, avoid).min(axis=1)
    best = np.argsort(-clearance, kind="stable")[:count]
    if clearance[best[-1]] <= 1e3 * settings.epsilon:
        msg = "No probe point clears the special points of the form"
        raise NumericalError(msg)
    return candidates[best]


def _leading_consistent(estimates: ComplexArray, tolerance: float) -> bool:
    spread = np.max(np.abs(estimates - estimates[0]))
    return bool(spread <= tolerance * abs(estimates[0]))


def pushforward(
    t: MobiusMap, form: RationalOneForm, *, tolerance: float | None = None
) -> RationalOneForm:
    """T_* eta: zeros and poles move by ``t``; the new lambda is fitted at probe points.

    Raises:
        NumericalError: If the fitted lambda disagrees between probes beyond ``tolerance``
    """
    tol = get_app_settings().probe_tolerance if tolerance is None else tolerance
    s = t.inverse()
    zeros = tuple(t(p) for p in form.zeros)
    poles = tuple(t(p) for p in form.poles)
    moved = RationalOneForm(lambda_=1, zeros=zeros, poles=poles)

    avoid = as_pairs([*zeros, *poles, t(INFINITY), INFINITY])
    probes = probe_points(avoid)
    pulled = s.apply_pairs(np.stack([probes, np.ones_like(probes)], axis=-1))
    sources = pulled[:, 0] / pulled[:, 1]
    transported = coefficient_values(form, sources) / (s.c * probes + s.d) ** 2
    estimates = transported / coefficient_values(moved, probes)
    if not _leading_consistent(estimates, tol):
        msg = f"Push-forward probes disagree on the leading coefficient: {estimates}"
        raise NumericalError(msg)
    return RationalOneForm(lambda_=complex(estimates[0]), zeros=zeros, poles=poles)


def form_equal(
    first: RationalOneForm,
    second: RationalOneForm,
    epsilon: float | None = None,
    rtol: float | None = None,
) -> bool:
    """Same zeros, same poles, and the same coefficient function at three probe points."""
    settings = get_app_settings()
    eps = settings.epsilon if epsilon is None else epsilon
    tol = settings.probe_tolerance if rtol is None else rtol
    if multiset_match(first.zeros, second.zeros, eps) is None:
        return False
    if multiset_match(first.poles, second.poles, eps) is None:
        return False
    probes = probe_points(as_pairs([*first.special_points(), *second.special_points()]))
    a = coefficient_values(first, probes)
    b = coefficient_values(second, probes)
    return bool(np.all(np.abs(a - b) <= tol * np.maximum(np.abs(a), np.abs(b))))


def residues(form: RationalOneForm) -> list[Residue]:
    """Residues in pole order; the residue at infinity is minus the sum of the finite ones."""
    finite = form.finite_poles()
    zeros = form.finite_zeros()
    values: list[complex] = []
    for index, pole in enumerate(finite):
        others = np.delete(finite, index)
        values.append(form.lambda_ * complex(polynomials.ratio_product(pole, zeros, others)))
    at_infinity = -sum(values, 0j)
    result: list[Residue] = []
    finite_values = iter(values)
    for pole in form.poles:
        value = at_infinity if pole.is_infinite else next(finite_values)
        result.append(Residue(at=pole, value=value))
    return result


def residue_defect(form: RationalOneForm) -> float:
    """|sum of all residues| relative to the largest one; zero by the residue theorem."""
    values = [r.value for r in residues(form)]
    return abs(sum(values, 0j)) / max(abs(v) for v in values)


def derivative_at_zero(form: RationalOneForm, zero: complex) -> complex:
    """f'(q) at a finite simple zero q."""
    zeros = form.finite_zeros()
    index = int(np.argmin(np.abs(zeros - zero)))
    others = np.delete(zeros, index)
    return form.lambda_ * complex(polynomials.ratio_product(zero, others, form.finite_poles()))


def from_rational_coefficients(
    numer: Sequence[complex] | ComplexArray,
    denom: Sequence[complex] | ComplexArray,
    *,
    separation: float | None = None,
) -> RationalOneForm:
    """The form numer(z)/denom(z) dz from ascending coefficient lists.

    Raises:
        InvalidFormError: For a zero polynomial, a non-simple root (finite or at infinity), or
            a root shared by numerator and denominator
    """
    sep = get_app_settings().root_separation if separation is None else separation
    num = polynomials.trim(numer)
    den = polynomials.trim(denom)
    if len(den) == 0:
        msg = "Denominator is the zero polynomial"
        raise InvalidFormError(msg)
    if len(num) == 0:
        msg = "Numerator is the zero polynomial, the form vanishes identically"
        raise InvalidFormError(msg)

    # f ~ z^-deficit near infinity, so eta has order deficit - 2 there
    deficit = len(den) - len(num)
    if deficit < 1:
        msg = f"non-simple root at infinity: pole of order {2 - deficit}"
        raise InvalidFormError(msg)
    if deficit > 3:
        msg = f"non-simple root at infinity: zero of order {deficit - 2}"
        raise InvalidFormError(msg)

    zeros = polynomials.roots(num)
    poles = polynomials.roots(den)
    for role, found in (("numerator", zeros), ("denominator", poles)):
        closest = polynomials.closest_pair(found)
        if closest is not None and closest[2] < sep:
            msg = f"non-simple root near {found[closest[0]]:.6g} of the {role}"
            raise InvalidFormError(msg)
    if len(zeros) and len(poles):
        scale = np.maximum(1.0, np.abs(zeros))[:, None]
        shared = np.abs(zeros[:, None] - poles[None, :]) / scale
        if shared.min() < sep:
            i, _ = np.unravel_index(int(np.argmin(shared)), shared.shape)
            msg = f"non-reduced fraction: common root near {zeros[i]:.6g}"
            raise InvalidFormError(msg)

    zero_points = [SpherePoint.from_complex(v) for v in zeros]
    pole_points = [SpherePoint.from_complex(v) for v in poles]
    if deficit == 3:
        zero_points.append(INFINITY)
    elif deficit == 1:
        pole_points.append(INFINITY)
    logger.debug("Parsed form with %d poles, %d zeros", len(pole_points), len(zero_points))
    return RationalOneForm(
        lambda_=complex(num[-1] / den[-1]), zeros=tuple(zero_points), poles=tuple(pole_points)
    )


def from_partial_fractions(
    poles: Sequence[SpherePoint | complex],
    residue_values: Sequence[complex],
    scale: complex = 1,
) -> RationalOneForm:
    """scale * sum r_j / (z - p_j) dz for distinct finite poles and nonzero residues.

    Infinity becomes a pole with residue ``-scale * sum r_j`` unless that sum vanishes.
    """
    settings = get_app_settings()
    values = []
    for pole in poles:
        point = pole if isinstance(pole, SpherePoint) else SpherePoint.from_complex(pole)
        if point.is_infinite:
            msg = "Partial fractions take finite poles only"
            raise InvalidFormError(msg)
        values.append(point.to_complex())
    weights = np.asarray(residue_values, dtype=np.complex128)
    if len(weights) != len(values) or len(values) == 0:
        msg = f"Got {len(values)} poles and {len(weights)} residues"
        raise InvalidFormError(msg)
    if np.any(weights == 0):
        msg = "Partial fraction residues must be nonzero"
        raise InvalidFormError(msg)

    points = np.asarray(values, dtype=np.complex128)
    numerator = np.zeros(len(points), dtype=np.complex128)
    for index, weight in enumerate(weights):
        numerator += weight * polynomials.from_roots(np.delete(points, index))
    # A vanishing residue sum drops the degree, leaving infinity regular or a zero
    if abs(weights.sum()) <= settings.residue_epsilon * np.max(np.abs(weights)):
        numerator[-1] = 0
    return from_rational_coefficients(scale * numerator, polynomials.from_roots(points))


def scale(form: RationalOneForm, factor: complex) -> RationalOneForm:
    """factor * eta."""
    return RationalOneForm(lambda_=form.lambda_ * factor, zeros=form.zeros, poles=form.poles)


def rotate(form: RationalOneForm, theta: float) -> RationalOneForm:
    """e^{i theta} * eta."""
    return scale(form, cmath.exp(1j * theta))


def order_at_infinity(form: RationalOneForm) -> int:
    """1 for a zero at infinity, -1 for a pole there, 0 when infinity is regular."""
    if form.zeros.has_infinity:
        return 1
    if form.poles.has_infinity:
        return -1
    return 0


def coefficients(form: RationalOneForm) -> tuple[ComplexArray, ComplexArray]:
    """Ascending numerator and denominator coefficients (the denominator is monic)."""
    numerator = form.lambda_ * polynomials.from_roots(form.finite_zeros())
    return numerator, polynomials.from_roots(form.finite_poles())
