"""Residue tests for isochronicity and the reflection criterion that implies rotatability.

A form is isochronous when every residue is purely imaginary. A form is rotatable when its
residues lie on one line through the origin, so that e^{i theta} eta is isochronous for some
theta. A reflection that preserves poles and zeros orbit by orbit forces rotatability.
"""

import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict

from isoforms.core.config import get_app_settings
from isoforms.core.errors import NumericalError
from isoforms.forms.isotropy import (
    candidate_maps,
    isotropy,
    orbit_labels,
    residue_labels,
    screen_candidates,
    source_triple,
    target_triples,
)
from isoforms.forms.oneform import RationalOneForm, Residue, residues
from isoforms.geometry.groups import FiniteMobiusGroup
from isoforms.geometry.mobius import AntiMobiusMap
from isoforms.geometry.sphere import ComplexJson, SpherePoint, match_pairs

logger = logging.getLogger(__name__)


class IsochronyReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    residues: list[Residue]
    is_isochronous: bool
    rotatable: bool
    theta: float | None = None
    collinearity_defect: float


class MirrorCertificate(BaseModel):
    """A reflection permuting poles and zeros, each within its orbit under the isotropy group."""

    model_config = ConfigDict(frozen=True)

    circle_points: tuple[SpherePoint, SpherePoint, SpherePoint]
    reflection: AntiMobiusMap
    pole_pairing: tuple[int, ...]
    zero_pairing: tuple[int, ...]


class ResidueClass(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: ComplexJson
    points: list[SpherePoint]


def _line_angle(values: np.ndarray) -> float:
    # Doubling the arguments identifies r with -r; the mean doubled direction gives the line
    directions = values / np.abs(values)
    return float(np.angle(np.sum(directions**2)) / 2)


def _angular_gap(values: np.ndarray, phi: float) -> np.ndarray:
    """Angle between each value and the line through 0 at angle ``phi``, in [0, pi/2]."""
    offset = np.mod(np.angle(values) - phi + math.pi / 2, math.pi) - math.pi / 2
    return np.abs(offset)


def isochrony_report(
    form: RationalOneForm,
    *,
    tolerance: float | None = None,
    strict_two_pole: bool = False,
) -> IsochronyReport:
    """Residues, the isochronicity test and the rotation making the form isochronous.

    ``theta`` is the smallest value in [0, pi) with e^{i theta} eta isochronous. With
    ``strict_two_pole`` a form with two poles is never isochronous.
    """
    tol = get_app_settings().angular_tolerance if tolerance is None else tolerance
    found = residues(form)
    values = np.asarray([r.value for r in found], dtype=np.complex128)

    isochronous = bool(np.all(np.abs(values.real) <= math.sin(tol) * np.abs(values)))
    if strict_two_pole and form.k == 2:
        isochronous = False

    phi = _line_angle(values)
    defect = float(np.max(_angular_gap(values, phi)))
    rotatable = defect <= tol
    theta = None
    if rotatable:
        theta = math.fmod(math.pi / 2 - phi, math.pi)
        if theta < 0:
            theta += math.pi
        if theta <= tol or math.pi - theta <= tol:
            theta = 0.0
    logger.debug("Residue line at %.6g rad, defect %.3g", phi, defect)
    return IsochronyReport(
        residues=found,
        is_isochronous=isochronous,
        rotatable=rotatable,
        theta=theta,
        collinearity_defect=defect,
    )


def residue_classes(form: RationalOneForm, rtol: float = 1e-6) -> list[ResidueClass]:
    """Poles grouped by equal residue, in order of first appearance."""
    found = residues(form)
    labels = residue_labels(np.asarray([r.value for r in found]), rtol)
    return [
        ResidueClass(
            value=found[label].value,
            points=[r.at for r, other in zip(found, labels, strict=True) if other == label],
        )
        for label in dict.fromkeys(labels.tolist())
    ]


def has_polyhedral_geometry(form: RationalOneForm) -> bool:
    """Whether the quadratic differential eta ⊗ eta has polyhedral geometry."""
    return isochrony_report(form).is_isochronous


def mirror_search(
    form: RationalOneForm,
    group: FiniteMobiusGroup | None = None,
    *,
    epsilon: float | None = None,
) -> MirrorCertificate | None:
    """First reflection with sigma(P) = P and sigma(Z) = Z mapping every point into its orbit.

    Candidates are the anti-Möbius maps sending a fixed source triple of poles to ordered
    triples taken from the same orbits; the enumeration order is deterministic. ``group``
    defaults to the isotropy group of ``form``. Two-pole forms have no finite isotropy and
    give ``None``.
    """
    eps = get_app_settings().epsilon if epsilon is None else epsilon
    if group is None:
        group = isotropy(form, epsilon=epsilon).group
    if group is None:
        return None

    poles = form.poles.as_pairs()
    zeros = form.zeros.as_pairs()
    pole_orbits = orbit_labels(form.poles, group)
    zero_orbits = orbit_labels(form.zeros, group)

    source = source_triple(poles, pole_orbits)
    targets = target_triples(source, pole_orbits)
    matrices = candidate_maps(poles[list(source)], poles[targets], anti=True)
    residual = screen_candidates(matrices, poles, zeros, anti=True)
    logger.debug("Mirror search: %d anti-conformal candidates", len(matrices))

    loose = max(eps, 1e-9) * 100
    for index in np.flatnonzero(residual <= eps):
        sigma = AntiMobiusMap.from_matrix(matrices[index])
        if not sigma.is_reflection(loose):
            continue
        pole_pairing = match_pairs(sigma.apply_pairs(poles), poles, loose)
        zero_pairing = match_pairs(sigma.apply_pairs(zeros), zeros, loose)
        if pole_pairing is None or zero_pairing is None:
            continue
        if np.any(pole_orbits[list(pole_pairing)] != pole_orbits):
            continue
        if len(zeros) and np.any(zero_orbits[list(zero_pairing)] != zero_orbits):
            continue
        return MirrorCertificate(
            circle_points=sigma.fixed_circle(),
            reflection=sigma,
            pole_pairing=pole_pairing,
            zero_pairing=zero_pairing,
        )
    return None


def sufficient_condition_implies(
    form: RationalOneForm, certificate: MirrorCertificate, *, tolerance: float | None = None
) -> float:
    """The rotation angle that a valid mirror certificate guarantees.

    Raises:
        NumericalError: If the certificate does not check out, or it does and the residues are
            still not collinear
    """
    sigma = certificate.reflection
    loose = max(get_app_settings().epsilon, 1e-9) * 100
    poles = form.poles.as_pairs()
    if not sigma.is_reflection(loose):
        msg = "Mirror certificate does not hold a reflection"
        raise NumericalError(msg)
    if match_pairs(sigma.apply_pairs(poles), poles, loose) != certificate.pole_pairing:
        msg = "Mirror certificate pairing does not match the poles of the form"
        raise NumericalError(msg)

    report = isochrony_report(form, tolerance=tolerance)
    if not report.rotatable or report.theta is None:
        msg = (
            "Reflection criterion holds but the residues are not collinear "
            f"(defect {report.collinearity_defect:.3g} rad)"
        )
        raise NumericalError(msg)
    return report.theta
