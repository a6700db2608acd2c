"""Isotropy groups of rational 1-forms and the invariance characterization checks.

A Möbius symmetry of a form permutes its poles and preserves residues, so it is fixed by the
images of three poles. Candidates are all maps sending a source triple of poles to target
triples with matching residues; each candidate is screened on the pole and zero sets and then
confirmed by comparing push-forwards.
"""

import itertools
import logging
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from isoforms.core.config import get_app_settings
from isoforms.core.errors import GroupTypeError, NumericalError
from isoforms.forms.oneform import (
    RationalOneForm,
    form_equal,
    probe_points,
    pushforward,
    residues,
)
from isoforms.geometry.groups import (
    FiniteMobiusGroup,
    generators,
    identify_elements,
    nontrivial_fixed_points,
    same_elements,
)
from isoforms.geometry.mobius import (
    MobiusMap,
    adjugate,
    cross_ratio_matrices,
    from_three_pairs,
    normalize_matrices,
)
from isoforms.geometry.polyhedra import orbit
from isoforms.geometry.sphere import (
    INFINITY,
    ComplexArray,
    ComplexJson,
    PointMultiset,
    SpherePoint,
    multiset_match,
    pairwise_chordal,
)

logger = logging.getLogger(__name__)

# Residues closer than this (relative to the largest) are treated as equal
_RESIDUE_RTOL = 1e-6
# Number of poles from the smallest residue classes considered for the source triple
_SOURCE_POOL = 6
_CHUNK = 2048


class OrbitEntry(BaseModel):
    """One orbit of poles or zeros under the isotropy group."""

    model_config = ConfigDict(frozen=True)

    role: Literal["pole", "zero"]
    points: PointMultiset
    size: int
    full: bool


class OrbitReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    orbits: list[OrbitEntry]
    l1: int
    l2: int


class BorderlineCandidate(BaseModel):
    """A near-symmetry whose residual fell between epsilon and the warning band limit."""

    model_config = ConfigDict(frozen=True)

    map: MobiusMap
    residual: float


class IsotropyResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["continuous_cstar", "finite"]
    group: FiniteMobiusGroup | None = None
    conjugator: MobiusMap | None = None
    normal_lambda: ComplexJson | None = None
    orbit_report: OrbitReport | None = None
    borderline: list[BorderlineCandidate] = []

    def to_document(self) -> dict[str, Any]:
        """The JSON payload printed by the ``isotropy`` command."""
        if self.kind == "continuous_cstar":
            return {
                "kind": self.kind,
                "conjugator": self.conjugator.model_dump() if self.conjugator else None,
                "normal_lambda": [self.normal_lambda.real, self.normal_lambda.imag]
                if self.normal_lambda is not None
                else None,
            }
        group, report = self.group, self.orbit_report
        if group is None or report is None:
            msg = "Finite isotropy result without a group"
            raise NumericalError(msg)
        return {
            "kind": self.kind,
            "group_type": group.type_tag.label,
            "n": group.type_tag.n,
            "order": group.order,
            "generators": [g.model_dump() for g in generators(group)],
            "orbit_report": [
                {"role": o.role, "size": o.size, "full": o.full, "points": o.points.model_dump()}
                for o in report.orbits
            ],
            "l1": report.l1,
            "l2": report.l2,
            "borderline": [b.residual for b in self.borderline],
        }


class Cond3Failure(BaseModel):
    """A rotation axis whose fixed point violates the fixed-point condition."""

    model_config = ConfigDict(frozen=True)

    element: MobiusMap
    point: SpherePoint
    reason: str


class CharacterizationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    cond1: bool
    cond2: bool
    cond3_failures: list[Cond3Failure]
    maximal: bool

    @property
    def conditions_hold(self) -> bool:
        """Poles invariant, zeros invariant and no fixed-point failure."""
        return self.cond1 and self.cond2 and not self.cond3_failures

    @property
    def all_true(self) -> bool:
        return self.conditions_hold and self.maximal


def residue_labels(values: ComplexArray, rtol: float = _RESIDUE_RTOL) -> np.ndarray:
    """Label of each residue: the index of the first residue equal to it within ``rtol``."""
    scale = float(np.max(np.abs(values))) if len(values) else 1.0
    labels = np.arange(len(values))
    for i in range(len(values)):
        close = np.flatnonzero(np.abs(values[:i] - values[i]) <= rtol * scale)
        if len(close):
            labels[i] = labels[close[0]]
    return labels


def normal_form_two_pole(form: RationalOneForm) -> tuple[MobiusMap, complex]:
    """For a two-pole form: T with T_* eta = lambda dz/z, and that lambda (the residue at p1)."""
    if form.k != 2:
        msg = f"Normal form lambda dz/z needs exactly two poles, the form has {form.k}"
        raise GroupTypeError(msg)
    p1, p2 = form.poles
    probe = SpherePoint.from_complex(complex(probe_points(form.poles.as_pairs(), count=1)[0]))
    zero, one = SpherePoint.from_complex(0), SpherePoint.from_complex(1)
    t = from_three_pairs([p1, p2, probe], [zero, INFINITY, one])
    return t, residues(form)[0].value


def source_triple(pairs: ComplexArray, labels: np.ndarray) -> tuple[int, int, int]:
    """Three well separated points from the smallest label classes."""
    sizes = np.bincount(labels, minlength=len(labels))[labels]
    pool = sorted(range(len(pairs)), key=lambda i: (sizes[i], i))[:_SOURCE_POOL]
    distances = pairwise_chordal(pairs, pairs)

    def separation(triple: tuple[int, int, int]) -> float:
        i, j, k = triple
        return min(distances[i, j], distances[i, k], distances[j, k])

    return max(itertools.combinations(pool, 3), key=separation)  # type: ignore[return-value]


def target_triples(source: tuple[int, int, int], labels: np.ndarray) -> np.ndarray:
    """Ordered triples of distinct indices, each in the class of the matching source index."""
    members = [np.flatnonzero(labels == labels[s]) for s in source]
    grid = np.array(list(itertools.product(*members)), dtype=np.intp).reshape(-1, 3)
    a, b, c = grid[:, 0], grid[:, 1], grid[:, 2]
    distinct = (a != b) & (a != c) & (b != c)
    return grid[distinct]


def candidate_maps(
    source: ComplexArray, targets: ComplexArray, *, anti: bool = False
) -> np.ndarray:
    """Matrices sending the source triple to each target triple (conjugated source for ``anti``)."""
    start = np.conj(source) if anti else source
    forward = cross_ratio_matrices(start)
    return normalize_matrices(adjugate(cross_ratio_matrices(targets)) @ forward)


def screen_candidates(
    matrices: np.ndarray, poles: ComplexArray, zeros: ComplexArray, *, anti: bool = False
) -> np.ndarray:
    """Residual of each candidate as a permutation of poles and of zeros."""
    p = np.conj(poles) if anti else poles
    z = np.conj(zeros) if anti else zeros
    residual = np.empty(len(matrices))
    for start in range(0, len(matrices), _CHUNK):
        chunk = matrices[start : start + _CHUNK]
        pole_residual = _images_residual(chunk, p, poles)
        zero_residual = _images_residual(chunk, z, zeros)
        residual[start : start + _CHUNK] = np.maximum(pole_residual, zero_residual)
    return residual


def _images_residual(
    matrices: np.ndarray, sources: ComplexArray, targets: ComplexArray
) -> np.ndarray:
    """Per candidate, the largest chordal distance from an image point to the target set."""
    if len(sources) == 0:
        return np.zeros(len(matrices))
    images = np.einsum("mij,kj->mki", matrices, sources)
    cross = np.abs(
        images[:, :, None, 0] * targets[None, None, :, 1]
        - targets[None, None, :, 0] * images[:, :, None, 1]
    )
    norms = np.linalg.norm(images, axis=-1)[:, :, None] * np.linalg.norm(targets, axis=-1)
    return np.max(np.min(2.0 * cross / norms, axis=-1), axis=-1)


def _check_closed(stack: np.ndarray, epsilon: float) -> None:
    products = normalize_matrices(np.einsum("aij,bjk->abik", stack, stack)).reshape(-1, 4)
    flat = stack.reshape(len(stack), 1, 4)
    distance = np.minimum(
        np.max(np.abs(products[None] - flat), axis=-1),
        np.max(np.abs(products[None] + flat), axis=-1),
    )
    if np.any(distance.min(axis=0) > epsilon):
        msg = "Isotropy candidates are not closed under composition"
        raise NumericalError(msg)


def orbit_labels(points: PointMultiset, group: FiniteMobiusGroup) -> np.ndarray:
    """Label of each point: the index of the first point of its G-orbit."""
    tolerance = max(get_app_settings().epsilon, 1e-9)
    labels = np.full(len(points), -1, dtype=np.intp)
    for index, point in enumerate(points):
        if labels[index] >= 0:
            continue
        for member in orbit(group, point):
            found = points.index_of(member, tolerance)
            if found is not None:
                labels[found] = index
    return labels


def _orbit_report(form: RationalOneForm, group: FiniteMobiusGroup) -> OrbitReport:
    entries: list[OrbitEntry] = []
    for role, points in (("pole", form.poles), ("zero", form.zeros)):
        labels = orbit_labels(points, group)
        for index in np.unique(labels):
            members = orbit(group, points[int(index)])
            entries.append(
                OrbitEntry(
                    role=role,  # type: ignore[arg-type]
                    points=members,
                    size=len(members),
                    full=len(members) == group.order,
                )
            )
    l1 = sum(1 for e in entries if e.role == "zero" and e.full)
    l2 = sum(1 for e in entries if e.role == "pole" and e.full)
    return OrbitReport(orbits=entries, l1=l1, l2=l2)


def isotropy(form: RationalOneForm, *, epsilon: float | None = None) -> IsotropyResult:
    """The group of Möbius maps T with T_* eta = eta.

    Two-pole forms have the continuous isotropy C*; they are reported with the conjugator to
    the normal form lambda dz/z. Otherwise the group is finite and is found by candidate search.

    Raises:
        NumericalError: If the accepted candidates do not form a group
    """
    settings = get_app_settings()
    eps = settings.epsilon if epsilon is None else epsilon
    band = settings.borderline_factor * eps

    if form.k == 2:
        t, lam = normal_form_two_pole(form)
        return IsotropyResult(kind="continuous_cstar", conjugator=t, normal_lambda=lam)

    poles = form.poles.as_pairs()
    zeros = form.zeros.as_pairs()
    labels = residue_labels(np.asarray([r.value for r in residues(form)]))
    source = source_triple(poles, labels)
    targets = target_triples(source, labels)
    matrices = candidate_maps(poles[list(source)], poles[targets])
    residual = screen_candidates(matrices, poles, zeros)
    logger.debug("Isotropy search: %d candidates from source poles %s", len(matrices), source)

    accepted: list[MobiusMap] = []
    borderline: list[BorderlineCandidate] = []
    for index in np.flatnonzero(residual <= band):
        t = MobiusMap.from_matrix(matrices[index])
        if residual[index] > eps:
            borderline.append(BorderlineCandidate(map=t, residual=float(residual[index])))
            logger.warning(
                "Borderline symmetry candidate with residual %.3g (epsilon %.3g)",
                residual[index],
                eps,
            )
            continue
        if form_equal(pushforward(t, form), form, eps):
            accepted.append(t)

    accepted.sort(key=lambda g: not g.is_identity())
    stack = np.asarray([g.matrix for g in accepted])
    _check_closed(stack, max(eps, 1e-9) * 100)
    group = FiniteMobiusGroup(
        elements=tuple(accepted), type_tag=identify_elements(accepted, max(eps, 1e-9) * 100)
    )
    logger.info("Isotropy group %s of order %d", group.type_tag.label, group.order)
    return IsotropyResult(
        kind="finite", group=group, orbit_report=_orbit_report(form, group), borderline=borderline
    )


def _invariant(points: PointMultiset, group: FiniteMobiusGroup, epsilon: float) -> bool:
    pairs = points.as_pairs()
    return all(
        multiset_match(g.apply_pairs(pairs), pairs, epsilon) is not None
        for g in group.elements
    )


def check_characterization(
    form: RationalOneForm, group: FiniteMobiusGroup, *, epsilon: float | None = None
) -> CharacterizationReport:
    """Invariance conditions of ``form`` under ``group`` and whether ``group`` is its isotropy.

    Condition 3 requires the fixed points of order-2 rotations to be poles or zeros, and those
    of rotations of order at least 3 to be poles.
    """
    eps = get_app_settings().epsilon if epsilon is None else epsilon
    failures: list[Cond3Failure] = []
    for axis in nontrivial_fixed_points(group):
        for point in axis.points:
            is_pole = form.poles.contains(point, eps)
            is_zero = form.zeros.contains(point, eps)
            if axis.order == 2:
                if not (is_pole or is_zero):
                    reason = "order-2 element fixes a regular point"
                    failures.append(Cond3Failure(element=axis.element, point=point, reason=reason))
            elif is_zero:
                reason = f"order-{axis.order} element fixes a zero"
                failures.append(Cond3Failure(element=axis.element, point=point, reason=reason))
            elif not is_pole:
                reason = f"order-{axis.order} element fixes a regular point"
                failures.append(Cond3Failure(element=axis.element, point=point, reason=reason))

    computed = isotropy(form, epsilon=epsilon)
    maximal = computed.group is not None and same_elements(computed.group, group, 1e-6)
    return CharacterizationReport(
        cond1=_invariant(form.poles, group, eps),
        cond2=_invariant(form.zeros, group, eps),
        cond3_failures=failures,
        maximal=maximal,
    )


def check_a5_shortcut(
    form: RationalOneForm, group: FiniteMobiusGroup, *, epsilon: float | None = None
) -> bool:
    """For icosahedral groups, invariance of the pole and zero sets alone decides the question.

    Raises:
        GroupTypeError: If ``group`` is not of type A5
    """
    if group.type_tag.kind != "icosa":
        msg = f"The two-condition shortcut holds for A5 only, got {group.type_tag.label}"
        raise GroupTypeError(msg)
    eps = get_app_settings().epsilon if epsilon is None else epsilon
    return _invariant(form.poles, group, eps) and _invariant(form.zeros, group, eps)
