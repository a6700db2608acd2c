"""Construction of G-invariant forms from a finite group, a pole-count cell and orbit data.

A cell of the pole-count table is a pair (group family, dif) with dif = l1 - l2. It decides
which special points of the group's polyhedron carry poles and which carry zeros; the l1 zero
orbits and l2 pole orbits of generic points are then added on top.
"""

import logging
from typing import Literal, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from isoforms.core.config import get_app_settings
from isoforms.core.errors import (
    IllegalCellError,
    InvalidPointError,
    NumericalError,
    SamplingError,
    SynthesisError,
)
from isoforms.forms.isotropy import isotropy
from isoforms.forms.oneform import RationalOneForm, pushforward
from isoforms.geometry.groups import GroupTypeTag, canonical_group
from isoforms.geometry.mobius import IDENTITY, MobiusMap
from isoforms.geometry.polyhedra import canonical_polyhedron, canonical_representative, orbit
from isoforms.geometry.sphere import (
    INFINITY,
    ComplexJson,
    Point,
    PointMultiset,
    SpherePoint,
    pairwise_chordal,
    random_point,
)

logger = logging.getLogger(__name__)

type CellFamily = Literal["platonic", "dihedral", "dihedral2", "cyclic", "cyclic2"]
type Z2Orientation = Literal["pole_at_zero", "pole_at_infinity"]

FIBER = "PSL(2,C)/G × C*"

# Populated cells of the pole-count table: family -> {dif: smallest allowed l2}
ALLOWED_CELLS: dict[CellFamily, dict[int, int]] = {
    "platonic": {0: 0, 1: 0},
    "dihedral": {-1: 1, 0: 0, 1: 0},
    "dihedral2": {-2: 2, -1: 1, 0: 0, 1: 0},
    "cyclic": {0: 1},
    "cyclic2": {-2: 2, -1: 1, 0: 1},
}

_POLYHEDRON_OF = {"tetra": "tetrahedron", "octa": "octahedron", "icosa": "icosahedron"}


def cell_family(tag: GroupTypeTag) -> CellFamily:
    """Row family of the pole-count table that ``tag`` belongs to.

    Raises:
        IllegalCellError: For the trivial group, which has no row
    """
    match tag.kind:
        case "trivial":
            msg = "illegal table cell: the trivial group has no row in the pole-count table"
            raise IllegalCellError(msg)
        case "cyclic":
            return "cyclic2" if tag.n == 2 else "cyclic"
        case "dihedral":
            return "dihedral2" if tag.n == 2 else "dihedral"
        case _:
            return "platonic"


def check_cell(tag: GroupTypeTag, dif: int, l2: int) -> None:
    """Raise IllegalCellError unless (tag, dif, l2) is a populated cell of the table."""
    family = cell_family(tag)
    cells = ALLOWED_CELLS[family]
    if dif not in cells:
        msg = f"illegal table cell: {tag.label} with dif={dif} (allowed: {sorted(cells)})"
        raise IllegalCellError(msg)
    if l2 < cells[dif]:
        msg = f"illegal table cell: {tag.label} with dif={dif} needs l2 >= {cells[dif]}, got {l2}"
        raise IllegalCellError(msg)


def moduli_dimension(l1: int, l2: int) -> int:
    """Complex dimension of the stratum of forms with l1 zero orbits and l2 pole orbits."""
    return l1 + l2 + 4


class SynthesisSpec(BaseModel):
    """Requested group, table cell and orbit representatives of a G-invariant form.

    Representatives are given in the canonical frame of the group; ``conjugator`` moves the
    finished form (and its group) elsewhere. ``lambda`` is the leading coefficient in the
    canonical frame.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    group: GroupTypeTag
    conjugator: MobiusMap = IDENTITY
    dif: int
    interior_poles: tuple[Point, ...] = ()
    interior_zeros: tuple[Point, ...] = ()
    lambda_: ComplexJson = Field(default=-1j, alias="lambda")
    z2_orientation: Z2Orientation = "pole_at_zero"

    @field_validator("dif")
    @classmethod
    def _check_dif(cls, v: int) -> int:
        if v not in (-2, -1, 0, 1):
            msg = f"illegal table cell: dif must be one of -2, -1, 0, 1, got {v}"
            raise IllegalCellError(msg)
        return v

    @model_validator(mode="after")
    def _check_counts(self) -> Self:
        if self.l1 - self.l2 != self.dif:
            msg = (
                f"dif={self.dif} does not match {self.l1} zero and {self.l2} pole "
                "representatives"
            )
            raise IllegalCellError(msg)
        check_cell(self.group, self.dif, self.l2)
        return self

    @property
    def l1(self) -> int:
        return len(self.interior_zeros)

    @property
    def l2(self) -> int:
        return len(self.interior_poles)


class StratumDescriptor(BaseModel):
    model_config = ConfigDict(frozen=True)

    group: str
    l1: int
    l2: int
    k: int
    dim: int
    fiber: str = FIBER


def _count(tag: GroupTypeTag, dif: int, l2: int) -> int:
    check_cell(tag, dif, l2)
    generic = l2 * tag.order
    if tag.kind == "cyclic":
        return generic + {-2: 0, -1: 1, 0: 2}[dif]
    if tag.kind == "dihedral":
        v, e, f = tag.n, tag.n, 2
    else:
        polyhedron = canonical_polyhedron(_POLYHEDRON_OF[tag.kind])  # type: ignore[arg-type]
        v, e, f = polyhedron.counts
    return generic + {-2: 0, -1: f, 0: v + f, 1: v + e + f}[dif]


def pole_count(spec: SynthesisSpec) -> int:
    """Number of poles of the form described by ``spec``.

    Raises:
        IllegalCellError: If the (group, dif) cell is not populated
    """
    return _count(spec.group, spec.dif, spec.l2)


def stratum(spec: SynthesisSpec) -> StratumDescriptor:
    return StratumDescriptor(
        group=spec.group.label,
        l1=spec.l1,
        l2=spec.l2,
        k=pole_count(spec),
        dim=moduli_dimension(spec.l1, spec.l2),
    )


def _special_placement(spec: SynthesisSpec) -> tuple[list[SpherePoint], list[SpherePoint]]:
    """(poles, zeros) placed on the special points of the group."""
    tag = spec.group
    if tag.kind == "cyclic":
        origin = SpherePoint.from_complex(0)
        match spec.dif:
            case 0:
                return [origin, INFINITY], []
            case -1 if spec.z2_orientation == "pole_at_zero":
                return [origin], [INFINITY]
            case -1:
                return [INFINITY], [origin]
            case _:
                return [], [origin, INFINITY]

    if tag.kind == "dihedral":
        polyhedron = canonical_polyhedron("dihedron", tag.n)
    else:
        polyhedron = canonical_polyhedron(_POLYHEDRON_OF[tag.kind])  # type: ignore[arg-type]
    v = list(polyhedron.vertices)
    e = list(polyhedron.edge_midpoints)
    f = list(polyhedron.face_centers)
    match spec.dif:
        case 1:
            return v + e + f, []
        case 0:
            return v + f, e
        case -1:
            return f, v + e
        case _:
            return [], v + e + f


def _expand(
    representatives: tuple[SpherePoint, ...], tag: GroupTypeTag, role: str
) -> list[SpherePoint]:
    group = canonical_group(tag)
    points: list[SpherePoint] = []
    for rep in representatives:
        members = orbit(group, rep)
        if len(members) != group.order:
            msg = (
                f"Interior {role} {rep!r} has an orbit of {len(members)} points under "
                f"{tag.label}; a full orbit of {group.order} is required"
            )
            raise SynthesisError(msg)
        points.extend(members)
    return points


def synthesize(spec: SynthesisSpec, *, verify: bool = True) -> RationalOneForm:
    """The G-invariant form of the given cell with the given interior orbits.

    With ``verify`` the isotropy of the result is recomputed and must equal the requested group.

    Raises:
        IllegalCellError: If the cell is not populated
        SynthesisError: If an interior orbit is not full, orbits overlap, or the result has
            accidental extra symmetry (the larger group is attached as ``achieved``)
    """
    tag = spec.group
    expected = pole_count(spec)
    poles, zeros = _special_placement(spec)
    poles = poles + _expand(spec.interior_poles, tag, "pole")
    zeros = zeros + _expand(spec.interior_zeros, tag, "zero")

    try:
        form = RationalOneForm(
            lambda_=spec.lambda_,
            zeros=PointMultiset(points=tuple(zeros)),
            poles=PointMultiset(points=tuple(poles)),
        )
    except InvalidPointError as e:
        msg = f"Orbits of the {tag.label} synthesis overlap: {e}"
        raise SynthesisError(msg) from e

    if form.k != expected:
        msg = f"Synthesized {form.k} poles, the table predicts {expected}"
        raise NumericalError(msg)
    if not spec.conjugator.is_identity():
        form = pushforward(spec.conjugator, form)
    logger.info("Synthesized %s form with %d poles", tag.label, form.k)

    if verify:
        achieved = isotropy(form).group
        if achieved is None or achieved.order < tag.order:
            msg = f"Synthesized form lost its {tag.label} symmetry"
            raise NumericalError(msg)
        if achieved.order > tag.order:
            msg = (
                f"accidental extra symmetry: requested {tag.label}, "
                f"achieved {achieved.type_tag.label} of order {achieved.order}"
            )
            raise SynthesisError(msg, achieved=achieved)
    return form


def _clear(points: list[SpherePoint], separation: float) -> bool:
    pairs = np.asarray([p.pair() for p in points], dtype=np.complex128)
    distances = pairwise_chordal(pairs, pairs)
    np.fill_diagonal(distances, np.inf)
    return bool(distances.min() >= separation) if len(points) > 1 else True


def sample_stratum(
    tag: GroupTypeTag,
    l1: int,
    l2: int,
    seed: int,
    *,
    lambda_: complex = -1j,
    z2_orientation: Z2Orientation = "pole_at_zero",
    max_rejections: int | None = None,
) -> RationalOneForm:
    """A random form of the stratum (tag, l1, l2), deterministic in ``seed``.

    Interior representatives are drawn uniformly on the sphere and rejected until their orbits
    are full, pairwise separated and clear of the special points, and the synthesized form has
    exactly the requested isotropy.

    Raises:
        IllegalCellError: If (tag, l1 - l2) is not a populated cell
        SamplingError: After ``max_rejections`` rejected draws
    """
    settings = get_app_settings()
    cap = settings.max_rejections if max_rejections is None else max_rejections
    check_cell(tag, l1 - l2, l2)
    group = canonical_group(tag)
    template = SynthesisSpec(
        group=tag,
        dif=l1 - l2,
        interior_zeros=(INFINITY,) * l1,
        interior_poles=(INFINITY,) * l2,
        lambda_=lambda_,
        z2_orientation=z2_orientation,
    )
    placed_poles, placed_zeros = _special_placement(template)
    special = placed_poles + placed_zeros
    rng = np.random.default_rng(seed)

    for attempt in range(1, cap + 1):
        representatives: list[SpherePoint] = []
        points = list(special)
        for _ in range(l1 + l2):
            members = orbit(group, random_point(rng))
            representatives.append(canonical_representative(members))
            points.extend(members)
        if len(points) != len(special) + (l1 + l2) * group.order:
            continue
        if not _clear(points, settings.sample_separation):
            continue
        spec = template.model_copy(
            update={
                "interior_zeros": tuple(representatives[:l1]),
                "interior_poles": tuple(representatives[l1:]),
            }
        )
        try:
            form = synthesize(spec)
        except SynthesisError as e:
            logger.debug("Sample %d rejected: %s", attempt, e)
            continue
        logger.info("Sampled %s stratum (l1=%d, l2=%d) after %d draws", tag.label, l1, l2, attempt)
        return form

    msg = f"could not sample the {tag.label} stratum (l1={l1}, l2={l2}) in {cap} draws"
    raise SamplingError(msg)
