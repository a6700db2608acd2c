"""Möbius polyhedra: vertices, edge midpoints and face centers of regular sphere tilings.

Explicit fundamental regions are not modeled. A point of a quasi-fundamental region is
recognized by its orbit size instead: its orbit has exactly ``|G|`` points, while vertices,
edge midpoints and face centers (the fixed points of nontrivial rotations) have shorter orbits.
"""

import cmath
import logging
import math
from functools import lru_cache
from typing import Any, Literal, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, model_serializer, model_validator

from isoforms.core.config import get_app_settings
from isoforms.core.errors import GroupTypeError, NumericalError, SpecialPointError
from isoforms.geometry.groups import (
    FiniteMobiusGroup,
    GroupTypeTag,
    canonical_group,
    conjugate,
    nontrivial_fixed_points,
    same_stacks,
)
from isoforms.geometry.mobius import (
    IDENTITY,
    AntiMobiusMap,
    MobiusMap,
    adjugate,
    compose,
    from_three_pairs,
    normalize_matrices,
)
from isoforms.geometry.sphere import (
    PointMultiset,
    SpherePoint,
    from_unit_vector,
    pairs_to_unit_vectors,
    pairwise_chordal,
)

logger = logging.getLogger(__name__)

type PolyhedronKind = Literal[
    "tetrahedron", "octahedron", "cube", "icosahedron", "dodecahedron", "dihedron", "hosohedron"
]
type Role = Literal["vertex", "edge", "face"]

_GROUP_KINDS = {
    "tetrahedron": "tetra",
    "octahedron": "octa",
    "cube": "octa",
    "icosahedron": "icosa",
    "dodecahedron": "icosa",
}
_DUALS: dict[str, str] = {
    "cube": "octahedron",
    "dodecahedron": "icosahedron",
    "hosohedron": "dihedron",
    "octahedron": "cube",
    "icosahedron": "dodecahedron",
    "dihedron": "hosohedron",
}
_PLATONIC_COUNTS = {
    "tetrahedron": (4, 6, 4),
    "octahedron": (6, 12, 8),
    "cube": (8, 12, 6),
    "icosahedron": (12, 30, 20),
    "dodecahedron": (20, 30, 12),
}
# Conjugating a numerically computed group amplifies its entry errors
_EMBED_TOLERANCE = 1e-6

# z -> -1/conj(z), the antipodal map of the round sphere
_ANTIPODAL = AntiMobiusMap(a=0, b=-1, c=1, d=0)


def expected_counts(kind: str, n: int | None = None) -> tuple[int, int, int]:
    """(v, e, f) of a polyhedron kind."""
    if kind == "dihedron":
        return n, n, 2  # type: ignore[return-value]
    if kind == "hosohedron":
        return 2, n, n  # type: ignore[return-value]
    return _PLATONIC_COUNTS[kind]


def group_tag_for(kind: str, n: int | None = None) -> GroupTypeTag:
    """Isometry group type of a polyhedron kind."""
    if kind in ("dihedron", "hosohedron"):
        return GroupTypeTag.dihedral(n)  # type: ignore[arg-type]
    return GroupTypeTag(kind=_GROUP_KINDS[kind])  # type: ignore[arg-type]


class MobiusPolyhedron(BaseModel):
    """A polyhedron embedded conformally in the sphere, with its isometry group.

    ``frame`` is the Möbius map taking the canonical (round) realization onto this one; the
    antipodal correspondence is transported through it.
    """

    model_config = ConfigDict(frozen=True)

    kind: PolyhedronKind
    n: int | None = None
    vertices: PointMultiset
    edge_midpoints: PointMultiset
    face_centers: PointMultiset
    group: FiniteMobiusGroup
    frame: MobiusMap = IDENTITY

    @model_validator(mode="after")
    def _check_cells(self) -> Self:
        expected = expected_counts(self.kind, self.n)
        actual = (len(self.vertices), len(self.edge_midpoints), len(self.face_centers))
        if actual != expected:
            msg = f"{self.kind} needs (v, e, f) = {expected}, got {actual}"
            raise NumericalError(msg)
        # Raises when V, E and F overlap
        self.special_points()
        return self

    def special_points(self) -> PointMultiset:
        """V ∪ E ∪ F."""
        return self.vertices.union(self.edge_midpoints).union(self.face_centers)

    @property
    def counts(self) -> tuple[int, int, int]:
        return len(self.vertices), len(self.edge_midpoints), len(self.face_centers)

    def role_of(self, point: SpherePoint, epsilon: float | None = None) -> Role | None:
        """Whether ``point`` is a vertex, an edge midpoint, a face center or none of them."""
        roles: tuple[tuple[Role, PointMultiset], ...] = (
            ("vertex", self.vertices),
            ("edge", self.edge_midpoints),
            ("face", self.face_centers),
        )
        for role, points in roles:
            if points.contains(point, epsilon):
                return role
        return None

    @model_serializer
    def _serialize(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "kind": self.kind,
            "V": self.vertices.model_dump(),
            "E": self.edge_midpoints.model_dump(),
            "F": self.face_centers.model_dump(),
        }
        if self.n is not None:
            payload["n"] = self.n
        return payload


def orbit(
    group: FiniteMobiusGroup, point: SpherePoint, epsilon: float | None = None
) -> PointMultiset:
    """{g(p) : g in G} without repetitions, starting with ``point`` itself."""
    eps = get_app_settings().epsilon if epsilon is None else epsilon
    images = group.stack() @ np.asarray(point.pair(), dtype=np.complex128)
    distances = pairwise_chordal(images, images)
    kept: list[int] = []
    for index in range(len(images)):
        if kept and distances[index, kept].min() <= eps:
            continue
        kept.append(index)
    points = [
        point if index == 0 else SpherePoint.from_pair(*images[index], snap=True)
        for index in kept
    ]
    return PointMultiset(points=tuple(points))


def orbit_size_class(
    group: FiniteMobiusGroup, point: SpherePoint, epsilon: float | None = None
) -> Literal["full", "special"]:
    """``full`` when the stabilizer of ``point`` is trivial."""
    return "full" if len(orbit(group, point, epsilon)) == group.order else "special"


def canonical_representative(points: PointMultiset | list[SpherePoint]) -> SpherePoint:
    """The point with lexicographically smallest (re, im) rounded to 12 digits; inf comes last."""

    def key(point: SpherePoint) -> tuple[int, float, float]:
        if point.is_infinite:
            return 1, 0.0, 0.0
        value = point.to_complex()
        return 0, round(value.real, 12), round(value.imag, 12)

    return min(points, key=key)


def _edges_and_faces(
    group: FiniteMobiusGroup, vertices: PointMultiset
) -> tuple[PointMultiset, PointMultiset]:
    # Edge midpoint and face center of a triangle of mutually nearest vertices, in R^3
    vectors = pairs_to_unit_vectors(vertices.as_pairs())
    gaps = np.linalg.norm(vectors[:, None, :] - vectors[None, :, :], axis=-1)
    np.fill_diagonal(gaps, np.inf)
    neighbour = int(np.argmin(gaps[0]))
    edge = gaps[0, neighbour]
    mismatch = np.maximum(np.abs(gaps[0] - edge), np.abs(gaps[neighbour] - edge))
    mismatch[[0, neighbour]] = np.inf
    third = int(np.argmin(mismatch))
    midpoint = from_unit_vector(vectors[0] + vectors[neighbour])
    center = from_unit_vector(vectors[0] + vectors[neighbour] + vectors[third])
    return orbit(group, midpoint), orbit(group, center)


def _dual(polyhedron: MobiusPolyhedron, kind: str) -> MobiusPolyhedron:
    return MobiusPolyhedron(
        kind=kind,  # type: ignore[arg-type]
        n=polyhedron.n,
        vertices=polyhedron.face_centers,
        edge_midpoints=polyhedron.edge_midpoints,
        face_centers=polyhedron.vertices,
        group=polyhedron.group,
        frame=polyhedron.frame,
    )


@lru_cache(maxsize=64)
def canonical_polyhedron(kind: PolyhedronKind, n: int | None = None) -> MobiusPolyhedron:
    """The round realization of ``kind`` whose isometry group is the canonical group.

    Raises:
        ValueError: If ``n`` is missing (or below 2) for dihedra and hosohedra
    """
    if kind in ("dihedron", "hosohedron"):
        if n is None or n < 2:
            msg = f"{kind} needs n >= 2, got {n}"
            raise ValueError(msg)
    else:
        n = None
    if kind in ("cube", "dodecahedron", "hosohedron"):
        return _dual(canonical_polyhedron(_DUALS[kind], n), kind)  # type: ignore[arg-type]

    group = canonical_group(group_tag_for(kind, n))
    match kind:
        case "tetrahedron":
            b = math.sqrt(6) / (3 + math.sqrt(3)) * complex(0.5, math.sqrt(3) / 2)
            vertices = orbit(group, SpherePoint.from_complex(1 / math.sqrt(2)))
            edges = orbit(group, SpherePoint.from_complex(b))
            faces = orbit(group, SpherePoint.from_complex(0))
        case "octahedron":
            vertices = orbit(group, SpherePoint.from_complex(0))
            edges = orbit(group, SpherePoint.from_complex(math.sqrt(2) - 1))
            faces = orbit(group, from_unit_vector((1.0, 1.0, -1.0)))
        case "icosahedron":
            vertices = orbit(group, SpherePoint.from_complex(0))
            edges, faces = _edges_and_faces(group, vertices)
        case _:
            count = int(n)  # type: ignore[arg-type]
            roots = [cmath.exp(2j * math.pi * k / count) for k in range(count)]
            half = cmath.exp(1j * math.pi / count)
            vertices = PointMultiset(points=tuple(SpherePoint.from_complex(r) for r in roots))
            edges = PointMultiset(points=tuple(SpherePoint.from_complex(r * half) for r in roots))
            faces = PointMultiset(points=(SpherePoint.from_complex(0), SpherePoint.infinity()))
    return MobiusPolyhedron(
        kind=kind,
        n=n,
        vertices=vertices,
        edge_midpoints=edges,
        face_centers=faces,
        group=group,
    )


def antipode(polyhedron: MobiusPolyhedron, point: SpherePoint) -> SpherePoint:
    """The opposite special point, through the polyhedron's frame.

    Raises:
        SpecialPointError: If ``point`` is not a vertex, edge midpoint or face center
    """
    special = polyhedron.special_points()
    if not special.contains(point):
        msg = f"{point!r} is not a vertex, edge midpoint or face center of the {polyhedron.kind}"
        raise SpecialPointError(msg)
    frame = polyhedron.frame
    image = frame(_ANTIPODAL(frame.inverse()(point)))
    index = special.index_of(image, max(get_app_settings().epsilon, 1e-9))
    return image if index is None else special[index]


def transport(polyhedron: MobiusPolyhedron, t: MobiusMap) -> MobiusPolyhedron:
    """Image of ``polyhedron`` under ``t``, with the conjugated isometry group."""

    def move(points: PointMultiset) -> PointMultiset:
        return PointMultiset(points=tuple(t(p) for p in points))

    return MobiusPolyhedron(
        kind=polyhedron.kind,
        n=polyhedron.n,
        vertices=move(polyhedron.vertices),
        edge_midpoints=move(polyhedron.edge_midpoints),
        face_centers=move(polyhedron.face_centers),
        group=conjugate(polyhedron.group, t),
        frame=compose(t, polyhedron.frame),
    )


def _conjugates_onto(
    t: MobiusMap, source: np.ndarray, target: np.ndarray, epsilon: float
) -> bool:
    m = t.matrix
    images = normalize_matrices(m @ source @ adjugate(m))
    return same_stacks(images, target, epsilon)


def find_conjugator(
    source: FiniteMobiusGroup, target: FiniteMobiusGroup, epsilon: float | None = None
) -> MobiusMap:
    """A Möbius map ``t`` with ``t source t^-1 = target`` for groups of the same type.

    Rotation axes are matched: the axis of a top-order rotation of ``source`` and one point of a
    second axis determine ``t``, and every admissible image triple in ``target`` is tried.

    Raises:
        GroupTypeError: If the groups have different types, or are cyclic
        NumericalError: If no axis correspondence conjugates one group onto the other
    """
    if source.type_tag != target.type_tag:
        msg = f"Cannot conjugate {source.type_tag.label} onto {target.type_tag.label}"
        raise GroupTypeError(msg)
    if source.type_tag.kind in ("trivial", "cyclic"):
        msg = f"{source.type_tag.label} is not determined by its axes up to conjugation"
        raise GroupTypeError(msg)
    eps = _EMBED_TOLERANCE if epsilon is None else epsilon

    source_axes = nontrivial_fixed_points(source)
    target_axes = nontrivial_fixed_points(target)
    top = max(axis.order for axis in source_axes)
    first = next(axis for axis in source_axes if axis.order == top)
    second = next(axis for axis in source_axes if axis is not first)
    src = [first.points[0], first.points[1], second.points[0]]

    source_stack, target_stack = source.stack(), target.stack()
    tried = 0
    for main in (axis for axis in target_axes if axis.order == top):
        for x, y in (main.points, main.points[::-1]):
            for other in target_axes:
                if other is main or other.order != second.order:
                    continue
                for u in other.points:
                    tried += 1
                    t = from_three_pairs(src, [x, y, u])
                    if _conjugates_onto(t, source_stack, target_stack, eps):
                        logger.debug("Conjugator found after %d axis correspondences", tried)
                        return t
    msg = f"No conjugator found among {tried} axis correspondences"
    raise NumericalError(msg)


def embed(group: FiniteMobiusGroup, *, dual: bool = False) -> MobiusPolyhedron:
    """A polyhedron whose isometry group is exactly ``group`` (a conjugate of a canonical one).

    Dihedral groups give the dihedron (hosohedron with ``dual``); platonic groups give the
    tetrahedron, octahedron or icosahedron (cube or dodecahedron with ``dual``).

    Raises:
        GroupTypeError: If ``group`` is trivial or cyclic
    """
    tag = group.type_tag
    kinds = {"tetra": "tetrahedron", "octa": "octahedron", "icosa": "icosahedron"}
    if tag.kind == "dihedral":
        kind = "dihedron"
    elif tag.kind in kinds:
        kind = kinds[tag.kind]
    else:
        msg = f"{tag.label} has no polyhedron of its own"
        raise GroupTypeError(msg)
    if dual:
        kind = _DUALS[kind]
    canonical = canonical_polyhedron(kind, tag.n)  # type: ignore[arg-type]
    t = find_conjugator(canonical.group, group)
    return transport(canonical, t)

