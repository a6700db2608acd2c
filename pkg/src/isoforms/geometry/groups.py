"""Finite Möbius groups: closure of generators, type identification and canonical realizations.

Every finite subgroup of PSL(2, C) is cyclic, dihedral, tetrahedral (A4), octahedral (S4) or
icosahedral (A5). Groups are stored as explicit element lists; with at most 60 elements the
membership tests below are plain vectorized scans.
"""

import cmath
import logging
import math
import re
from collections import deque
from collections.abc import Iterable, Sequence
from functools import lru_cache
from typing import Any, Literal, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, model_serializer, model_validator

from isoforms.core.config import get_app_settings
from isoforms.core.errors import NotFiniteError, SignatureError
from isoforms.geometry.mobius import (
    IDENTITY,
    Matrix,
    MobiusMap,
    compose,
    fixed_points,
    rotation_order,
)
from isoforms.geometry.sphere import SpherePoint, as_pairs, match_pairs

logger = logging.getLogger(__name__)

type GroupKind = Literal["trivial", "cyclic", "dihedral", "tetra", "octa", "icosa"]

_FIXED_ORDERS: dict[str, int] = {"trivial": 1, "tetra": 12, "octa": 24, "icosa": 60}
_LABELS: dict[str, str] = {"trivial": "trivial", "tetra": "A4", "octa": "S4", "icosa": "A5"}
_LABEL_PATTERN = re.compile(r"^(?P<family>[ZCD])(?P<n>\d+)$")


class GroupTypeTag(BaseModel):
    """Isomorphism type of a finite Möbius group; ``n`` is set for cyclic and dihedral types."""

    model_config = ConfigDict(frozen=True)

    kind: GroupKind
    n: int | None = None

    @model_validator(mode="after")
    def _check_parameter(self) -> Self:
        if self.kind in ("cyclic", "dihedral"):
            if self.n is None or self.n < 2:
                msg = f"{self.kind} groups need n >= 2, got {self.n}"
                raise ValueError(msg)
        elif self.n is not None:
            msg = f"{self.kind} groups take no parameter n (got {self.n})"
            raise ValueError(msg)
        return self

    @classmethod
    def cyclic(cls, n: int) -> Self:
        return cls(kind="cyclic", n=n)

    @classmethod
    def dihedral(cls, n: int) -> Self:
        return cls(kind="dihedral", n=n)

    @classmethod
    def parse(cls, label: str) -> Self:
        """Parse ``Z5``, ``D3``, ``A4``, ``S4``, ``A5`` or ``trivial`` (case-insensitive)."""
        text = label.strip().upper()
        named = {"A4": "tetra", "S4": "octa", "A5": "icosa", "TRIVIAL": "trivial", "1": "trivial"}
        if text in named:
            return cls(kind=named[text])  # type: ignore[arg-type]
        match = _LABEL_PATTERN.match(text)
        if match is None:
            msg = f"Unknown group label: {label!r} (expected Zn, Dn, A4, S4, A5 or trivial)"
            raise ValueError(msg)
        kind = "dihedral" if match["family"] == "D" else "cyclic"
        return cls(kind=kind, n=int(match["n"]))

    @property
    def order(self) -> int:
        if self.kind == "cyclic":
            return self.n  # type: ignore[return-value]
        if self.kind == "dihedral":
            return 2 * self.n  # type: ignore[operator]
        return _FIXED_ORDERS[self.kind]

    @property
    def label(self) -> str:
        if self.kind == "cyclic":
            return f"Z{self.n}"
        if self.kind == "dihedral":
            return f"D{self.n}"
        return _LABELS[self.kind]

    @property
    def is_platonic(self) -> bool:
        return self.kind in ("tetra", "octa", "icosa")

    def __str__(self) -> str:
        return self.label


class FiniteMobiusGroup(BaseModel):
    """A finite group of Möbius maps, identity first, with its isomorphism type."""

    model_config = ConfigDict(frozen=True)

    elements: tuple[MobiusMap, ...]
    type_tag: GroupTypeTag

    @model_validator(mode="after")
    def _check_order(self) -> Self:
        if len(self.elements) != self.type_tag.order:
            msg = (
                f"{self.type_tag.label} has order {self.type_tag.order} "
                f"but {len(self.elements)} elements were given"
            )
            raise SignatureError(msg)
        return self

    @property
    def order(self) -> int:
        return len(self.elements)

    def stack(self) -> np.ndarray:
        """Elements as an ``(order, 2, 2)`` array."""
        return np.asarray([g.matrix for g in self.elements], dtype=np.complex128)

    @model_serializer
    def _serialize(self) -> dict[str, Any]:
        return {
            "type": self.type_tag.kind,
            "n": self.type_tag.n,
            "elements": [g.model_dump() for g in self.elements],
        }


class FixedAxis(BaseModel):
    """The fixed pair shared by the powers of a rotation, with the largest order seen on it."""

    model_config = ConfigDict(frozen=True)

    element: MobiusMap
    points: tuple[SpherePoint, SpherePoint]
    order: int


def _distance_to_stack(stack: np.ndarray, entries: Matrix) -> np.ndarray:
    # Entrywise distance to every row, against both sign representatives
    target = np.asarray(entries, dtype=np.complex128)
    plus = np.max(np.abs(stack - target), axis=-1)
    minus = np.max(np.abs(stack + target), axis=-1)
    return np.minimum(plus, minus)


def _close(generators: Sequence[MobiusMap], cap: int, epsilon: float) -> list[MobiusMap]:
    found: list[MobiusMap] = [IDENTITY]
    rows: list[Matrix] = [IDENTITY.entries()]
    queue: deque[MobiusMap] = deque([IDENTITY])
    gens = list(generators)
    while queue:
        current = queue.popleft()
        for gen in gens:
            product = compose(current, gen)
            if np.min(_distance_to_stack(np.asarray(rows), product.entries())) <= epsilon:
                continue
            found.append(product)
            rows.append(product.entries())
            queue.append(product)
            if len(found) > cap:
                msg = f"Group not finite within cap {cap}"
                raise NotFiniteError(msg)
    return found


def identify_elements(elements: Sequence[MobiusMap], epsilon: float) -> GroupTypeTag:
    """Type of an already closed element list, from its size and largest element order."""
    size = len(elements)
    if size == 1:
        return GroupTypeTag(kind="trivial")
    orders = [rotation_order(g, size, epsilon) for g in elements]
    if any(order is None for order in orders):
        msg = (
            f"Group of size {size} has an element of infinite order: "
            "not a Möbius finite-subgroup signature"
        )
        raise SignatureError(msg)
    top = max(orders)  # type: ignore[type-var]
    if top == size:
        return GroupTypeTag.cyclic(size)
    if size % 2 == 0 and size // 2 >= 2 and top == size // 2:
        return GroupTypeTag.dihedral(size // 2)
    for kind, (order, max_order) in {"tetra": (12, 3), "octa": (24, 4), "icosa": (60, 5)}.items():
        if size == order and top == max_order:
            return GroupTypeTag(kind=kind)  # type: ignore[arg-type]
    msg = (
        f"Group of size {size} with largest element order {top} is "
        "not a Möbius finite-subgroup signature"
    )
    raise SignatureError(msg)


def closure(
    generators: Iterable[MobiusMap], cap: int | None = None, *, epsilon: float | None = None
) -> FiniteMobiusGroup:
    """Smallest composition-closed set containing the generators and the identity.

    Raises:
        NotFiniteError: If the set grows beyond ``cap`` elements
        SignatureError: If the closed set matches no finite-subgroup type
    """
    settings = get_app_settings()
    limit = settings.closure_cap if cap is None else cap
    eps = settings.epsilon if epsilon is None else epsilon
    if limit < 1:
        msg = f"cap must be at least 1, got {limit}"
        raise ValueError(msg)
    gens = list(generators)
    elements = _close(gens, limit, eps)
    logger.debug("Closure of %d generators has %d elements", len(gens), len(elements))
    return FiniteMobiusGroup(elements=tuple(elements), type_tag=identify_elements(elements, eps))


def identify_type(group: FiniteMobiusGroup, epsilon: float | None = None) -> GroupTypeTag:
    """Isomorphism type from the group order and the largest element order."""
    eps = get_app_settings().epsilon if epsilon is None else epsilon
    return identify_elements(group.elements, eps)


def _tetrahedral_generators() -> list[MobiusMap]:
    r2, r3, r6 = math.sqrt(2), math.sqrt(3), math.sqrt(6)
    t2 = MobiusMap(a=complex(r2, r6), b=complex(2, 2 * r3), c=-4, d=2 * r2)
    return [MobiusMap.rotation(2 * math.pi / 3), t2]


def _octahedral_generators() -> list[MobiusMap]:
    return [MobiusMap.rotation(math.pi / 2), MobiusMap(a=1, b=1, c=-1, d=1)]


def _icosahedral_generators() -> list[MobiusMap]:
    r5 = math.sqrt(5)
    omega = cmath.exp(2j * math.pi / 5)
    t6 = MobiusMap(
        a=r5 + 1,
        b=-2 * omega,
        c=(1 - omega + omega**2) * (3 + r5),
        d=-(omega**2) * (1 + r5),
    )
    return [MobiusMap.rotation(2 * math.pi / 5), t6]


def canonical_generators(tag: GroupTypeTag) -> list[MobiusMap]:
    """Standard generators: rotations about {0, inf} plus z -> 1/z and the platonic pairs."""
    match tag.kind:
        case "trivial":
            return []
        case "cyclic":
            return [MobiusMap.rotation(2 * math.pi / tag.n)]  # type: ignore[operator]
        case "dihedral":
            rotation = MobiusMap.rotation(2 * math.pi / tag.n)  # type: ignore[operator]
            return [rotation, MobiusMap(a=0, b=1, c=1, d=0)]
        case "tetra":
            return _tetrahedral_generators()
        case "octa":
            return _octahedral_generators()
        case "icosa":
            return _icosahedral_generators()


@lru_cache(maxsize=64)
def canonical_group(tag: GroupTypeTag) -> FiniteMobiusGroup:
    """The canonical realization of ``tag`` with the vertex configuration of its polyhedron."""
    group = closure(canonical_generators(tag), cap=max(tag.order, 1))
    if group.type_tag != tag:
        msg = f"Canonical generators of {tag.label} closed to {group.type_tag.label}"
        raise SignatureError(msg)
    return group


def conjugate(group: FiniteMobiusGroup, t: MobiusMap) -> FiniteMobiusGroup:
    """{t g t^-1 : g in G}; the type is conjugation invariant."""
    return FiniteMobiusGroup(
        elements=tuple(g.conjugate_by(t) for g in group.elements), type_tag=group.type_tag
    )


def contains(group: FiniteMobiusGroup, t: MobiusMap, epsilon: float | None = None) -> bool:
    eps = get_app_settings().epsilon if epsilon is None else epsilon
    stack = np.asarray([g.entries() for g in group.elements])
    return bool(np.min(_distance_to_stack(stack, t.entries())) <= eps)


def same_elements(
    first: FiniteMobiusGroup, second: FiniteMobiusGroup, epsilon: float | None = None
) -> bool:
    """Set equality of the two element lists within ``epsilon``."""
    if first.order != second.order:
        return False
    eps = get_app_settings().epsilon if epsilon is None else epsilon
    return same_stacks(first.stack(), second.stack(), eps)


def same_stacks(first: np.ndarray, second: np.ndarray, epsilon: float) -> bool:
    """Set equality of two ``(N, 2, 2)`` stacks of determinant-1 matrices up to sign."""
    if len(first) != len(second):
        return False
    a = first.reshape(len(first), 1, 4)
    b = second.reshape(1, len(second), 4)
    distance = np.minimum(np.max(np.abs(a - b), axis=-1), np.max(np.abs(a + b), axis=-1))
    rows_matched = np.all(distance.min(axis=1) <= epsilon)
    return bool(rows_matched and np.all(distance.min(axis=0) <= epsilon))


def element_orders(group: FiniteMobiusGroup, epsilon: float | None = None) -> list[int]:
    eps = get_app_settings().epsilon if epsilon is None else epsilon
    orders = [rotation_order(g, group.order, eps) for g in group.elements]
    if any(order is None for order in orders):
        msg = "Group element without finite order dividing the group order"
        raise SignatureError(msg)
    return orders  # type: ignore[return-value]


def order_histogram(group: FiniteMobiusGroup) -> dict[int, int]:
    """Number of elements of each order."""
    histogram: dict[int, int] = {}
    for order in element_orders(group):
        histogram[order] = histogram.get(order, 0) + 1
    return dict(sorted(histogram.items()))


def nontrivial_fixed_points(
    group: FiniteMobiusGroup, epsilon: float | None = None
) -> list[FixedAxis]:
    """One entry per rotation axis: its fixed pair and the largest order of a rotation about it."""
    eps = get_app_settings().epsilon if epsilon is None else epsilon
    axes: list[FixedAxis] = []
    for element, order in zip(group.elements, element_orders(group, eps), strict=True):
        if order == 1:
            continue
        points = fixed_points(element)
        if len(points) != 2:
            msg = f"Finite-order element {element!r} is not elliptic"
            raise SignatureError(msg)
        pair = as_pairs(points)
        for index, axis in enumerate(axes):
            if match_pairs(pair, as_pairs(axis.points), max(eps, 1e-9)) is not None:
                if order > axis.order:
                    axes[index] = FixedAxis(element=element, points=axis.points, order=order)
                break
        else:
            axes.append(FixedAxis(element=element, points=(points[0], points[1]), order=order))
    return axes


def axis_census(group: FiniteMobiusGroup) -> dict[int, int]:
    """Number of rotation axes of each maximal order."""
    census: dict[int, int] = {}
    for axis in nontrivial_fixed_points(group):
        census[axis.order] = census.get(axis.order, 0) + 1
    return dict(sorted(census.items()))


def generators(group: FiniteMobiusGroup) -> list[MobiusMap]:
    """A small generating set, picked greedily from elements of largest order."""
    eps = get_app_settings().epsilon
    ranked = sorted(
        zip(element_orders(group, eps), range(group.order), strict=True), key=lambda x: -x[0]
    )
    chosen: list[MobiusMap] = []
    span = 1
    for order, index in ranked:
        if span == group.order:
            break
        if order == 1:
            continue
        candidate = group.elements[index]
        reached = _close([*chosen, candidate], group.order, eps)
        if len(reached) > span:
            chosen.append(candidate)
            span = len(reached)
    return chosen
