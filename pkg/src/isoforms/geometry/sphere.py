"""Points of the Riemann sphere and tolerant multisets of them.

A point is stored as a projective pair ``[z : w]`` scaled so that the component of larger
modulus is exactly 1. Infinity is ``[1 : 0]``. Finite points created with
:meth:`SpherePoint.from_complex` also remember their affine coordinate so that JSON output
reproduces the input bit for bit.
"""

import cmath
import math
from collections.abc import Iterable, Iterator, Sequence
from typing import Annotated, Any

import numpy as np
from numpy.typing import NDArray
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    PlainSerializer,
    PrivateAttr,
    model_serializer,
    model_validator,
)
from scipy.optimize import linear_sum_assignment

from isoforms.core.config import get_app_settings
from isoforms.core.errors import InvalidPointError

type ComplexArray = NDArray[np.complex128]
type FloatArray = NDArray[np.float64]

# Slack allowed on the "max modulus component is 1" rule when re-normalizing
_UNIT_SLACK = 1e-12
# Below this modulus the minor component of a snapped pair is treated as exactly zero
_SNAP = 1e-13


def normalize_pair(z: complex, w: complex) -> tuple[complex, complex]:
    """Scale ``(z, w)`` so that the component of larger modulus is exactly 1."""
    if not (cmath.isfinite(z) and cmath.isfinite(w)):
        msg = f"Non-finite projective coordinates: [{z} : {w}]"
        raise InvalidPointError(msg)
    if z == 0 and w == 0:
        msg = "Projective pair [0 : 0] is not a point"
        raise InvalidPointError(msg)
    # Already normalized pairs are left untouched
    if (w == 1 and abs(z) <= 1 + _UNIT_SLACK) or (z == 1 and abs(w) <= 1 + _UNIT_SLACK):
        return complex(z), complex(w)
    if abs(z) <= abs(w):
        return complex(z / w), 1 + 0j
    return 1 + 0j, complex(w / z)


class SpherePoint(BaseModel):
    """A point of the Riemann sphere in normalized projective coordinates."""

    model_config = ConfigDict(frozen=True)

    numerator: complex
    denominator: complex

    _affine: complex | None = PrivateAttr(default=None)

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, data: Any) -> Any:
        if isinstance(data, dict) and {"numerator", "denominator"} <= data.keys():
            try:
                z = complex(data["numerator"])
                w = complex(data["denominator"])
            except (TypeError, ValueError) as err:
                msg = f"Invalid projective coordinates: {data}"
                raise InvalidPointError(msg) from err
            z, w = normalize_pair(z, w)
            return {"numerator": z, "denominator": w}
        return data

    @classmethod
    def from_complex(cls, value: complex) -> "SpherePoint":
        """Finite point with affine coordinate ``value``."""
        value = complex(value)
        if not cmath.isfinite(value):
            msg = f"Affine coordinate must be finite, got {value}"
            raise InvalidPointError(msg)
        point = cls(numerator=value, denominator=1)
        point._affine = value
        return point

    @classmethod
    def infinity(cls) -> "SpherePoint":
        return cls(numerator=1, denominator=0)

    @classmethod
    def from_pair(cls, z: complex, w: complex, *, snap: bool = False) -> "SpherePoint":
        """Point ``[z : w]``; with ``snap`` a negligible minor component becomes exactly zero.

        Snapping is used for images of maps, where ``T(p) = inf`` arrives as ``[1 : 1e-17]``.
        """
        z, w = normalize_pair(complex(z), complex(w))
        if snap:
            if z == 1 and abs(w) < _SNAP:
                w = 0j
            elif w == 1 and abs(z) < _SNAP:
                z = 0j
        return cls.model_construct(numerator=z, denominator=w)

    @property
    def is_infinite(self) -> bool:
        return self.denominator == 0

    def to_complex(self) -> complex:
        """Affine coordinate of a finite point."""
        if self._affine is not None:
            return self._affine
        if self.is_infinite:
            msg = "The point at infinity has no affine coordinate"
            raise InvalidPointError(msg)
        return self.numerator / self.denominator

    def conjugate(self) -> "SpherePoint":
        if self._affine is not None:
            return SpherePoint.from_complex(self._affine.conjugate())
        return SpherePoint.from_pair(self.numerator.conjugate(), self.denominator.conjugate())

    def pair(self) -> tuple[complex, complex]:
        return self.numerator, self.denominator

    def is_close(self, other: "SpherePoint", epsilon: float | None = None) -> bool:
        eps = get_app_settings().epsilon if epsilon is None else epsilon
        return chordal_distance(self, other) <= eps

    @model_serializer
    def _serialize(self) -> str | list[float]:
        return point_to_json(self)

    def __repr__(self) -> str:
        if self.is_infinite:
            return "SpherePoint(inf)"
        return f"SpherePoint({self.to_complex()!r})"


INFINITY = SpherePoint.infinity()


def point_to_json(point: SpherePoint) -> str | list[float]:
    """JSON form of a point: ``"inf"`` or ``[re, im]``."""
    if point.is_infinite:
        return "inf"
    value = point.to_complex()
    return [value.real, value.imag]


def parse_point(value: Any) -> SpherePoint:
    """Parse the JSON form of a point (also accepts plain numbers and complex values)."""
    if isinstance(value, SpherePoint):
        return value
    if isinstance(value, str):
        if value.strip().lower() in {"inf", "infinity", "∞"}:
            return INFINITY
        try:
            return SpherePoint.from_complex(complex(value.replace(" ", "")))
        except ValueError as err:
            msg = f"Invalid point: {value!r}"
            raise ValueError(msg) from err
    if isinstance(value, list | tuple) and len(value) == 2:
        return SpherePoint.from_complex(complex(float(value[0]), float(value[1])))
    if isinstance(value, int | float | complex) and not isinstance(value, bool):
        return SpherePoint.from_complex(complex(value))
    msg = f"Invalid point: {value!r} (expected [re, im] or 'inf')"
    raise ValueError(msg)


# Field type for documents: accepts the JSON point encoding
type Point = Annotated[SpherePoint, BeforeValidator(parse_point)]


def chordal_distance(a: SpherePoint, b: SpherePoint) -> float:
    """Chordal distance on the unit sphere, in [0, 2]."""
    z1, w1 = a.pair()
    z2, w2 = b.pair()
    num = 2.0 * abs(z1 * w2 - z2 * w1)
    den = math.hypot(abs(z1), abs(w1)) * math.hypot(abs(z2), abs(w2))
    return min(2.0, num / den)


def as_pairs(points: Iterable[SpherePoint]) -> ComplexArray:
    """Stack points into an ``(n, 2)`` complex array of projective pairs."""
    rows = [point.pair() for point in points]
    if not rows:
        return np.empty((0, 2), dtype=np.complex128)
    return np.asarray(rows, dtype=np.complex128)


def pairwise_chordal(p: ComplexArray, q: ComplexArray) -> FloatArray:
    """Chordal distance matrix between two ``(n, 2)`` and ``(m, 2)`` pair arrays."""
    num = 2.0 * np.abs(p[:, None, 0] * q[None, :, 1] - q[None, :, 0] * p[:, None, 1])
    den = np.linalg.norm(p, axis=-1)[:, None] * np.linalg.norm(q, axis=-1)[None, :]
    return np.minimum(2.0, num / den)


def to_unit_vector(point: SpherePoint) -> FloatArray:
    """Inverse stereographic projection onto the unit sphere (north pole is infinity)."""
    return pairs_to_unit_vectors(as_pairs([point]))[0]


def pairs_to_unit_vectors(pairs: ComplexArray) -> FloatArray:
    z, w = pairs[:, 0], pairs[:, 1]
    zw = z * np.conj(w)
    az, aw = np.abs(z) ** 2, np.abs(w) ** 2
    total = az + aw
    return np.stack([2 * zw.real / total, 2 * zw.imag / total, (az - aw) / total], axis=-1)


def from_unit_vector(vector: Sequence[float] | FloatArray) -> SpherePoint:
    """Stereographic projection of a nonzero vector of R^3 (scaled onto the sphere)."""
    v = np.asarray(vector, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm == 0:
        msg = "Cannot project the zero vector onto the sphere"
        raise InvalidPointError(msg)
    x, y, h = v / norm
    # Use the chart that keeps the pair away from 0/0
    if h <= 0:
        return SpherePoint.from_pair(complex(x, y), 1 - h)
    return SpherePoint.from_pair(1 + h, complex(x, -y))


def random_point(rng: np.random.Generator) -> SpherePoint:
    """Uniformly distributed point of the sphere."""
    while True:
        v = rng.normal(size=3)
        if np.linalg.norm(v) > 1e-6:
            return from_unit_vector(v)


def match_pairs(a: ComplexArray, b: ComplexArray, epsilon: float) -> tuple[int, ...] | None:
    """Match two pair arrays within ``epsilon``; index ``i`` of ``a`` goes to result[i] of ``b``.

    Greedy nearest matching first, optimal assignment when greedy gets stuck.
    """
    if len(a) != len(b):
        return None
    n = len(a)
    if n == 0:
        return ()
    distances = pairwise_chordal(a, b)

    greedy: list[int] = []
    used = np.zeros(n, dtype=bool)
    for i in range(n):
        row = np.where(used, np.inf, distances[i])
        j = int(np.argmin(row))
        if row[j] > epsilon:
            break
        greedy.append(j)
        used[j] = True
    else:
        return tuple(greedy)

    if not np.all(distances.min(axis=1) <= epsilon):
        return None
    rows, cols = linear_sum_assignment(distances)
    if np.all(distances[rows, cols] <= epsilon):
        return tuple(int(c) for c in cols[np.argsort(rows)])
    return None


class PointMultiset(BaseModel):
    """An unordered collection of distinct sphere points (multiplicity one each)."""

    model_config = ConfigDict(frozen=True)

    points: tuple[Point, ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _wrap_sequence(cls, data: Any) -> Any:
        if isinstance(data, list | tuple):
            return {"points": tuple(data)}
        return data

    @model_validator(mode="after")
    def _check_separated(self) -> "PointMultiset":
        if len(self.points) > 1:
            eps = get_app_settings().epsilon
            distances = pairwise_chordal(self.as_pairs(), self.as_pairs())
            np.fill_diagonal(distances, np.inf)
            if np.any(distances <= eps):
                i, j = np.argwhere(distances <= eps)[0]
                msg = (
                    f"Repeated point {self.points[i]!r} ~ {self.points[j]!r}: "
                    "multiplicities greater than one are not supported"
                )
                raise InvalidPointError(msg)
        return self

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[SpherePoint]:  # type: ignore[override]
        return iter(self.points)

    def __getitem__(self, index: int) -> SpherePoint:
        return self.points[index]

    def as_pairs(self) -> ComplexArray:
        return as_pairs(self.points)

    @property
    def has_infinity(self) -> bool:
        return any(point.is_infinite for point in self.points)

    def finite_values(self) -> ComplexArray:
        """Affine coordinates of the finite points, in stored order."""
        return np.asarray(
            [p.to_complex() for p in self.points if not p.is_infinite], dtype=np.complex128
        )

    def index_of(self, point: SpherePoint, epsilon: float | None = None) -> int | None:
        if not self.points:
            return None
        eps = get_app_settings().epsilon if epsilon is None else epsilon
        distances = pairwise_chordal(as_pairs([point]), self.as_pairs())[0]
        i = int(np.argmin(distances))
        return i if distances[i] <= eps else None

    def contains(self, point: SpherePoint, epsilon: float | None = None) -> bool:
        return self.index_of(point, epsilon) is not None

    def union(self, other: Iterable[SpherePoint]) -> "PointMultiset":
        return PointMultiset(points=(*self.points, *other))

    @model_serializer
    def _serialize(self) -> list[str | list[float]]:
        return [point_to_json(point) for point in self.points]


def multiset_match(
    a: PointMultiset | Sequence[SpherePoint],
    b: PointMultiset | Sequence[SpherePoint],
    epsilon: float | None = None,
) -> tuple[int, ...] | None:
    """Bijection between two point collections with every pair within ``epsilon``.

    Returns the permutation ``perm`` with ``a[i] ~ b[perm[i]]``, or ``None`` when no perfect
    matching exists.
    """
    eps = get_app_settings().epsilon if epsilon is None else epsilon
    return match_pairs(as_pairs(a), as_pairs(b), eps)


def parse_complex(value: Any) -> complex:
    """Parse the JSON form of a complex number: ``[re, im]`` or a plain number."""
    if isinstance(value, list | tuple):
        if len(value) != 2:
            msg = f"Invalid complex number: {value!r} (expected [re, im])"
            raise ValueError(msg)
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    if isinstance(value, bool):
        msg = f"Invalid complex number: {value!r}"
        raise ValueError(msg)
    return complex(value)


def complex_to_json(value: complex) -> list[float]:
    return [value.real, value.imag]


# Field type for documents: accepts ``[re, im]`` and serializes back to it
type ComplexJson = Annotated[
    complex, BeforeValidator(parse_complex), PlainSerializer(complex_to_json)
]
