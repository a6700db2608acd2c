"""Conformal (Möbius) and anti-conformal automorphisms of the Riemann sphere.

Both kinds are stored as 2x2 complex matrices normalized to determinant 1. Matrices are
projective: ``M`` and ``-M`` act identically, so the sign is fixed by requiring the first
nonzero entry (row-major) to have argument in (-pi/2, pi/2].
"""

import cmath
from collections.abc import Sequence
from typing import Any, Literal, Self, overload

import numpy as np
from pydantic import BaseModel, ConfigDict, model_serializer, model_validator

from isoforms.core.config import get_app_settings
from isoforms.core.errors import InvalidMapError
from isoforms.geometry.sphere import (
    ComplexArray,
    SpherePoint,
    as_pairs,
    complex_to_json,
    pairwise_chordal,
    parse_complex,
)

# Entries below this modulus do not take part in sign canonicalization
_NEGLIGIBLE = 1e-12

type Matrix = tuple[complex, complex, complex, complex]


def _canonical(a: complex, b: complex, c: complex, d: complex) -> Matrix:
    det = a * d - b * c
    scale = max(abs(a), abs(b), abs(c), abs(d))
    if scale == 0 or not cmath.isfinite(det) or abs(det) <= 1e-14 * scale * scale:
        msg = f"Singular matrix [[{a}, {b}], [{c}, {d}]]"
        raise InvalidMapError(msg)
    root = cmath.sqrt(det)
    a, b, c, d = a / root, b / root, c / root, d / root
    for entry in (a, b, c, d):
        if abs(entry) > _NEGLIGIBLE:
            if entry.real < 0 or (entry.real == 0 and entry.imag < 0):
                a, b, c, d = -a, -b, -c, -d
            break
    return a, b, c, d


class _ProjectiveMatrix(BaseModel):
    """Determinant-1 matrix with canonical sign, shared by both map kinds."""

    model_config = ConfigDict(frozen=True)

    a: complex
    b: complex
    c: complex
    d: complex

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, data: Any) -> Any:
        if isinstance(data, dict) and {"a", "b", "c", "d"} <= data.keys():
            try:
                entries = [parse_complex(data[key]) for key in "abcd"]
            except (TypeError, ValueError) as err:
                msg = f"Invalid matrix entries: {data}"
                raise InvalidMapError(msg) from err
            a, b, c, d = _canonical(*entries)
            return {"a": a, "b": b, "c": c, "d": d}
        return data

    @classmethod
    def from_matrix(cls, matrix: Any) -> Self:
        m = np.asarray(matrix, dtype=np.complex128)
        return cls(a=m[0, 0], b=m[0, 1], c=m[1, 0], d=m[1, 1])

    @property
    def matrix(self) -> ComplexArray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)

    def entries(self) -> Matrix:
        return self.a, self.b, self.c, self.d

    def is_close(self, other: "_ProjectiveMatrix", epsilon: float | None = None) -> bool:
        """Entrywise equality within ``epsilon``, against both sign representatives."""
        if type(self) is not type(other):
            return False
        eps = get_app_settings().epsilon if epsilon is None else epsilon
        mine, theirs = self.entries(), other.entries()
        plus = max(abs(x - y) for x, y in zip(mine, theirs, strict=True))
        minus = max(abs(x + y) for x, y in zip(mine, theirs, strict=True))
        return min(plus, minus) <= eps

    @model_serializer
    def _serialize(self) -> dict[str, list[float]]:
        entries = zip("abcd", self.entries(), strict=True)
        return {key: complex_to_json(value) for key, value in entries}


class MobiusMap(_ProjectiveMatrix):
    """The Möbius transformation z -> (az + b) / (cz + d)."""

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(a=1, b=0, c=0, d=1)

    @classmethod
    def rotation(cls, angle: float) -> "MobiusMap":
        """z -> e^{i angle} z."""
        return cls(a=cmath.exp(1j * angle), b=0, c=0, d=1)

    def __call__(self, point: SpherePoint) -> SpherePoint:
        return apply(self, point)

    def inverse(self) -> "MobiusMap":
        return MobiusMap(a=self.d, b=-self.b, c=-self.c, d=self.a)

    def power(self, k: int) -> "MobiusMap":
        if k < 0:
            return self.inverse().power(-k)
        m = _power(self.entries(), k)
        return MobiusMap(a=m[0], b=m[1], c=m[2], d=m[3])

    def is_identity(self, epsilon: float | None = None) -> bool:
        return self.is_close(IDENTITY, epsilon)

    def trace(self) -> complex:
        return self.a + self.d

    def derivative(self, z: complex) -> complex:
        """T'(z) = 1 / (cz + d)^2 for determinant-1 matrices."""
        return 1 / (self.c * z + self.d) ** 2

    def conjugate_by(self, t: "MobiusMap") -> "MobiusMap":
        """t o self o t^-1."""
        return compose(compose(t, self), t.inverse())

    def apply_pairs(self, pairs: ComplexArray) -> ComplexArray:
        return pairs @ self.matrix.T


class AntiMobiusMap(_ProjectiveMatrix):
    """The anti-conformal map z -> (a conj(z) + b) / (c conj(z) + d)."""

    @classmethod
    def conjugation(cls) -> "AntiMobiusMap":
        return cls(a=1, b=0, c=0, d=1)

    def __call__(self, point: SpherePoint) -> SpherePoint:
        return apply(self, point)

    def apply_pairs(self, pairs: ComplexArray) -> ComplexArray:
        return np.conj(pairs) @ self.matrix.T

    def _square(self) -> ComplexArray:
        return self.matrix @ np.conj(self.matrix)

    def is_involution(self, epsilon: float | None = None) -> bool:
        """sigma o sigma is the identity, i.e. M conj(M) = +I or -I."""
        eps = get_app_settings().epsilon if epsilon is None else epsilon
        square = self._square()
        return bool(
            min(np.max(np.abs(square - np.eye(2))), np.max(np.abs(square + np.eye(2)))) <= eps
        )

    def fixes_a_circle(self, epsilon: float | None = None) -> bool:
        """Involution with M conj(M) = +I; those with -I (z -> -1/conj(z)) fix no point."""
        eps = get_app_settings().epsilon if epsilon is None else epsilon
        return bool(np.max(np.abs(self._square() - np.eye(2))) <= eps)

    def _circle_coefficients(self) -> tuple[float, float, float, float]:
        # Fixed points satisfy c|z|^2 + (d - a)x + i(d + a)y - b = 0
        coefficients = np.array(
            [self.c, self.d - self.a, 1j * (self.d + self.a), -self.b], dtype=np.complex128
        )
        pivot = coefficients[np.argmax(np.abs(coefficients))]
        real = (coefficients / pivot).real
        return float(real[0]), float(real[1]), float(real[2]), float(real[3])

    def fixed_circle(self) -> tuple[SpherePoint, SpherePoint, SpherePoint]:
        """Three points of the circle fixed by a reflection."""
        if not self.fixes_a_circle(max(get_app_settings().epsilon, 1e-9)):
            msg = "Map has no circle of fixed points"
            raise InvalidMapError(msg)
        area, bx, cy, const = self._circle_coefficients()
        scale = max(abs(area), abs(bx), abs(cy), abs(const))
        if abs(area) <= 1e-12 * scale:
            # A line bx + cy + const = 0 through infinity
            norm2 = bx * bx + cy * cy
            foot = complex(-const * bx / norm2, -const * cy / norm2)
            direction = complex(-cy, bx) / np.sqrt(norm2)
            return (
                SpherePoint.from_complex(foot),
                SpherePoint.from_complex(foot + direction),
                SpherePoint.infinity(),
            )
        center = complex(-bx / (2 * area), -cy / (2 * area))
        radius2 = (bx * bx + cy * cy) / (4 * area * area) - const / area
        if radius2 <= 0:
            msg = "Anti-conformal involution without fixed points"
            raise InvalidMapError(msg)
        radius = float(np.sqrt(radius2))
        return tuple(  # type: ignore[return-value]
            SpherePoint.from_complex(center + radius * cmath.exp(2j * np.pi * k / 3))
            for k in range(3)
        )

    def is_reflection(self, epsilon: float | None = None) -> bool:
        """Involution whose fixed set is a circle (the antipodal map z -> -1/conj(z) is not)."""
        if not self.fixes_a_circle(epsilon):
            return False
        try:
            points = self.fixed_circle()
        except InvalidMapError:
            return False
        eps = get_app_settings().epsilon if epsilon is None else epsilon
        return all(apply(self, p).is_close(p, max(eps, 1e-9)) for p in points)


IDENTITY = MobiusMap.identity()

type AnyMap = MobiusMap | AntiMobiusMap


class MapClass(BaseModel):
    """Trace classification of a Möbius map with its finite order when detected."""

    model_config = ConfigDict(frozen=True)

    tag: Literal["identity", "elliptic", "parabolic", "loxodromic"]
    rotation_order: int | None = None


def _multiply(m: Matrix, n: Matrix) -> Matrix:
    a, b, c, d = m
    e, f, g, h = n
    return a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h


def _power(m: Matrix, k: int) -> Matrix:
    result: Matrix = (1, 0, 0, 1)
    base = m
    while k:
        if k & 1:
            result = _multiply(result, base)
        base = _multiply(base, base)
        k >>= 1
    return result


@overload
def compose(t: MobiusMap, s: MobiusMap) -> MobiusMap: ...


@overload
def compose(t: AntiMobiusMap, s: AntiMobiusMap) -> MobiusMap: ...


@overload
def compose(t: MobiusMap, s: AntiMobiusMap) -> AntiMobiusMap: ...


@overload
def compose(t: AntiMobiusMap, s: MobiusMap) -> AntiMobiusMap: ...


def compose(t: AnyMap, s: AnyMap) -> AnyMap:
    """t o s, i.e. z -> t(s(z))."""
    right = s.entries()
    if isinstance(t, AntiMobiusMap):
        right = tuple(x.conjugate() for x in right)  # type: ignore[assignment]
    a, b, c, d = _multiply(t.entries(), right)
    if isinstance(t, AntiMobiusMap) == isinstance(s, AntiMobiusMap):
        return MobiusMap(a=a, b=b, c=c, d=d)
    return AntiMobiusMap(a=a, b=b, c=c, d=d)


def apply(t: AnyMap, point: SpherePoint) -> SpherePoint:
    """Projective action on a point; infinity goes to a/c (or stays at infinity when c = 0)."""
    z, w = point.pair()
    if isinstance(t, AntiMobiusMap):
        z, w = z.conjugate(), w.conjugate()
    return SpherePoint.from_pair(t.a * z + t.b * w, t.c * z + t.d * w, snap=True)


def classify(
    t: MobiusMap,
    max_order: int | None = None,
    *,
    tolerance: float | None = None,
    epsilon: float | None = None,
) -> MapClass:
    """Trace classification; the order is found by iterated composition up to ``max_order``."""
    settings = get_app_settings()
    cap = settings.max_order if max_order is None else max_order
    tol = settings.parabolic_tolerance if tolerance is None else tolerance
    eps = settings.epsilon if epsilon is None else epsilon
    if cap < 2:
        msg = f"max_order must be at least 2, got {cap}"
        raise ValueError(msg)

    if t.is_identity(eps):
        return MapClass(tag="identity", rotation_order=1)
    trace2 = t.trace() ** 2
    if abs(trace2 - 4) <= tol:
        return MapClass(tag="parabolic")
    if abs(trace2.imag) <= tol and -tol <= trace2.real < 4:
        return MapClass(tag="elliptic", rotation_order=rotation_order(t, cap, eps))
    return MapClass(tag="loxodromic")


def rotation_order(t: MobiusMap, max_order: int, epsilon: float) -> int | None:
    """Smallest k <= max_order with t^k = identity."""
    m = t.entries()
    current = m
    for k in range(1, max_order + 1):
        a, b, c, d = current
        if min(
            max(abs(a - 1), abs(b), abs(c), abs(d - 1)),
            max(abs(a + 1), abs(b), abs(c), abs(d + 1)),
        ) <= epsilon:
            return k
        current = _multiply(current, m)
    return None


def fixed_points(t: MobiusMap, *, tolerance: float | None = None) -> tuple[SpherePoint, ...]:
    """Roots of c z^2 + (d - a) z w - b w^2 = 0: two points, or one for parabolic maps."""
    settings = get_app_settings()
    tol = settings.parabolic_tolerance if tolerance is None else tolerance
    if t.is_identity():
        msg = "every point fixed: the identity has no isolated fixed points"
        raise InvalidMapError(msg)
    qa, qb, qc = t.c, t.d - t.a, -t.b
    discriminant = qb * qb - 4 * qa * qc
    root = cmath.sqrt(discriminant)
    # Stable quadratic formula: pick the sign avoiding cancellation
    q = -(qb + root) / 2 if abs(qb + root) >= abs(qb - root) else -(qb - root) / 2
    candidates = [(q, qa), (qc, q)]
    candidates = [(z, w) for z, w in candidates if max(abs(z), abs(w)) > 1e-15]
    if abs(discriminant) <= tol or len(candidates) == 1:
        z, w = max(candidates, key=lambda pair: abs(pair[0]) ** 2 + abs(pair[1]) ** 2)
        return (SpherePoint.from_pair(z, w, snap=True),)
    return tuple(SpherePoint.from_pair(z, w, snap=True) for z, w in candidates)


def cross_ratio_matrices(pairs: ComplexArray) -> ComplexArray:
    """Matrices sending the three points of ``pairs[..., k, :]`` to 0, 1 and infinity."""
    z1, w1 = pairs[..., 0, 0], pairs[..., 0, 1]
    z2, w2 = pairs[..., 1, 0], pairs[..., 1, 1]
    z3, w3 = pairs[..., 2, 0], pairs[..., 2, 1]
    u = z2 * w3 - z3 * w2
    v = z2 * w1 - z1 * w2
    result = np.empty((*pairs.shape[:-2], 2, 2), dtype=np.complex128)
    result[..., 0, 0] = u * w1
    result[..., 0, 1] = -u * z1
    result[..., 1, 0] = v * w3
    result[..., 1, 1] = -v * z3
    return result


def adjugate(matrices: ComplexArray) -> ComplexArray:
    """Projective inverse of a stack of 2x2 matrices."""
    result = np.empty_like(matrices)
    result[..., 0, 0] = matrices[..., 1, 1]
    result[..., 0, 1] = -matrices[..., 0, 1]
    result[..., 1, 0] = -matrices[..., 1, 0]
    result[..., 1, 1] = matrices[..., 0, 0]
    return result


def normalize_matrices(matrices: ComplexArray) -> ComplexArray:
    """Scale a stack of 2x2 matrices to determinant 1 (sign left arbitrary)."""
    det = matrices[..., 0, 0] * matrices[..., 1, 1] - matrices[..., 0, 1] * matrices[..., 1, 0]
    return matrices / np.sqrt(det)[..., None, None]


def _check_distinct(points: Sequence[SpherePoint], role: str) -> ComplexArray:
    if len(points) != 3:
        msg = f"Expected three {role} points, got {len(points)}"
        raise InvalidMapError(msg)
    pairs = as_pairs(points)
    distances = pairwise_chordal(pairs, pairs)
    np.fill_diagonal(distances, np.inf)
    if np.min(distances) <= get_app_settings().epsilon:
        msg = f"Repeated point among the {role} points {list(points)!r}"
        raise InvalidMapError(msg)
    return pairs


def from_three_pairs(src: Sequence[SpherePoint], dst: Sequence[SpherePoint]) -> MobiusMap:
    """The unique Möbius map sending src[k] to dst[k] for k = 0, 1, 2."""
    source = _check_distinct(src, "source")
    target = _check_distinct(dst, "target")
    matrix = adjugate(cross_ratio_matrices(target)) @ cross_ratio_matrices(source)
    return MobiusMap.from_matrix(matrix)


def anti_from_three_pairs(
    src: Sequence[SpherePoint], dst: Sequence[SpherePoint]
) -> AntiMobiusMap:
    """The unique anti-conformal map sending src[k] to dst[k]."""
    conformal = from_three_pairs([p.conjugate() for p in src], dst)
    return AntiMobiusMap(a=conformal.a, b=conformal.b, c=conformal.c, d=conformal.d)


def reflection_from_three_points(
    p1: SpherePoint, p2: SpherePoint, p3: SpherePoint
) -> AntiMobiusMap:
    """Reflection across the circle through three distinct points."""
    return anti_from_three_pairs([p1, p2, p3], [p1, p2, p3])
