"""Polynomial helpers on ascending coefficient arrays (index i holds the coefficient of z^i)."""

from collections.abc import Sequence

import numpy as np
from numpy.polynomial import polynomial as poly

from isoforms.geometry.sphere import ComplexArray

type Coefficients = Sequence[complex] | ComplexArray


def trim(coefficients: Coefficients) -> ComplexArray:
    """Drop exactly-zero leading (highest-degree) coefficients."""
    c = np.asarray(coefficients, dtype=np.complex128)
    nonzero = np.flatnonzero(c)
    if len(nonzero) == 0:
        return c[:0]
    return c[: nonzero[-1] + 1]


def polish(coefficients: ComplexArray, roots: ComplexArray) -> ComplexArray:
    """One Newton step per root, kept only where it lowers the residual."""
    values = poly.polyval(roots, coefficients)
    slopes = poly.polyval(roots, poly.polyder(coefficients))
    usable = slopes != 0
    step = np.where(usable, values / np.where(usable, slopes, 1), 0)
    candidates = roots - step
    better = np.abs(poly.polyval(candidates, coefficients)) < np.abs(values)
    return np.where(better, candidates, roots)


def roots(coefficients: Coefficients) -> ComplexArray:
    """All complex roots, as eigenvalues of the companion matrix followed by a Newton polish."""
    c = trim(coefficients)
    degree = len(c) - 1
    if degree < 1:
        return np.empty(0, dtype=np.complex128)
    companion = np.diag(np.ones(degree - 1, dtype=np.complex128), -1)
    companion[0] = -(c[:-1][::-1] / c[-1])
    return polish(c, np.linalg.eigvals(companion))


def from_roots(values: Coefficients) -> ComplexArray:
    """Monic polynomial with the given roots."""
    values = np.asarray(values, dtype=np.complex128)
    if len(values) == 0:
        return np.ones(1, dtype=np.complex128)
    return np.asarray(poly.polyfromroots(values), dtype=np.complex128)


def ratio_product(
    z: complex | ComplexArray, zeros: ComplexArray, poles: ComplexArray
) -> complex | ComplexArray:
    """prod(z - zeros) / prod(z - poles), multiplied one ratio at a time to avoid overflow."""
    z = np.asarray(z, dtype=np.complex128)
    num = z[..., None] - zeros
    den = z[..., None] - poles
    width = max(len(zeros), len(poles))
    num = np.concatenate([num, np.ones((*z.shape, width - len(zeros)))], axis=-1)
    den = np.concatenate([den, np.ones((*z.shape, width - len(poles)))], axis=-1)
    result = np.prod(num / den, axis=-1)
    return complex(result) if result.ndim == 0 else result


def closest_pair(values: ComplexArray) -> tuple[int, int, float] | None:
    """Indices and relative distance of the two closest values, scaled by max(1, |z|)."""
    if len(values) < 2:
        return None
    scale = np.maximum(1.0, np.abs(values))
    gaps = np.abs(values[:, None] - values[None, :]) / scale[:, None]
    np.fill_diagonal(gaps, np.inf)
    i, j = np.unravel_index(int(np.argmin(gaps)), gaps.shape)
    return int(i), int(j), float(gaps[i, j])
