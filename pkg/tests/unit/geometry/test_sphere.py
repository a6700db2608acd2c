"""Tests for isoforms.geometry.sphere module."""

import math

import numpy as np
import pytest

from isoforms.core.errors import InvalidPointError
from isoforms.geometry.sphere import (
    INFINITY,
    PointMultiset,
    SpherePoint,
    chordal_distance,
    from_unit_vector,
    multiset_match,
    parse_complex,
    parse_point,
    point_to_json,
    random_point,
    to_unit_vector,
)


def pt(value: complex) -> SpherePoint:
    return SpherePoint.from_complex(value)


class TestSpherePoint:
    """Tests for SpherePoint normalization and accessors."""

    def test_larger_component_is_one(self):
        """Test that the component of larger modulus is scaled to 1."""
        assert pt(2).pair() == (1, 0.5)
        assert pt(0.5).pair() == (0.5, 1)

    def test_infinity(self):
        """Test the point at infinity."""
        assert INFINITY.is_infinite
        assert INFINITY.pair() == (1, 0)
        assert not pt(1e6).is_infinite

    def test_affine_coordinate_preserved(self):
        """Test that finite points return the coordinate they were built from."""
        value = 0.1 + 0.7j
        assert pt(value).to_complex() == value

    def test_infinity_has_no_affine_coordinate(self):
        """Test that asking infinity for its coordinate raises error."""
        with pytest.raises(InvalidPointError):
            INFINITY.to_complex()

    def test_zero_pair_rejected(self):
        """Test that [0 : 0] is not a point."""
        with pytest.raises(InvalidPointError):
            SpherePoint(numerator=0, denominator=0)

    def test_non_finite_coordinate_rejected(self):
        """Test that non-finite affine coordinates raise error."""
        with pytest.raises(InvalidPointError):
            SpherePoint.from_complex(complex(math.inf, 0))

    def test_from_pair_snaps_tiny_component(self):
        """Test that map images next to infinity snap onto it."""
        assert SpherePoint.from_pair(1, 1e-17, snap=True).is_infinite
        assert not SpherePoint.from_pair(1, 1e-17).is_infinite

    def test_conjugate(self):
        """Test complex conjugation of points."""
        assert pt(1 + 2j).conjugate().to_complex() == 1 - 2j
        assert INFINITY.conjugate().is_infinite

    def test_serialization(self):
        """Test the JSON encoding of points."""
        assert point_to_json(pt(1.5 - 2j)) == [1.5, -2.0]
        assert INFINITY.model_dump() == "inf"


class TestParsing:
    """Tests for the document encodings of points and complex numbers."""

    @pytest.mark.parametrize("text", ["inf", "Infinity", " INF "])
    def test_parse_infinity(self, text):
        """Test the spellings accepted for infinity."""
        assert parse_point(text).is_infinite

    def test_parse_pair(self):
        """Test parsing [re, im] lists."""
        assert parse_point([1, 2]).to_complex() == 1 + 2j

    def test_parse_number(self):
        """Test parsing plain numbers."""
        assert parse_point(3).to_complex() == 3
        assert parse_point("1+2j").to_complex() == 1 + 2j

    @pytest.mark.parametrize("value", ["bogus", {"re": 1}, [1, 2, 3], True])
    def test_parse_invalid_point(self, value):
        """Test that unknown encodings raise ValueError."""
        with pytest.raises(ValueError):
            parse_point(value)

    def test_parse_complex(self):
        """Test parsing complex numbers."""
        assert parse_complex([1, -2]) == 1 - 2j
        assert parse_complex(0.5) == 0.5

    @pytest.mark.parametrize("value", [[1], True])
    def test_parse_invalid_complex(self, value):
        """Test that malformed complex numbers raise ValueError."""
        with pytest.raises(ValueError):
            parse_complex(value)


class TestChordalGeometry:
    """Tests for chordal distance and stereographic projection."""

    def test_chordal_distance(self):
        """Test known chordal distances."""
        assert chordal_distance(pt(0), INFINITY) == pytest.approx(2.0)
        assert chordal_distance(pt(0), pt(1)) == pytest.approx(math.sqrt(2))
        assert chordal_distance(pt(1j), pt(1j)) == 0

    def test_chordal_distance_symmetric(self):
        """Test that chordal distance does not depend on the argument order."""
        a, b = pt(0.3 - 2j), pt(5 + 1j)
        assert chordal_distance(a, b) == pytest.approx(chordal_distance(b, a))

    def test_unit_vectors(self):
        """Test the poles of the inverse stereographic projection."""
        np.testing.assert_allclose(to_unit_vector(pt(0)), [0, 0, -1], atol=1e-15)
        np.testing.assert_allclose(to_unit_vector(INFINITY), [0, 0, 1], atol=1e-15)
        np.testing.assert_allclose(to_unit_vector(pt(1)), [1, 0, 0], atol=1e-15)

    def test_from_unit_vector(self):
        """Test projection of vectors back to the sphere."""
        assert from_unit_vector((1, 0, 0)).is_close(pt(1))
        assert from_unit_vector((0, 0, 3)).is_infinite
        assert from_unit_vector((0, 2, 0)).is_close(pt(1j))

    def test_projection_inverts(self, rng):
        """Test that projecting a point and back returns it."""
        for _ in range(20):
            point = random_point(rng)
            assert from_unit_vector(to_unit_vector(point)).is_close(point, 1e-12)

    def test_zero_vector_rejected(self):
        """Test that the zero vector has no projection."""
        with pytest.raises(InvalidPointError):
            from_unit_vector((0, 0, 0))


class TestPointMultiset:
    """Tests for PointMultiset and multiset matching."""

    def test_repeated_point_rejected(self):
        """Test that multiplicities greater than one raise error."""
        with pytest.raises(InvalidPointError) as exc_info:
            PointMultiset([pt(1), pt(1 + 1e-12)])
        assert "Repeated point" in str(exc_info.value)

    def test_sequence_accessors(self):
        """Test length, indexing and iteration."""
        points = PointMultiset([pt(0), INFINITY, pt(2j)])
        assert len(points) == 3
        assert points[1].is_infinite
        assert points.has_infinity
        np.testing.assert_array_equal(points.finite_values(), [0, 2j])

    def test_index_of(self):
        """Test tolerant membership."""
        points = PointMultiset([pt(0), INFINITY, pt(2j)])
        assert points.index_of(pt(2j + 1e-12)) == 2
        assert points.contains(INFINITY)
        assert points.index_of(pt(5)) is None
        assert PointMultiset().index_of(pt(0)) is None

    def test_serialization(self):
        """Test the JSON encoding of multisets."""
        assert PointMultiset([pt(0), INFINITY]).model_dump() == [[0.0, 0.0], "inf"]

    def test_document_encoding_accepted(self):
        """Test that multisets validate the JSON point encoding."""
        points = PointMultiset.model_validate([[1, 0], "inf"])
        assert points[0].to_complex() == 1
        assert points[1].is_infinite

    def test_match_permutation(self):
        """Test that matching returns the permutation between the two orders."""
        assert multiset_match([pt(0), pt(1), INFINITY], [INFINITY, pt(0), pt(1)]) == (1, 2, 0)

    def test_match_failures(self):
        """Test that different sizes and distant points do not match."""
        assert multiset_match([pt(0)], [pt(0), pt(1)]) is None
        assert multiset_match([pt(0), pt(1)], [pt(0), pt(1.001)]) is None
        assert multiset_match([], []) == ()

    def test_match_within_epsilon(self):
        """Test that an explicit tolerance widens the match."""
        assert multiset_match([pt(0), pt(1)], [pt(1.001), pt(0)], epsilon=1e-2) == (1, 0)
