"""Tests for isoforms.io.validators module."""

import pytest

from isoforms.core.errors import InvalidFormError
from isoforms.io.documents import FormDocument, GroupDocument
from isoforms.io.validators import NoOpValidator, PydanticValidator


class TestNoOpValidator:
    """Tests for NoOpValidator class."""

    def test_returns_data_unchanged(self, sample_form_document):
        """Test that data passes through as is."""
        assert NoOpValidator().validate(sample_form_document) is sample_form_document


class TestPydanticValidator:
    """Tests for PydanticValidator class."""

    def test_valid_document(self, sample_form_document):
        """Test that a valid document becomes a model."""
        document = PydanticValidator(FormDocument).validate(sample_form_document)
        assert isinstance(document, FormDocument)
        assert document.to_form().k == 4

    def test_group_document(self):
        """Test validation of a group document."""
        document = PydanticValidator(GroupDocument).validate({"type": "dihedral", "n": 3})
        assert document.tag().label == "D3"

    def test_schema_violation(self):
        """Test that unknown keys raise ValueError."""
        with pytest.raises(ValueError) as exc_info:
            PydanticValidator(FormDocument).validate({"poles": [[0, 0], "inf"], "color": "red"})
        assert "Pydantic validation failed" in str(exc_info.value)

    def test_domain_error_is_not_a_schema_violation(self):
        """Test that an invalid divisor surfaces as a domain error."""
        document = PydanticValidator(FormDocument).validate(
            {"lambda": [1, 0], "zeros": [], "poles": [[0, 0], [1, 0], [2, 0]]}
        )
        with pytest.raises(InvalidFormError):
            document.to_form()
