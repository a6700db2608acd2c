"""Integration tests for the catalog checks behind verify-paper."""

import pytest

from isoforms.catalog import Catalog, CatalogEntry, get
from isoforms.harness import PaperCheck, check_entry, format_table, run_paper_checks
from isoforms.io.documents import FormDocument


@pytest.fixture
def small_catalog() -> Catalog:
    """Two bundled forms whose facts hold."""
    return Catalog(entries=[get("ejemplo1"), get("ciclico3")])


class TestRunPaperChecks:
    """Tests for run_paper_checks and check_entry functions."""

    def test_bundled_facts_hold(self, small_catalog: Catalog):
        """Test that group, divisor, isochrony and mirror facts match."""
        results = run_paper_checks(small_catalog)

        assert [r.name for r in results] == ["ejemplo1", "ciclico3"]
        assert all(r.passed for r in results), [r.failures for r in results]
        assert results[0].found_group == "D2"
        assert results[1].isochronous is True

    def test_wrong_expectation_is_reported(self):
        """Test that a mismatching fact becomes a failure."""
        entry = get("ejemplo1")
        wrong = entry.model_copy(
            update={"expected": entry.expected.model_copy(update={"group": "Z4"})}
        )
        result = check_entry(wrong)

        assert not result.passed
        assert result.failures == ["group: expected Z4, found D2"]

    def test_domain_error_is_a_failure(self):
        """Test that a form that cannot be built fails its row instead of raising."""
        entry = CatalogEntry(
            name="double_pole",
            form=FormDocument(numer=[1], denom=[1, -2, 1]),
            expected=get("ejemplo1").expected,
        )
        result = check_entry(entry)

        assert result.found_group is None
        assert result.failures[0].startswith("error: ")

    def test_residue_values(self):
        """Test the residue values of the Z4 counterexample."""
        result = check_entry(get("contraejemplo"))

        assert result.passed, result.failures
        assert result.mirror is False


class TestFormatTable:
    """Tests for format_table function."""

    def test_table(self):
        """Test the header, one row per form and the summary line."""
        rows = [
            PaperCheck(name="ejemplo1", expected_group="D2", found_group="D2", poles=4, zeros=2),
            PaperCheck(name="broken", expected_group="Z3", failures=["error: bad form"]),
        ]
        text = format_table(rows)
        lines = text.splitlines()

        assert lines[0].split() == [
            "form", "expected", "found", "k", "zeros", "iso", "rot", "mirror", "result"
        ]
        assert lines[2].split()[-1] == "PASS"
        assert lines[3].split()[-1] == "FAIL"
        assert "broken: error: bad form" in lines
        assert text.endswith("1/2 forms match\n")
