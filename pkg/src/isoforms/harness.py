"""Runs every catalog form through isotropy, isochrony and the mirror search.

``verify-paper`` prints the table built here and exits 0 only when every row passes.
"""

import logging
import time

import numpy as np
from pydantic import BaseModel, ConfigDict

from isoforms.catalog import Catalog, CatalogEntry, load_catalog
from isoforms.core.errors import DomainError
from isoforms.forms.isochrony import (
    isochrony_report,
    mirror_search,
    residue_classes,
    sufficient_condition_implies,
)
from isoforms.forms.isotropy import isotropy

logger = logging.getLogger(__name__)

RESIDUE_TOLERANCE = 1e-6


class PaperCheck(BaseModel):
    """Outcome of one catalog form; ``failures`` names every fact that did not match."""

    model_config = ConfigDict(frozen=True)

    name: str
    expected_group: str
    found_group: str | None = None
    poles: int | None = None
    zeros: int | None = None
    isochronous: bool | None = None
    rotatable: bool | None = None
    mirror: bool | None = None
    seconds: float = 0.0
    failures: list[str] = []

    @property
    def passed(self) -> bool:
        return not self.failures


def _residues_match(found: list[complex], expected: list[complex]) -> bool:
    if len(found) != len(expected):
        return False
    remaining = list(found)
    for value in expected:
        gaps = [abs(value - other) for other in remaining]
        best = int(np.argmin(gaps))
        if gaps[best] > RESIDUE_TOLERANCE:
            return False
        remaining.pop(best)
    return True


def check_entry(entry: CatalogEntry) -> PaperCheck:
    """Evaluate one entry against its expectations."""
    expected = entry.expected
    started = time.perf_counter()
    failures: list[str] = []
    try:
        form = entry.form.to_form()
        result = isotropy(form)
        report = isochrony_report(form)
        found_group = result.kind if result.group is None else result.group.type_tag.label
        mirror = None
        if expected.mirror is not None:
            certificate = mirror_search(form, result.group)
            mirror = certificate is not None
            if certificate is not None:
                # A certificate that does not force collinear residues is a failure in itself
                sufficient_condition_implies(form, certificate)
        values = [c.value for c in residue_classes(form)]
    except DomainError as e:
        logger.warning("Catalog form %s failed: %s", entry.name, e)
        return PaperCheck(
            name=entry.name,
            expected_group=expected.group,
            seconds=time.perf_counter() - started,
            failures=[f"error: {e}"],
        )

    checks = [
        ("group", found_group, expected.group),
        ("poles", form.k, expected.poles),
        ("zeros", len(form.zeros), expected.zeros),
        ("isochronous", report.is_isochronous, expected.isochronous),
        ("rotatable", report.rotatable, expected.rotatable),
        ("mirror", mirror, expected.mirror),
    ]
    failures.extend(
        f"{fact}: expected {want}, found {got}"
        for fact, got, want in checks
        if want is not None and got != want
    )
    if expected.residue_values is not None and not _residues_match(
        values, list(expected.residue_values)
    ):
        failures.append(f"residue values: expected {expected.residue_values}, found {values}")

    return PaperCheck(
        name=entry.name,
        expected_group=expected.group,
        found_group=found_group,
        poles=form.k,
        zeros=len(form.zeros),
        isochronous=report.is_isochronous,
        rotatable=report.rotatable,
        mirror=mirror,
        seconds=time.perf_counter() - started,
        failures=failures,
    )


def run_paper_checks(catalog: Catalog | None = None) -> list[PaperCheck]:
    catalog = catalog or load_catalog()
    results = [check_entry(entry) for entry in catalog.entries]
    for r in results:
        logger.debug("%s checked in %.2f s", r.name, r.seconds)
    passed = sum(r.passed for r in results)
    logger.info("Catalog checks: %d of %d passed", passed, len(results))
    return results


def _flag(value: bool | None) -> str:
    return "-" if value is None else ("yes" if value else "no")


def _line(cells: tuple[str, ...], widths: list[int]) -> str:
    return "  ".join(cell.ljust(width) for cell, width in zip(cells, widths, strict=True)).rstrip()


def format_table(results: list[PaperCheck]) -> str:
    """Plain-text table of the checks, one row per form, failures listed underneath."""
    header = ("form", "expected", "found", "k", "zeros", "iso", "rot", "mirror", "result")
    rows = [
        (
            r.name,
            r.expected_group,
            r.found_group or "-",
            "-" if r.poles is None else str(r.poles),
            "-" if r.zeros is None else str(r.zeros),
            _flag(r.isochronous),
            _flag(r.rotatable),
            _flag(r.mirror),
            "PASS" if r.passed else "FAIL",
        )
        for r in results
    ]
    widths = [max(len(row[i]) for row in [header, *rows]) for i in range(len(header))]
    lines = [_line(row, widths) for row in [header, *rows]]
    lines.insert(1, "  ".join("-" * width for width in widths))
    for r in results:
        lines.extend(f"{r.name}: {failure}" for failure in r.failures)
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} forms match")
    return "\n".join(lines) + "\n"
