"""Bundled forms with their known isotropy, divisor sizes and residue facts.

The coefficients are stored as printed (ascending degree, irrational constants evaluated to 17
significant digits); root extraction and everything after it is left to the library.
"""

import logging
from functools import lru_cache

from pydantic import BaseModel, ConfigDict

from isoforms.forms.oneform import RationalOneForm
from isoforms.geometry.sphere import ComplexJson
from isoforms.io import DataReader, PydanticValidator
from isoforms.io.documents import FormDocument

logger = logging.getLogger(__name__)

CATALOG_LOCATION = "package://isoforms/data/catalog.json"


class CatalogExpectation(BaseModel):
    """What a catalog form is known to satisfy; unset facts are not checked."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    group: str
    poles: int
    zeros: int
    isochronous: bool | None = None
    rotatable: bool | None = None
    mirror: bool | None = None
    residue_values: list[ComplexJson] | None = None


class CatalogEntry(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    description: str = ""
    form: FormDocument
    expected: CatalogExpectation


class Catalog(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    entries: list[CatalogEntry]

    def names(self) -> list[str]:
        return [entry.name for entry in self.entries]


@lru_cache
def load_catalog(location: str = CATALOG_LOCATION) -> Catalog:
    """Read and validate the catalog (cached per location)."""
    catalog = DataReader(PydanticValidator(Catalog)).load_from(location)
    logger.debug("Loaded %d catalog entries from %s", len(catalog.entries), location)
    return catalog


def get(name: str) -> CatalogEntry:
    """The catalog entry called ``name``.

    Raises:
        KeyError: If no entry has that name
    """
    for entry in load_catalog().entries:
        if entry.name == name:
            return entry
    msg = f"No catalog form named {name!r}"
    raise KeyError(msg)


def catalog_form(name: str) -> RationalOneForm:
    return get(name).form.to_form()
