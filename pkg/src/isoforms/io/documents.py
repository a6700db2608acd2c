"""JSON/YAML document schemas for forms, groups and polyhedra, and deterministic JSON output."""

import json
from pathlib import Path
from typing import Any, Literal, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from isoforms.core.errors import GroupTypeError
from isoforms.forms.oneform import (
    RationalOneForm,
    from_partial_fractions,
    from_rational_coefficients,
)
from isoforms.geometry.groups import FiniteMobiusGroup, GroupTypeTag, canonical_group, closure
from isoforms.geometry.mobius import MobiusMap
from isoforms.geometry.polyhedra import (
    MobiusPolyhedron,
    PolyhedronKind,
    canonical_polyhedron,
    embed,
)
from isoforms.geometry.sphere import ComplexJson, Point

type FormStyle = Literal["divisor", "coefficients", "partial_fractions"]

_KIND_NAMES = {"cyclic": "Z", "dihedral": "D", "z": "Z", "c": "Z", "d": "D"}


class FormDocument(BaseModel):
    """A form written in one of three styles.

    - ``{"lambda", "zeros", "poles"}``: leading coefficient and divisor
    - ``{"numer", "denom"}``: ascending coefficient lists of f = numer / denom
    - ``{"poles", "residues"}`` with optional ``"scale"``: partial fractions at finite poles
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    lambda_: ComplexJson | None = Field(default=None, alias="lambda")
    zeros: list[Point] | None = None
    poles: list[Point] | None = None
    numer: list[ComplexJson] | None = None
    denom: list[ComplexJson] | None = None
    residues: list[ComplexJson] | None = None
    scale: ComplexJson | None = None

    @model_validator(mode="after")
    def _check_style(self) -> Self:
        styles = {
            "coefficients": self.numer is not None or self.denom is not None,
            "partial_fractions": self.residues is not None,
            "divisor": self.lambda_ is not None,
        }
        chosen = [name for name, present in styles.items() if present]
        if len(chosen) != 1:
            msg = (
                "A form document needs exactly one of lambda/zeros/poles, numer/denom or "
                f"poles/residues; found {chosen or 'none'}"
            )
            raise ValueError(msg)
        match chosen[0]:
            case "coefficients":
                if self.numer is None or self.denom is None or self.poles or self.zeros:
                    msg = "Coefficient documents take exactly numer and denom"
                    raise ValueError(msg)
            case "partial_fractions":
                if self.poles is None or self.zeros is not None:
                    msg = "Partial fraction documents take poles and residues (and scale)"
                    raise ValueError(msg)
            case _:
                if self.poles is None:
                    msg = "Divisor documents need poles"
                    raise ValueError(msg)
        if self.scale is not None and chosen[0] != "partial_fractions":
            msg = "Only partial fraction documents take a scale"
            raise ValueError(msg)
        return self

    @property
    def style(self) -> FormStyle:
        if self.numer is not None:
            return "coefficients"
        if self.residues is not None:
            return "partial_fractions"
        return "divisor"

    def to_form(self) -> RationalOneForm:
        """Build the form; domain errors (non-simple roots, bad divisors) propagate."""
        match self.style:
            case "coefficients":
                return from_rational_coefficients(self.numer, self.denom)  # type: ignore[arg-type]
            case "partial_fractions":
                return from_partial_fractions(
                    self.poles,  # type: ignore[arg-type]
                    self.residues,  # type: ignore[arg-type]
                    1 if self.scale is None else self.scale,
                )
            case _:
                return RationalOneForm(
                    lambda_=self.lambda_,
                    zeros=tuple(self.zeros or ()),
                    poles=tuple(self.poles or ()),
                )

    @classmethod
    def from_form(cls, form: RationalOneForm) -> Self:
        return cls.model_validate(form.model_dump())


class GroupDocument(BaseModel):
    """``{"type", "n", "elements"}``; without elements the canonical realization is meant."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    type: str
    n: int | None = None
    elements: list[MobiusMap] | None = None

    def tag(self) -> GroupTypeTag:
        family = _KIND_NAMES.get(self.type.lower())
        if family is not None:
            if self.n is None:
                msg = f"Group type {self.type} needs n"
                raise ValueError(msg)
            return GroupTypeTag.parse(f"{family}{self.n}")
        named = {"tetra": "A4", "octa": "S4", "icosa": "A5"}
        return GroupTypeTag.parse(named.get(self.type.lower(), self.type))

    def to_group(self) -> FiniteMobiusGroup:
        """The group; listed elements are closed and must have the declared type.

        Raises:
            GroupTypeError: If the listed elements generate a group of another type
        """
        tag = self.tag()
        if not self.elements:
            return canonical_group(tag)
        group = closure(self.elements)
        if group.type_tag != tag:
            msg = f"Elements generate {group.type_tag.label}, declared {tag.label}"
            raise GroupTypeError(msg)
        return group


class PolyhedronDocument(BaseModel):
    """``{"kind", "n"}`` for a canonical polyhedron, or a ``group`` to embed one for."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: PolyhedronKind | None = None
    n: int | None = None
    group: GroupDocument | None = None
    dual: bool = False

    @model_validator(mode="after")
    def _check_source(self) -> Self:
        if (self.kind is None) == (self.group is None):
            msg = "A polyhedron document needs exactly one of kind or group"
            raise ValueError(msg)
        return self

    def to_polyhedron(self) -> MobiusPolyhedron:
        if self.group is not None:
            return embed(self.group.to_group(), dual=self.dual)
        return canonical_polyhedron(self.kind, self.n)  # type: ignore[arg-type]


def render_json(payload: Any) -> str:
    """Sorted keys, two-space indentation and a trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_json(payload: Any, path: str | Path) -> None:
    Path(path).write_text(render_json(payload), encoding="utf-8")
