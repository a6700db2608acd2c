import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import click
from pydantic import ValidationError

from isoforms import __version__
from isoforms.catalog import catalog_form, get, load_catalog
from isoforms.core import setup_logging
from isoforms.core.config import PortraitConfiguration
from isoforms.core.errors import DomainError
from isoforms.forms.isochrony import isochrony_report, mirror_search
from isoforms.forms.isotropy import check_a5_shortcut, check_characterization, isotropy
from isoforms.forms.oneform import RationalOneForm
from isoforms.forms.synthesis import (
    SynthesisSpec,
    Z2Orientation,
    sample_stratum,
    stratum,
    synthesize,
)
from isoforms.geometry.groups import FiniteMobiusGroup, GroupTypeTag, canonical_group
from isoforms.geometry.sphere import INFINITY, SpherePoint
from isoforms.harness import format_table, run_paper_checks
from isoforms.io import DataReader, DataReaderError, PydanticValidator
from isoforms.io.documents import (
    FormDocument,
    GroupDocument,
    PolyhedronDocument,
    render_json,
    write_json,
)
from isoforms.portrait.fields import Window, sample_grid
from isoforms.portrait.render import RenderOptions, render_svg

CATALOG_PREFIX = "catalog:"
POLYHEDRON_KINDS = (
    "tetrahedron",
    "octahedron",
    "cube",
    "icosahedron",
    "dodecahedron",
    "dihedron",
    "hosohedron",
)

_IO_ERRORS = (DataReaderError, FileNotFoundError, ConnectionError, ValueError, OSError)


class ComplexParamType(click.ParamType):
    """``re,im`` (as in ``--lambda 0,-1``) or a Python complex literal such as ``1-2j``."""

    name = "complex"

    def convert(self, value: Any, param: click.Parameter | None, ctx: click.Context | None) -> Any:
        if isinstance(value, complex):
            return value
        text = str(value).replace(" ", "")
        try:
            if "," in text:
                re_part, im_part = text.split(",")
                return complex(float(re_part), float(im_part))
            return complex(text)
        except ValueError:
            self.fail(f"{value!r} is not a complex number (use re,im)", param, ctx)


class PointParamType(ComplexParamType):
    """A sphere point: ``inf`` or a complex number."""

    name = "point"

    def convert(self, value: Any, param: click.Parameter | None, ctx: click.Context | None) -> Any:
        if isinstance(value, SpherePoint):
            return value
        if str(value).strip().lower() in {"inf", "infinity"}:
            return INFINITY
        return SpherePoint.from_complex(super().convert(value, param, ctx))


class GroupParamType(click.ParamType):
    """A group label: Zn, Dn, A4, S4 or A5."""

    name = "group"

    def convert(self, value: Any, param: click.Parameter | None, ctx: click.Context | None) -> Any:
        if isinstance(value, GroupTypeTag):
            return value
        try:
            return GroupTypeTag.parse(str(value))
        except ValueError as e:
            self.fail(str(e), param, ctx)


class WindowParamType(click.ParamType):
    name = "window"

    def convert(self, value: Any, param: click.Parameter | None, ctx: click.Context | None) -> Any:
        if isinstance(value, Window):
            return value
        try:
            return Window.parse(str(value))
        except ValueError as e:
            self.fail(str(e), param, ctx)


COMPLEX = ComplexParamType()
POINT = PointParamType()
GROUP = GroupParamType()
WINDOW = WindowParamType()


@dataclass(frozen=True)
class CliState:
    """Objects shared by every subcommand."""

    style: PortraitConfiguration


class IsoformsGroup(click.Group):
    """Maps domain errors to exit status 1 and I/O errors to exit status 2."""

    def invoke(self, ctx: click.Context) -> Any:
        logger = logging.getLogger("isoforms")
        try:
            return super().invoke(ctx)
        except DomainError as e:
            logger.debug("Domain error", exc_info=True)
            click.echo(f"Error: {e}", err=True)
            ctx.exit(1)
        except _IO_ERRORS as e:
            logger.debug("I/O error", exc_info=True)
            click.echo(f"Error: {e}", err=True)
            ctx.exit(2)


def load_form(location: str) -> RationalOneForm:
    """A form from a JSON/YAML path, an http(s) URL or ``catalog:NAME``."""
    if location.startswith(CATALOG_PREFIX):
        name = location.removeprefix(CATALOG_PREFIX)
        try:
            return catalog_form(name)
        except KeyError as e:
            msg = f"Unknown catalog form {name!r}; see 'isoforms catalog'"
            raise click.BadParameter(msg, param_hint="--form") from e
    document: FormDocument = DataReader(PydanticValidator(FormDocument)).load_from(location)
    return document.to_form()


def load_group(label: GroupTypeTag | None, location: str | None) -> FiniteMobiusGroup:
    if location is not None:
        document: GroupDocument = DataReader(PydanticValidator(GroupDocument)).load_from(location)
        return document.to_group()
    if label is None:
        msg = "Give either --group or --group-file"
        raise click.UsageError(msg)
    return canonical_group(label)


def form_payload(form: RationalOneForm) -> dict[str, Any]:
    """A form as a divisor-style document, readable back with --form."""
    return FormDocument.from_form(form).model_dump(by_alias=True, exclude_none=True)


def emit(payload: Any, out: str | None) -> None:
    """Write JSON to ``out``, or to stdout when no path is given."""
    if out:
        write_json(payload, out)
    else:
        click.echo(render_json(payload), nl=False)


form_option = click.option(
    "--form",
    "form_location",
    required=True,
    help="Form document (JSON/YAML path, http(s) URL, or catalog:NAME)",
)
out_option = click.option(
    "--out",
    type=click.Path(dir_okay=False, writable=True),
    help="Write the result to this file instead of stdout",
)


@click.version_option(version=__version__, prog_name="isoforms")
@click.group(cls=IsoformsGroup)
@click.option(
    "-v",
    "--verbose",
    count=True,
    help="Increase verbosity of logging output. Use multiple times for more verbosity.",
)
@click.option(
    "--config-file",
    type=click.Path(exists=True, dir_okay=False, readable=True),
    envvar="ISOFORMS_CONFIG_FILE",
    help="Portrait style file (YAML/JSON), see config.yaml",
)
@click.pass_context
def main(ctx: click.Context, verbose: int, config_file: str | None = None) -> None:
    """isoforms - isotropy, synthesis and isochrony of rational 1-forms on the sphere."""
    if verbose == 1:
        current_logging_level = logging.INFO
    elif verbose >= 2:  # -vv or more
        current_logging_level = logging.DEBUG
    else:
        current_logging_level = logging.WARNING

    logger = setup_logging(current_logging_level, sys.stderr)
    logger.debug("Logging level set to: %s", logging.getLevelName(current_logging_level))

    style = PortraitConfiguration()
    if config_file:
        style = DataReader(PydanticValidator(PortraitConfiguration)).load_from(config_file)
        logger.debug("Portrait style read from %s", config_file)
    ctx.obj = CliState(style=style)


@main.command("isotropy")
@form_option
@click.option("--epsilon", type=float, help="Chordal matching tolerance (default: settings)")
@out_option
def isotropy_command(form_location: str, epsilon: float | None, out: str | None) -> None:
    """Isotropy group of a form: group type, generators and orbit report."""
    result = isotropy(load_form(form_location), epsilon=epsilon)
    emit(result.to_document(), out)


@main.command("check")
@form_option
@click.option("--group", "label", type=GROUP, help="Canonical group label (Zn, Dn, A4, S4, A5)")
@click.option("--group-file", help="Group document with explicit elements")
@click.option("--epsilon", type=float, help="Chordal matching tolerance (default: settings)")
@out_option
def check_command(
    form_location: str,
    label: GroupTypeTag | None,
    group_file: str | None,
    epsilon: float | None,
    out: str | None,
) -> None:
    """Test the invariance conditions of a form under a group, and whether it is the isotropy."""
    form = load_form(form_location)
    group = load_group(label, group_file)
    report = check_characterization(form, group, epsilon=epsilon)
    payload: dict[str, Any] = {
        "group_type": group.type_tag.label,
        "cond1": report.cond1,
        "cond2": report.cond2,
        "cond3_failures": [failure.model_dump() for failure in report.cond3_failures],
        "maximal": report.maximal,
        "all_true": report.all_true,
    }
    if group.type_tag.kind == "icosa":
        payload["a5_shortcut"] = check_a5_shortcut(form, group, epsilon=epsilon)
    emit(payload, out)


@main.command("synth")
@click.option("--group", "label", type=GROUP, required=True, help="Group label (Zn, Dn, A4, ...)")
@click.option("--dif", type=int, help="l1 - l2 (default: derived from the orbit counts)")
@click.option("--l1", type=int, help="Number of interior zero orbits")
@click.option("--l2", type=int, help="Number of interior pole orbits")
@click.option("--zero", "zeros", type=POINT, multiple=True, help="Zero orbit representative")
@click.option("--pole", "poles", type=POINT, multiple=True, help="Pole orbit representative")
@click.option("--lambda", "lambda_", type=COMPLEX, default="0,-1", show_default=True)
@click.option(
    "--z2-orientation",
    type=click.Choice(["pole_at_zero", "pole_at_infinity"]),
    default="pole_at_zero",
    show_default=True,
    help="Which fixed point of Z2 carries the pole when dif = -1",
)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for drawn orbits")
@out_option
def synth_command(
    label: GroupTypeTag,
    dif: int | None,
    l1: int | None,
    l2: int | None,
    zeros: tuple[SpherePoint, ...],
    poles: tuple[SpherePoint, ...],
    lambda_: complex,
    z2_orientation: Z2Orientation,
    seed: int,
    out: str | None,
) -> None:
    """Build a G-invariant form from a pole-count cell.

    Orbit representatives may be given with --zero/--pole; otherwise --l1/--l2 orbits are drawn
    at random with --seed.
    """
    logger = logging.getLogger("isoforms")
    if zeros or poles:
        if (l1 is not None and l1 != len(zeros)) or (l2 is not None and l2 != len(poles)):
            msg = "--l1/--l2 disagree with the number of --zero/--pole representatives"
            raise click.UsageError(msg)
        l1, l2 = len(zeros), len(poles)
    elif l1 is None and l2 is None:
        l2 = 0
        l1 = dif or 0
    elif l1 is None:
        l1 = l2 + (dif or 0)  # type: ignore[operator]
    elif l2 is None:
        l2 = l1 - (dif or 0)
    if l1 < 0 or l2 < 0:
        msg = f"Orbit counts must be non-negative, got l1={l1}, l2={l2}"
        raise click.UsageError(msg)

    spec = SynthesisSpec(
        group=label,
        dif=l1 - l2 if dif is None else dif,
        interior_zeros=zeros or (INFINITY,) * l1,
        interior_poles=poles or (INFINITY,) * l2,
        lambda_=lambda_,
        z2_orientation=z2_orientation,
    )
    logger.info("Stratum %s", stratum(spec).model_dump())
    if zeros or poles or l1 + l2 == 0:
        form = synthesize(spec)
    else:
        form = sample_stratum(
            label, l1, l2, seed, lambda_=lambda_, z2_orientation=z2_orientation
        )
    emit(form_payload(form), out)


@main.command("sample")
@click.option("--group", "label", type=GROUP, required=True, help="Group label (Zn, Dn, A4, ...)")
@click.option("--l1", type=int, required=True, help="Number of interior zero orbits")
@click.option("--l2", type=int, required=True, help="Number of interior pole orbits")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--lambda", "lambda_", type=COMPLEX, default="0,-1", show_default=True)
@click.option("--max-rejections", type=int, help="Rejection cap (default: settings)")
@out_option
def sample_command(
    label: GroupTypeTag,
    l1: int,
    l2: int,
    seed: int,
    lambda_: complex,
    max_rejections: int | None,
    out: str | None,
) -> None:
    """Draw a random form with isotropy exactly the given group."""
    form = sample_stratum(label, l1, l2, seed, lambda_=lambda_, max_rejections=max_rejections)
    emit(form_payload(form), out)


@main.command("isochrony")
@form_option
@click.option("--tolerance", type=float, help="Angular tolerance in radians (default: settings)")
@click.option(
    "--strict-two-pole/--no-strict-two-pole",
    default=False,
    help="Never call a two-pole form isochronous",
)
@out_option
def isochrony_command(
    form_location: str, tolerance: float | None, out: str | None, *, strict_two_pole: bool
) -> None:
    """Residues, isochronicity, rotatability and the reflection criterion of a form."""
    form = load_form(form_location)
    report = isochrony_report(form, tolerance=tolerance, strict_two_pole=strict_two_pole)
    certificate = mirror_search(form)
    payload = report.model_dump()
    payload["mirror_found"] = certificate is not None
    payload["mirror"] = certificate.model_dump() if certificate else None
    emit(payload, out)


@main.command("render")
@form_option
@click.option(
    "--window", type=WINDOW, default="-3,3,-3,3", show_default=True, help="xmin,xmax,ymin,ymax"
)
@click.option("--theta", type=float, default=0.0, show_default=True, help="Rotation of the field")
@click.option(
    "--out",
    type=click.Path(dir_okay=False, writable=True),
    required=True,
    help="SVG file to write",
)
@click.option("--sphere/--no-sphere", default=False, help="Add an orthographic sphere view")
@click.option(
    "--separatrices/--no-separatrices", default=True, help="Trace the separatrices of the zeros"
)
@click.option("--json", "json_out", type=click.Path(dir_okay=False), help="Field samples file")
@click.option("--samples", type=int, default=21, show_default=True, help="Samples per axis")
@click.pass_obj
def render_command(
    state: CliState,
    form_location: str,
    window: Window,
    theta: float,
    out: str,
    json_out: str | None,
    samples: int,
    *,
    sphere: bool,
    separatrices: bool,
) -> None:
    """Draw the phase portrait of the dual field as SVG."""
    form = load_form(form_location)
    options = RenderOptions(
        window=window, theta=theta, sphere=sphere, separatrices=separatrices, style=state.style
    )
    Path(out).write_text(render_svg(form, options), encoding="utf-8")
    if json_out:
        grid = sample_grid(form, window, samples, samples, theta)
        write_json([sample.model_dump() for sample in grid], json_out)


@main.command("polyhedron")
@click.option(
    "--kind",
    type=click.Choice(POLYHEDRON_KINDS),
    help="Canonical polyhedron",
)
@click.option("--n", type=int, help="Order for dihedra and hosohedra")
@click.option("--group-file", help="Embed a polyhedron for the group in this document")
@click.option("--dual/--no-dual", default=False, help="With --group-file, the dual polyhedron")
@out_option
def polyhedron_command(
    kind: str | None, n: int | None, group_file: str | None, out: str | None, *, dual: bool
) -> None:
    """Special points (vertices, edge midpoints, face centers) of a Möbius polyhedron."""
    group = None
    if group_file is not None:
        group = DataReader(PydanticValidator(GroupDocument)).load_from(group_file)
    try:
        document = PolyhedronDocument(kind=kind, n=n, group=group, dual=dual)
    except ValidationError as e:
        msg = "Give exactly one of --kind or --group-file"
        raise click.UsageError(msg) from e
    emit(document.to_polyhedron().model_dump(), out)


@main.command("verify-paper")
@click.pass_context
def verify_paper_command(ctx: click.Context) -> None:
    """Check every bundled form against its known isotropy and residue facts."""
    results = run_paper_checks()
    click.echo(format_table(results), nl=False)
    if not all(r.passed for r in results):
        ctx.exit(1)


@main.command("catalog")
@click.argument("name", required=False)
def catalog_command(name: str | None) -> None:
    """List the bundled forms, or print one of them as a form document."""
    if name is None:
        for entry in load_catalog().entries:
            click.echo(f"{entry.name:<15} {entry.expected.group:<16} {entry.description}")
        return
    try:
        entry = get(name)
    except KeyError as e:
        msg = f"Unknown catalog form {name!r}"
        raise click.BadParameter(msg, param_hint="NAME") from e
    emit(entry.form.model_dump(by_alias=True, exclude_none=True), None)


if __name__ == "__main__":
    main()
