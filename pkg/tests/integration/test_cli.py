"""Integration tests for isoforms CLI (__main__.py)."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from isoforms.__main__ import main
from isoforms.harness import PaperCheck


class TestCLI:
    """Tests for the CLI interface."""

    @pytest.fixture
    def runner(self) -> CliRunner:
        """Create a Click CLI test runner."""
        return CliRunner()

    def test_help_option(self, runner: CliRunner):
        """Test --help option lists the subcommands."""
        result = runner.invoke(main, ["--help"])

        assert result.exit_code == 0
        for command in ("isotropy", "synth", "isochrony", "render", "verify-paper"):
            assert command in result.output

    def test_version_option(self, runner: CliRunner):
        """Test --version option shows version."""
        result = runner.invoke(main, ["--version"])

        assert result.exit_code == 0
        assert "isoforms" in result.output

    def test_verbose_flag(self, runner: CliRunner, temp_form_file: Path):
        """Test that -vv is accepted before a subcommand."""
        result = runner.invoke(main, ["-vv", "isotropy", "--form", str(temp_form_file)])

        assert result.exit_code == 0

    def test_config_file_not_found(self, runner: CliRunner, tmp_path: Path):
        """Test that a missing style file is rejected by click."""
        result = runner.invoke(main, ["--config-file", str(tmp_path / "none.yaml"), "catalog"])

        assert result.exit_code == 2


class TestFormCommands:
    """Tests for the commands reading a form."""

    @pytest.fixture
    def runner(self) -> CliRunner:
        return CliRunner()

    def test_isotropy(self, runner: CliRunner, temp_form_file: Path):
        """Test the isotropy of a form file."""
        result = runner.invoke(main, ["isotropy", "--form", str(temp_form_file)])

        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert payload["group_type"] == "D2"
        assert payload["order"] == 4

    def test_isotropy_of_catalog_form(self, runner: CliRunner):
        """Test the catalog: prefix."""
        result = runner.invoke(main, ["isotropy", "--form", "catalog:ciclico3"])

        assert result.exit_code == 0
        assert json.loads(result.stdout)["group_type"] == "Z3"

    def test_isotropy_to_file(self, runner: CliRunner, temp_form_file: Path, tmp_path: Path):
        """Test that --out writes the JSON result."""
        out = tmp_path / "iso.json"
        args = ["isotropy", "--form", str(temp_form_file), "--out", str(out)]
        result = runner.invoke(main, args)

        assert result.exit_code == 0
        assert json.loads(out.read_text(encoding="utf-8"))["group_type"] == "D2"

    def test_unknown_catalog_form(self, runner: CliRunner):
        """Test that unknown catalog names are a usage error."""
        result = runner.invoke(main, ["isotropy", "--form", "catalog:nothing"])

        assert result.exit_code == 2
        assert "Unknown catalog form" in result.output

    def test_missing_form_file(self, runner: CliRunner, tmp_path: Path):
        """Test that a missing file exits with status 2."""
        result = runner.invoke(main, ["isotropy", "--form", str(tmp_path / "missing.json")])

        assert result.exit_code == 2
        assert "File does not exist" in result.output

    def test_invalid_form_file(self, runner: CliRunner, temp_invalid_json_file: Path):
        """Test that unparsable documents exit with status 2."""
        result = runner.invoke(main, ["isotropy", "--form", str(temp_invalid_json_file)])

        assert result.exit_code == 2
        assert "Invalid JSON content" in result.output

    def test_invalid_form_is_domain_error(self, runner: CliRunner, tmp_path: Path):
        """Test that a double pole exits with status 1."""
        path = tmp_path / "double.json"
        path.write_text(json.dumps({"numer": [1], "denom": [1, -2, 1]}), encoding="utf-8")
        result = runner.invoke(main, ["isotropy", "--form", str(path)])

        assert result.exit_code == 1
        assert "non-simple root" in result.output

    def test_check(self, runner: CliRunner, temp_form_file: Path):
        """Test the characterization report for the Klein group."""
        result = runner.invoke(main, ["check", "--form", str(temp_form_file), "--group", "D2"])

        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert payload["all_true"] is True
        assert payload["cond3_failures"] == []

    def test_check_needs_group(self, runner: CliRunner, temp_form_file: Path):
        """Test that check without a group is a usage error."""
        result = runner.invoke(main, ["check", "--form", str(temp_form_file)])

        assert result.exit_code == 2

    def test_isochrony(self, runner: CliRunner):
        """Test the isochrony report of a Z3 form."""
        result = runner.invoke(main, ["isochrony", "--form", "catalog:ciclico3"])

        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert payload["is_isochronous"] is True
        assert "mirror_found" in payload

    def test_isochrony_strict_two_pole(self, runner: CliRunner, tmp_path: Path):
        """Test the strict reading for two-pole forms."""
        path = tmp_path / "center.json"
        document = {"lambda": [0, 1], "poles": [[0, 0], "inf"]}
        path.write_text(json.dumps(document), encoding="utf-8")
        result = runner.invoke(main, ["isochrony", "--form", str(path), "--strict-two-pole"])

        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert payload["is_isochronous"] is False
        assert payload["mirror_found"] is False

    def test_render(
        self, runner: CliRunner, temp_form_file: Path, temp_yaml_file: Path, tmp_path: Path
    ):
        """Test writing an SVG portrait and the field samples."""
        svg = tmp_path / "portrait.svg"
        samples = tmp_path / "samples.json"
        result = runner.invoke(
            main,
            [
                "--config-file",
                str(temp_yaml_file),
                "render",
                "--form",
                str(temp_form_file),
                "--out",
                str(svg),
                "--no-separatrices",
                "--json",
                str(samples),
                "--samples",
                "4",
            ],
        )

        assert result.exit_code == 0
        assert "<svg" in svg.read_text(encoding="utf-8")
        assert len(json.loads(samples.read_text(encoding="utf-8"))) == 16

    def test_render_bad_window(self, runner: CliRunner, temp_form_file: Path, tmp_path: Path):
        """Test that a malformed window is rejected."""
        out = tmp_path / "p.svg"
        args = ["render", "--form", str(temp_form_file), "--out", str(out), "--window", "1,2"]
        result = runner.invoke(main, args)

        assert result.exit_code == 2


class TestSynthesisCommands:
    """Tests for synth and sample."""

    @pytest.fixture
    def runner(self) -> CliRunner:
        return CliRunner()

    def test_synth_dihedral(self, runner: CliRunner):
        """Test the D3 form with poles on vertices and face centers."""
        result = runner.invoke(main, ["synth", "--group", "D3", "--dif", "0"])

        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert len(payload["poles"]) == 5
        assert len(payload["zeros"]) == 3

    def test_synth_with_representatives(self, runner: CliRunner):
        """Test a Z3 form from explicit orbit representatives."""
        result = runner.invoke(main, ["synth", "--group", "Z3", "--pole", "2", "--zero", "0,0.5"])

        assert result.exit_code == 0
        assert len(json.loads(result.stdout)["poles"]) == 5

    def test_synth_output_reads_back(self, runner: CliRunner, tmp_path: Path):
        """Test that a synthesized form is a form document accepted by --form."""
        path = tmp_path / "d3.json"
        result = runner.invoke(main, ["synth", "--group", "D3", "--dif", "0", "--out", str(path)])
        assert result.exit_code == 0

        payload = json.loads(path.read_text(encoding="utf-8"))
        assert set(payload) == {"lambda", "zeros", "poles"}
        again = runner.invoke(main, ["isotropy", "--form", str(path)])
        assert again.exit_code == 0
        assert json.loads(again.stdout)["group_type"] == "D3"

    def test_synth_illegal_cell(self, runner: CliRunner):
        """Test that an unpopulated cell exits with status 1."""
        result = runner.invoke(main, ["synth", "--group", "Z3", "--dif", "0"])

        assert result.exit_code == 1
        assert "illegal table cell" in result.output

    def test_synth_bad_group(self, runner: CliRunner):
        """Test that unknown group labels are rejected."""
        result = runner.invoke(main, ["synth", "--group", "Q8", "--dif", "0"])

        assert result.exit_code == 2

    def test_sample_is_seeded(self, runner: CliRunner):
        """Test that equal seeds print equal forms."""
        args = ["sample", "--group", "Z3", "--l1", "1", "--l2", "1", "--seed", "3"]
        first = runner.invoke(main, args)
        second = runner.invoke(main, args)

        assert first.exit_code == 0
        assert first.stdout == second.stdout
        assert len(json.loads(first.stdout)["poles"]) == 5


class TestInformationCommands:
    """Tests for polyhedron, catalog and verify-paper."""

    @pytest.fixture
    def runner(self) -> CliRunner:
        return CliRunner()

    def test_polyhedron(self, runner: CliRunner):
        """Test the special points of the cube."""
        result = runner.invoke(main, ["polyhedron", "--kind", "cube"])

        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert (len(payload["V"]), len(payload["E"]), len(payload["F"])) == (8, 12, 6)

    def test_polyhedron_needs_one_source(self, runner: CliRunner):
        """Test that --kind or --group-file is required."""
        result = runner.invoke(main, ["polyhedron"])

        assert result.exit_code == 2

    def test_polyhedron_for_group_file(self, runner: CliRunner, tmp_path: Path):
        """Test embedding the dual polyhedron of a group document."""
        path = tmp_path / "icosa.yaml"
        path.write_text("type: icosa\n", encoding="utf-8")
        result = runner.invoke(main, ["polyhedron", "--group-file", str(path), "--dual"])

        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert (len(payload["V"]), len(payload["E"]), len(payload["F"])) == (20, 30, 12)

    def test_polyhedron_kind_and_group_file(self, runner: CliRunner, tmp_path: Path):
        """Test that --kind and --group-file together are a usage error."""
        path = tmp_path / "octa.json"
        path.write_text('{"type": "octa"}', encoding="utf-8")
        result = runner.invoke(main, ["polyhedron", "--kind", "cube", "--group-file", str(path)])

        assert result.exit_code == 2
        assert "exactly one of --kind or --group-file" in result.output

    def test_catalog_listing(self, runner: CliRunner):
        """Test the list of bundled forms."""
        result = runner.invoke(main, ["catalog"])

        assert result.exit_code == 0
        assert "contraejemplo" in result.output
        assert len(result.stdout.splitlines()) == 23

    def test_catalog_entry(self, runner: CliRunner):
        """Test printing one bundled form."""
        result = runner.invoke(main, ["catalog", "ejemplo1"])

        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert payload["numer"] == [[0.0, 0.0], [1.0, 0.0]]
        assert len(payload["denom"]) == 5

    def test_verify_paper_exit_status(self, runner: CliRunner, monkeypatch):
        """Test that any failing row makes verify-paper exit with status 1."""
        rows = [
            PaperCheck(name="good", expected_group="Z3", found_group="Z3"),
            PaperCheck(name="bad", expected_group="D2", found_group="Z2", failures=["group"]),
        ]
        monkeypatch.setattr("isoforms.__main__.run_paper_checks", lambda: rows)
        result = runner.invoke(main, ["verify-paper"])

        assert result.exit_code == 1
        assert "1/2 forms match" in result.output

        monkeypatch.setattr("isoforms.__main__.run_paper_checks", lambda: rows[:1])
        assert runner.invoke(main, ["verify-paper"]).exit_code == 0
