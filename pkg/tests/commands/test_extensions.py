# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Tests for extension CLI commands."""

import json

import pytest
from typer.testing import CliRunner

from kreinsum.cli import app
from kreinsum.commands.extensions import parse_complex
from kreinsum.core.errors import InvalidSpec


class TestParseComplex:
    """Test spectral parameter parsing."""

    def test_forms(self) -> None:
        """Python and mathematical spellings are accepted."""
        assert parse_complex("3") == 3
        assert parse_complex("2+1j") == 2 + 1j
        assert parse_complex("2+i") == 2 + 1j
        assert parse_complex("1 - 2i") == 1 - 2j

    def test_invalid(self) -> None:
        """Anything else is an invalid specification."""
        with pytest.raises(InvalidSpec):
            parse_complex("two")


class TestExtensionCommands:
    """Test cases for weyl, secular-scan, eigs and resolvent-check."""

    def setup_method(self) -> None:
        """Set up test fixtures."""
        self.runner = CliRunner()

    def run_json(self, tmp_path, test_config_dir, command, config, *extra):
        out = tmp_path / "result.json"
        result = self.runner.invoke(
            app, [command, "--config", str(test_config_dir / config), "--format", "json", "--out", str(out), *extra]
        )
        return result, (json.loads(out.read_text()) if out.exists() else None)

    def test_weyl(self, tmp_path, test_config_dir) -> None:
        """Half-line Weyl blocks at z = 4, lambda = 1 equal 3."""
        result, rows = self.run_json(tmp_path, test_config_dir, "weyl", "delta_single.yaml", "--z", "4")
        assert result.exit_code == 0
        assert len(rows) == 2
        for row in rows:
            assert row["real"] == pytest.approx(3.0)
            assert row["imag"] == pytest.approx(0.0, abs=1e-14)

    def test_secular_scan(self, tmp_path, test_config_dir) -> None:
        """The scan starts below the root with one negative eigenvalue."""
        result, rows = self.run_json(tmp_path, test_config_dir, "secular-scan", "delta_single.yaml", "--samples", "5")
        assert result.exit_code == 0
        assert len(rows) == 5
        assert rows[0]["inertia"] == 1
        assert rows[-1]["inertia"] == 0

    def test_eigs(self, tmp_path, test_config_dir) -> None:
        """A single attractive delta binds at E = -1."""
        result, report = self.run_json(tmp_path, test_config_dir, "eigs", "delta_single.yaml")
        assert result.exit_code == 0
        assert len(report["roots"]) == 1
        assert report["roots"][0]["E"] == pytest.approx(-1.0, abs=1e-10)
        assert report["search"]["representation"] == "renormed"

    def test_eigs_regularized(self, tmp_path, test_config_dir) -> None:
        """The regularized representation finds the same pair of states."""
        _, renormed = self.run_json(tmp_path, test_config_dir, "eigs", "delta_pair.yaml")
        result, regularized = self.run_json(tmp_path, test_config_dir, "eigs", "delta_pair.yaml", "-r", "regularized")
        assert result.exit_code == 0
        assert [r["z"] for r in regularized["roots"]] == pytest.approx([r["z"] for r in renormed["roots"]], abs=1e-9)

    def test_eigs_csv(self, test_config_dir) -> None:
        """CSV output lists the roots."""
        result = self.runner.invoke(
            app, ["eigs", "--config", str(test_config_dir / "delta_prime.yaml"), "--format", "csv"]
        )
        assert result.exit_code == 0
        assert "z,E,residual,multiplicity" in result.stdout

    def test_eigs_bad_representation(self, test_config_dir) -> None:
        """Unknown representations are usage errors."""
        result = self.runner.invoke(
            app, ["eigs", "--config", str(test_config_dir / "delta_single.yaml"), "-r", "sideways"]
        )
        assert result.exit_code == 1

    def test_eigs_grushin(self, test_config_dir) -> None:
        """Grushin families have no extensions."""
        result = self.runner.invoke(app, ["eigs", "--config", str(test_config_dir / "grushin.yaml")])
        assert result.exit_code == 2

    def test_resolvent_check(self, tmp_path, test_config_dir) -> None:
        """Both resolvent checks are reported and small."""
        _, rows = self.run_json(tmp_path, test_config_dir, "resolvent-check", "delta_single.yaml", "--seed", "3")
        assert [row["check"] for row in rows][0] == "resolvent_identity"
        assert rows[1]["check"].startswith("symmetry_at_z=")
        assert all(row["value"] < 1e-4 for row in rows)
