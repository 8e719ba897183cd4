# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Tests for problem configuration parsing."""

import pathlib

import pytest

from kreinsum.core.config import ModelKind, load_config, parse_config, serialize_config
from kreinsum.core.errors import ParseError, ValidationError
from kreinsum.core.models import Domain

DELTA_PAIR = """
model: delta_line
geometry:
  points: [0.0, 1.0]
  strengths: [-4, -4]
"""


class TestParseConfig:
    """Test configuration parsing and defaults."""

    def test_defaults(self) -> None:
        """Missing sections take their defaults."""
        config = parse_config(DELTA_PAIR)
        assert config.model is ModelKind.DELTA_LINE
        assert config.base_point == 1.0
        assert config.metric == "exact"
        assert config.extension.preset == "delta"
        assert config.search.z_interval == (1e-6, 100.0)
        assert config.search.compare_tol == 1e-7
        assert config.search.fd_tol == 1e-4
        assert config.output.format == "csv"
        assert config.seed == 0
        assert config.threads == 1
        assert config.geometry.domain is Domain.FULL_LINE
        assert config.trace_dim == 4

    def test_left_capped_dimension(self) -> None:
        """A left-capped line has one component fewer."""
        config = parse_config(DELTA_PAIR + "  domain: left_capped\n")
        assert config.trace_dim == 3

    def test_mode_defaults(self) -> None:
        """Cylinders default to lambda = 0 and, with theta, to robin_modes."""
        config = parse_config(
            "model: cylinder_flat\ngeometry: {mode_cutoff: 3}\nextension: {theta: [-4]}\n"
        )
        assert config.base_point == 0.0
        assert config.extension.preset == "robin_modes"
        assert config.trace_dim == 6

    def test_exponent_strings(self) -> None:
        """Exponents without a dot are read as numbers."""
        config = parse_config(DELTA_PAIR + "search:\n  root_tol: 1e-6\n  z_interval: [1e-3, 10]\n")
        assert config.search.root_tol == 1e-6
        assert config.search.z_interval == (1e-3, 10.0)

    def test_alpha_range(self) -> None:
        """Grushin alpha lies in (0, 1)."""
        with pytest.raises(ValidationError) as exc_info:
            parse_config("model: grushin\ngeometry: {mode_cutoff: 8, alpha: 1.5}\n")
        assert "alpha out of (0,1)" in str(exc_info.value)

    def test_errors_are_collected(self) -> None:
        """Every problem is reported, not only the first."""
        text = "model: delta_line\ngeometry: {points: [1, 0], strengths: [-1]}\nseed: x\ncolour: red\n"
        with pytest.raises(ValidationError) as exc_info:
            parse_config(text)
        errors = exc_info.value.errors
        assert any("strictly increasing" in e for e in errors)
        assert any("1 strengths for 2 points" in e for e in errors)
        assert any(e.startswith("seed:") for e in errors)
        assert any("colour" in e for e in errors)

    def test_unknown_model(self) -> None:
        """The model is one of the supported families."""
        with pytest.raises(ValidationError, match="model: expected one of"):
            parse_config("model: torus\n")

    def test_preset_must_fit_model(self) -> None:
        """robin_modes does not apply to line models."""
        with pytest.raises(ValidationError, match="does not apply"):
            parse_config(DELTA_PAIR + "extension: {preset: robin_modes, theta: [1]}\n")

    def test_robin_theta_count(self) -> None:
        """theta has one value or one per mode."""
        with pytest.raises(ValidationError, match="expected 1 or m = 4"):
            parse_config("model: cylinder_flat\ngeometry: {mode_cutoff: 2}\nextension: {theta: [1, 2]}\n")

    def test_line_base_point(self) -> None:
        """Line models need lambda > 0."""
        with pytest.raises(ValidationError, match="base_point"):
            parse_config(DELTA_PAIR + "base_point: 0\n")

    def test_parse_error_location(self) -> None:
        """Malformed YAML reports line and column."""
        with pytest.raises(ParseError) as exc_info:
            parse_config("model: delta_line\ngeometry: {points: [0.0\n")
        assert exc_info.value.line is not None
        assert "line" in str(exc_info.value)

    def test_not_a_mapping(self) -> None:
        """The document is a mapping."""
        with pytest.raises(ValidationError):
            parse_config("- a\n- b\n")


class TestExplicitMatrices:
    """Test validation of explicit extension matrices."""

    def write(self, directory: pathlib.Path, projection: str, theta: str) -> pathlib.Path:
        (directory / "p.csv").write_text(projection)
        (directory / "t.csv").write_text(theta)
        config = directory / "problem.yaml"
        config.write_text(
            "model: delta_line\ngeometry: {points: [0.0], strengths: [-2]}\n"
            "extension: {preset: explicit, projection_file: p.csv, theta_file: t.csv}\n"
        )
        return config

    def test_valid(self, tmp_path) -> None:
        """Matrices resolve relative to the configuration file."""
        config = load_config(self.write(tmp_path, "0.5,0.5\n0.5,0.5\n", "-1.0\n"))
        assert config.resolve("p.csv") == tmp_path / "p.csv"

    def test_wrong_dimension(self, tmp_path) -> None:
        """A 3x3 projection on a two-component problem names m."""
        with pytest.raises(ValidationError, match="expected m = 2"):
            load_config(self.write(tmp_path, "1,0,0\n0,1,0\n0,0,1\n", "-1.0\n"))

    def test_theta_rank(self, tmp_path) -> None:
        """Theta is square of the projection rank."""
        with pytest.raises(ValidationError, match=r"expected \(1, 1\)"):
            load_config(self.write(tmp_path, "0.5,0.5\n0.5,0.5\n", "1,0\n0,1\n"))

    def test_missing_file(self, tmp_path) -> None:
        """Unreadable matrices are validation errors."""
        config = self.write(tmp_path, "0.5,0.5\n0.5,0.5\n", "-1.0\n")
        (tmp_path / "t.csv").unlink()
        with pytest.raises(ValidationError, match="cannot read"):
            load_config(config)


class TestLoadAndSerialize:
    """Test file loading and normalized output."""

    def test_checked_in_configs(self, test_config_dir) -> None:
        """Every problem in test_config parses."""
        paths = sorted(test_config_dir.glob("*.yaml"))
        assert paths
        for path in paths:
            load_config(path)

    def test_missing_config(self, tmp_path) -> None:
        """A missing file is a validation error."""
        with pytest.raises(ValidationError, match="cannot read configuration"):
            load_config(tmp_path / "absent.yaml")

    def test_round_trip(self, test_config_dir) -> None:
        """Serializing a parsed configuration is idempotent."""
        config = load_config(test_config_dir / "delta_pair.yaml")
        text = serialize_config(config)
        assert serialize_config(parse_config(text)) == text
        assert "fd_tol" in text
