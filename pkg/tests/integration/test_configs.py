# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""End-to-end runs over the checked-in test_config problems."""

import json
import pathlib

import numpy as np
import pytest
from typer.testing import CliRunner

from kreinsum.cli import app
from kreinsum.core.config import load_config
from kreinsum.core.krein import find_eigenvalues
from kreinsum.core.models import OracleModel
from kreinsum.core.oracle import fd_convergence_order, transfer_matrix_spectrum
from kreinsum.core.problems import build_system, search_options

pytestmark = pytest.mark.integration

ORACLE_CONFIGS = ["delta_single.yaml", "delta_pair.yaml", "delta_prime.yaml", "cylinder_robin.yaml", "cylinder_flat.yaml"]


class TestConfigIntegration:
    """Integration tests for test configuration files."""

    def setup_method(self) -> None:
        """Set up test fixtures."""
        self.runner = CliRunner()

    @pytest.mark.parametrize("name", ORACLE_CONFIGS)
    def test_oracle_compare(self, name: str, tmp_path: pathlib.Path, test_config_dir: pathlib.Path) -> None:
        """Every oracle-capable problem passes oracle-compare."""
        out = tmp_path / "compare.json"
        result = self.runner.invoke(
            app, ["oracle-compare", "--config", str(test_config_dir / name), "--format", "json", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        assert json.loads(out.read_text())["pass"] is True

    def test_lift_norm_estimates(self, tmp_path: pathlib.Path, test_config_dir: pathlib.Path) -> None:
        """iota tau has graph norm one on every block of the delta pair."""
        out = tmp_path / "lift.json"
        result = self.runner.invoke(
            app,
            [
                "lift-check",
                "--config",
                str(test_config_dir / "delta_pair.yaml"),
                "--norm-estimates",
                "--format",
                "json",
                "--out",
                str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        rows = json.loads(out.read_text())
        assert sum(row["check"].startswith("iota_tau") for row in rows) == 3

    def test_resolvent_check(self, test_config_dir: pathlib.Path) -> None:
        """The Krein resolvent of the delta pair passes both checks."""
        result = self.runner.invoke(app, ["resolvent-check", "--config", str(test_config_dir / "delta_pair.yaml")])
        assert result.exit_code == 0, result.output


class TestRandomDeltaLines:
    """Seeded random delta lines against both oracles."""

    @pytest.mark.parametrize("seed", range(5))
    def test_random_configuration(self, seed: int, tmp_path: pathlib.Path) -> None:
        """Krein roots match the transfer matrix and FD converges at second order."""
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        # multiples of 4e-3 keep every point on each FD grid
        points = np.round(np.cumsum(rng.uniform(0.5, 2.0, n)) / 4e-3) * 4e-3
        strengths = np.round(rng.uniform(-6.0, 2.0, n), 3)
        strengths[0] = -5.0
        config_path = tmp_path / "random.yaml"
        config_path.write_text(
            "model: delta_line\n"
            f"geometry: {{points: {points.tolist()}, strengths: {strengths.tolist()}}}\n"
            "search: {z_interval: [0.01, 60]}\n"
        )
        config = load_config(config_path)
        report = find_eigenvalues(build_system(config), config.search.z_interval, search_options(config))
        model = OracleModel.deltas(points, strengths)
        oracle = transfer_matrix_spectrum(model, (-60.0, -0.01))
        assert sorted(report.energies) == pytest.approx(oracle, abs=1e-7)
        deep = [e for e in oracle if e < -1.0]
        assert deep
        assert fd_convergence_order(model, deep) == pytest.approx(2.0, abs=0.2)
