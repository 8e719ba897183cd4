# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Tests for core output module."""

import json
from unittest.mock import patch

import pytest

from kreinsum.core.output import format_and_output, render_csv, render_json

ROWS = [
    {"z": 1.0, "E": -1.0, "multiplicity": 1, "pass": True},
    {"z": 2.5, "E": -2.5, "multiplicity": 2, "pass": False},
]


class TestOutputFormatting:
    """Test output formatting functionality."""

    def test_csv_floats(self) -> None:
        """Floats carry 17 significant digits, booleans are lowercase."""
        text = render_csv(ROWS, ["z", "E", "multiplicity", "pass"])
        lines = text.splitlines()
        assert lines[0] == "z,E,multiplicity,pass"
        assert lines[1] == "1.0000000000000000e+00,-1.0000000000000000e+00,1,true"
        assert float(lines[2].split(",")[0]) == 2.5

    def test_csv_auto_columns(self) -> None:
        """Columns default to first-seen key order."""
        text = render_csv([{"a": 1}, {"b": 2}])
        assert text.splitlines() == ["a,b", "1,", ",2"]

    def test_json_is_sorted(self) -> None:
        """JSON keys are sorted and floats round-trip."""
        text = render_json({"b": 0.1, "a": [1, 2]})
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text)["b"] == 0.1

    def test_document_rows_in_csv(self) -> None:
        """For a document, csv writes the rows found under table_config['rows']."""
        document = {"roots": ROWS, "params_digest": "abc"}
        config = {"rows": "roots", "columns": [{"name": "Z", "field": "z"}]}
        with patch("builtins.print") as mock_print:
            format_and_output(document, "csv", config)
        assert mock_print.call_args[0][0] == "z\n1.0000000000000000e+00\n2.5000000000000000e+00\n"

    def test_format_and_output_table(self) -> None:
        """Test table output formatting."""
        with patch("rich.console.Console.print") as mock_print:
            format_and_output(ROWS, "table", {"title": "Roots"})
            mock_print.assert_called()

    def test_unsupported_format(self) -> None:
        """Unknown formats raise ValueError."""
        with pytest.raises(ValueError, match="Unsupported output format"):
            format_and_output(ROWS, "xml")

    def test_write_to_file(self, tmp_path) -> None:
        """Output goes to the requested file."""
        target = tmp_path / "roots.json"
        with patch("rich.console.Console.print"):
            format_and_output(ROWS, "json", None, target)
        assert json.loads(target.read_text())[1]["multiplicity"] == 2
