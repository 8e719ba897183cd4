# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Output formatting for kreinsum CLI commands."""

import csv
import io
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from rich.console import Console
from rich.table import Table

console = Console()

Payload = Union[List[Dict[str, Any]], Dict[str, Any]]


def format_and_output(
    data: Payload,
    output_format: str = "csv",
    table_config: Optional[Dict[str, Any]] = None,
    out: Optional[Path] = None,
) -> None:
    """Format and output data.

    Args:
        data: Rows, or a document such as a spectrum report
        output_format: Format to use (csv, json, table)
        table_config: Columns, title and, for documents, the ``rows`` key holding the rows
        out: Write to this file instead of standard output
    """
    table_config = table_config or {}
    if output_format == "json":
        text = render_json(data)
    elif output_format == "csv":
        text = render_csv(_rows(data, table_config), _column_fields(table_config))
    elif output_format == "table":
        _output_table(_rows(data, table_config), table_config)
        return
    else:
        raise ValueError(f"Unsupported output format: {output_format}")

    if out is not None:
        Path(out).write_text(text, encoding="utf-8")
        console.print(f"[green]Wrote {out}[/green]")
    else:
        print(text, end="")


def render_json(data: Payload) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip floats."""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def render_csv(rows: List[Dict[str, Any]], fields: Optional[List[str]] = None) -> str:
    """Comma-separated rows with floats in 17-significant-digit scientific notation."""
    if not fields:
        fields = _auto_detect_columns(rows)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_format_csv_value(row.get(name, "")) for name in fields])
    return buffer.getvalue()


def _rows(data: Payload, config: Dict[str, Any]) -> List[Dict[str, Any]]:
    if isinstance(data, dict):
        key = config.get("rows")
        return list(data.get(key, [])) if key else [data]
    return data


def _column_fields(config: Dict[str, Any]) -> List[str]:
    fields = []
    for col in config.get("columns", []):
        if isinstance(col, dict):
            fields.append(col.get("field", col.get("name", "")))
        else:
            fields.append(str(col))
    return fields


def _format_csv_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.16e}"
    if isinstance(value, (list, tuple)):
        return " ".join(_format_csv_value(v) for v in value)
    return str(value)


def _output_table(data: List[Dict[str, Any]], config: Dict[str, Any]) -> None:
    """Output data as a rich table."""
    table = Table(title=config.get("title", ""))
    columns = config.get("columns", [])

    if not data and not columns:
        console.print("[yellow]No data to display[/yellow]")
        return

    if not columns:
        columns = _auto_detect_columns(data)

    for col in columns:
        if isinstance(col, dict):
            table.add_column(
                col.get("name", ""),
                style=col.get("style", ""),
                no_wrap=col.get("no_wrap", False),
                justify=col.get("justify", "left"),
            )
        else:
            table.add_column(str(col).replace("_", " ").title())

    for item in data:
        row_values = []
        for col in columns:
            field_name = col.get("field", col.get("name", "")) if isinstance(col, dict) else str(col)
            row_values.append(_format_field_value(item.get(field_name, "")))
        table.add_row(*row_values)

    console.print(table)


def _auto_detect_columns(data: List[Dict[str, Any]]) -> List[str]:
    """Columns in first-seen order across all rows."""
    columns: List[str] = []
    for item in data:
        for key in item:
            if key not in columns:
                columns.append(key)
    return columns


def _format_field_value(value: Any) -> str:
    """Format a field value for display."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "Yes" if value else "No"
    if isinstance(value, float):
        return f"{value:.10g}"
    if isinstance(value, list):
        return ", ".join(_format_field_value(v) for v in value)
    return str(value)
