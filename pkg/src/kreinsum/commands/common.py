# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Options and error handling shared by the kreinsum commands."""

import logging
import pathlib
from collections.abc import Iterator
from contextlib import contextmanager
from typing import Any, Dict, List, Optional

import typer
from rich.console import Console

from kreinsum.core.config import ProblemConfig, load_config
from kreinsum.core.errors import ConfigError, KreinsumError, ValidationError
from kreinsum.core.output import format_and_output

logger = logging.getLogger(__name__)

console = Console()
err_console = Console(stderr=True, soft_wrap=True)

EXIT_USAGE = 1
EXIT_FAILURE = 2

CONFIG_HELP = "Problem configuration (YAML)"
OUT_HELP = "Write the result to this file instead of standard output"
FORMAT_HELP = "Output format (csv, json, table); defaults to the config's output.format"
SEED_HELP = "Seed for random test vectors; defaults to the config's seed"
THREADS_HELP = "Worker threads for per-block assembly; defaults to the config's threads"


def config_option() -> Any:
    return typer.Option(..., "--config", "-c", help=CONFIG_HELP)


def out_option() -> Any:
    return typer.Option(None, "--out", "-o", help=OUT_HELP)


def format_option() -> Any:
    return typer.Option(None, "--format", "-f", help=FORMAT_HELP)


def seed_option() -> Any:
    return typer.Option(None, "--seed", help=SEED_HELP)


def threads_option() -> Any:
    return typer.Option(None, "--threads", help=THREADS_HELP, min=1)


def report_error(error: KreinsumError) -> None:
    """Print ``Error [<code>]: <message>`` on standard error."""
    err_console.print(f"Error [{error.code}]: {error}", style="red", markup=False, highlight=False)
    if isinstance(error, ValidationError) and len(error.errors) > 1:
        for message in error.errors:
            err_console.print(f"  - {message}", markup=False, highlight=False)


@contextmanager
def handle_errors() -> Iterator[None]:
    """Map kreinsum errors to exit codes: 1 for configuration problems, 2 otherwise."""
    try:
        yield
    except ConfigError as e:
        report_error(e)
        raise typer.Exit(EXIT_USAGE) from e
    except KreinsumError as e:
        logger.debug(f"Command failed with {e.code}", exc_info=True)
        report_error(e)
        raise typer.Exit(EXIT_FAILURE) from e


def load(config_path: pathlib.Path) -> ProblemConfig:
    return load_config(pathlib.Path(config_path))


def emit(
    config: ProblemConfig,
    data: Any,
    output_format: Optional[str],
    out: Optional[pathlib.Path],
    table_config: Optional[Dict[str, Any]] = None,
) -> None:
    """Write a command result using CLI overrides or the config's output settings."""
    fmt = output_format or config.output.format
    if fmt not in ("csv", "json", "table"):
        raise ValidationError([f"--format: expected csv, json or table, got {fmt!r}"])
    target = out if out is not None else (pathlib.Path(config.output.path) if config.output.path else None)
    format_and_output(data, fmt, table_config, target)


def columns(*fields: str) -> List[Dict[str, str]]:
    return [{"name": field.replace("_", " ").title(), "field": field} for field in fields]


def check_failed(message: str) -> None:
    """Report a failed numerical check and exit with the failure status."""
    err_console.print(f"Error [E_CHECK_FAILED]: {message}", style="red", markup=False, highlight=False)
    raise typer.Exit(EXIT_FAILURE)
