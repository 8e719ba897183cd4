# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Main CLI entry point for kreinsum."""

import logging
import sys
from typing import Optional

import click
import typer
from rich.console import Console
from rich.table import Table

from kreinsum import __version__
from kreinsum.commands import extensions, oracles, traces
from kreinsum.commands.common import EXIT_USAGE

app = typer.Typer(
    name="kreinsum",
    help="Self-adjoint extensions of direct sums via trace maps and the Krein formula",
    no_args_is_help=True,
    rich_markup_mode="rich",
)
console = Console()

# Trace spaces
app.command("gram")(traces.gram)
app.command("weights")(traces.weights)
app.command("fit-exponent")(traces.fit_exponent)
app.command("lift-check")(traces.lift_check)

# Extensions and spectra
app.command("weyl")(extensions.weyl)
app.command("secular-scan")(extensions.secular_scan_command)
app.command("eigs")(extensions.eigs)
app.command("resolvent-check")(extensions.resolvent_check)
app.command("oracle-compare")(oracles.oracle_compare)


@app.callback(invoke_without_command=True)
def callback(
    ctx: typer.Context,
    version: Optional[bool] = typer.Option(None, "--version", "-v", help="Show version information"),
    verbose: Optional[bool] = typer.Option(False, "--verbose", "-V", help="Enable verbose logging"),
) -> None:
    """Self-adjoint extensions of direct sums via trace maps and the Krein formula."""
    if verbose:
        logging.basicConfig(level=logging.DEBUG)

    if version:
        table = Table(title="kreinsum Information")
        table.add_column("Property", style="cyan", no_wrap=True)
        table.add_column("Value", style="magenta")

        table.add_row("Version", __version__)
        table.add_row("Purpose", "Krein resolvent and bound states of direct-sum operators")
        table.add_row("License", "Apache-2.0")
        table.add_row("Author", "kreinsum developers")

        console.print(table)
        raise typer.Exit()

    if ctx.invoked_subcommand is None:
        console.print(ctx.get_help())
        raise typer.Exit()


def main() -> None:
    """Console entry point; usage errors exit 1 instead of click's 2."""
    try:
        status = app(standalone_mode=False)
    except click.ClickException as e:
        e.show()
        sys.exit(EXIT_USAGE)
    except click.Abort:
        sys.exit(EXIT_USAGE)
    sys.exit(status if isinstance(status, int) else 0)


if __name__ == "__main__":
    main()
