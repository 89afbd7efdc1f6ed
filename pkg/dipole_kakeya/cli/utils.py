from typing import Any, Optional

import click
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from dipole_kakeya.exceptions import InvalidParameterError
from dipole_kakeya.schemas.config import COMMAND_FIELDS, RunConfig
from dipole_kakeya.settings import Settings
from dipole_kakeya.utils.logging import get_logger

logger = get_logger(__name__)

# Diagnostics go to stderr; stdout is reserved for CSV output.
console = Console(stderr=True)


def build_run_config(ctx: click.Context, command: str, **flags: Any) -> RunConfig:
    """
    Merge the config file values with the explicit flags of a subcommand.

    Flags left at None fall back to the file, the file falls back to the
    RunConfig defaults. Validation failures become InvalidParameterError.
    File keys the command does not read are dropped with a warning, and keys
    that are neither run parameters nor settings are rejected.
    """
    values = _file_values((ctx.obj or {}).get("file_config", {}), command)
    values.update({key: value for key, value in flags.items() if value is not None})
    try:
        return RunConfig(command=command, **values)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()
        )
        raise InvalidParameterError(f"invalid parameters for {command}: {problems}")


def _file_values(file_config: dict[str, str], command: str) -> dict[str, Any]:
    allowed = COMMAND_FIELDS.get(command, frozenset(RunConfig.model_fields) - {"command"})
    values: dict[str, Any] = {}
    for key, value in file_config.items():
        if key in allowed:
            values[key] = value
        elif key in Settings.model_fields:
            continue  # applied to the settings by the group
        elif key in RunConfig.model_fields:
            logger.warning("Config key not used by command", key=key, command=command)
        else:
            raise InvalidParameterError(f"unknown config key {key!r}")
    return values


def print_success(message: str) -> None:
    """Print success message with Rich Panel and green styling."""
    panel = Panel(
        f"[green]✓[/green] {message}",
        border_style="green",
        title="[green]Success[/green]",
        title_align="left",
    )
    console.print(panel)


def print_error(message: str) -> None:
    """Print error message with Rich Panel and red styling."""
    panel = Panel(
        f"[red]✗[/red] {message}",
        border_style="red",
        title="[red]Error[/red]",
        title_align="left",
    )
    console.print(panel)


def print_info(message: str) -> None:
    panel = Panel(
        f"[blue]ℹ[/blue] {message}",
        border_style="blue",
        title="[blue]Info[/blue]",
        title_align="left",
    )
    console.print(panel)


def print_table(
    title: str,
    rows: list[dict[str, Any]],
    column_names: Optional[list[str]] = None,
) -> None:
    """
    Print structured data using Rich Table.

    Args:
        title: Title for the table
        rows: List of dictionaries representing table rows
        column_names: Optional list of column names. If not provided, uses keys from first row.
    """
    if not rows:
        console.print("[yellow]No data to display[/yellow]")
        return

    table = Table(title=title, show_header=True, header_style="bold magenta")
    if column_names is None:
        column_names = list(rows[0].keys())
    for col_name in column_names:
        table.add_column(col_name, style="cyan", no_wrap=False)
    for row in rows:
        table.add_row(*[_cell(row.get(col, "")) for col in column_names])

    console.print(table)


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)
