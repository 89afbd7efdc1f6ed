import sys
from pathlib import Path
from typing import Optional, Sequence

import click

from dipole_kakeya.cli.commands.analysis import assouad, coverage, decay, dims
from dipole_kakeya.cli.commands.construct import construct_a, construct_b
from dipole_kakeya.cli.commands.suite import oracle, suite
from dipole_kakeya.cli.commands.verify import verify_all
from dipole_kakeya.cli.utils import print_error
from dipole_kakeya.exceptions import EXIT_OK, EXIT_VALIDATION, DipoleKakeyaError
from dipole_kakeya.schemas.config import load_config_file
from dipole_kakeya.settings import Settings, configure_settings, get_settings
from dipole_kakeya.utils.logging import configure_logging


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(path_type=Path, dir_okay=False),
    help="key=value file with run parameters; explicit flags win over it",
)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    help="Log level for diagnostics on stderr",
)
@click.option("--output-dir", help="Directory for relative output paths (env: DK_OUTPUT_DIR)")
@click.option("--seed", type=int, help="Seed for every randomized step")
@click.option(
    "--point-cap", type=click.IntRange(min=1), help="Refuse constructions above this many points"
)
@click.option(
    "--arc-cap", type=click.IntRange(min=1), help="Refuse constructions above this many arcs"
)
@click.pass_context
def cli(ctx, config_path, log_level, output_dir, seed, point_cap, arc_cap):
    """Dipole Kakeya CLI - build the constructions, measure them and run the checks."""
    file_config = load_config_file(config_path) if config_path else {}

    # File values that name a setting configure it; flags are applied last.
    overrides = {k: v for k, v in file_config.items() if k in Settings.model_fields}
    flags = {
        "log_level": log_level.upper() if log_level else None,
        "output_dir": output_dir,
        "seed": seed,
        "point_cap": point_cap,
        "arc_cap": arc_cap,
    }
    overrides.update({k: v for k, v in flags.items() if v is not None})
    if overrides:
        configure_settings(**overrides)
    configure_logging(get_settings().log_level)

    ctx.ensure_object(dict)
    ctx.obj["file_config"] = file_config


# Register commands
cli.add_command(construct_a)
cli.add_command(construct_b)
cli.add_command(dims)
cli.add_command(assouad)
cli.add_command(coverage)
cli.add_command(decay)
cli.add_command(suite)
cli.add_command(oracle)
cli.add_command(verify_all)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its process exit code."""
    try:
        result = cli.main(
            args=list(argv) if argv is not None else None,
            prog_name="dipole-kakeya",
            standalone_mode=False,
        )
    except click.UsageError as exc:
        exc.show()
        return EXIT_VALIDATION
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        return EXIT_VALIDATION
    except DipoleKakeyaError as exc:
        print_error(exc.detail)
        return exc.exit_code
    return result if isinstance(result, int) else EXIT_OK


def main():
    """Main entry point for CLI."""
    sys.exit(run())


if __name__ == "__main__":
    main()
