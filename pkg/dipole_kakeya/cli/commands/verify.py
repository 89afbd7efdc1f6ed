import click

from dipole_kakeya.cli.utils import build_run_config, print_success, print_table
from dipole_kakeya.exceptions import PropertyCheckError
from dipole_kakeya.repositories.csv_repository import CsvRepository
from dipole_kakeya.services.verification import PROFILES, run_verification

CHECK_COLUMNS = ["name", "passed", "value", "bound", "detail"]


@click.command("verify-all")
@click.option(
    "--profile",
    type=click.Choice(sorted(PROFILES)),
    help="desk runs every check, smoke the quick exact ones [default: desk]",
)
@click.option("--out", help="Optional CSV with one row per check")
@click.pass_context
def verify_all(ctx, profile, out):
    """Run the acceptance checks; exits 2 when any check fails."""
    config = build_run_config(ctx, "verify-all", profile=profile, out=out)
    results = run_verification(PROFILES[config.profile])

    rows = [r.model_dump() for r in results]
    print_table(title=f"Verification ({config.profile})", rows=rows, column_names=CHECK_COLUMNS)
    if config.out is not None:
        CsvRepository().write_table(rows, CHECK_COLUMNS, config.out)

    failed = [r.name for r in results if not r.passed]
    if failed:
        raise PropertyCheckError(
            f"{len(failed)} of {len(results)} checks failed: {', '.join(failed)}"
        )
    print_success(f"All {len(results)} checks passed ({config.profile})")
