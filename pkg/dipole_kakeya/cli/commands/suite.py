import click

from dipole_kakeya.cli.utils import build_run_config, print_info, print_success, print_table
from dipole_kakeya.repositories.csv_repository import CsvRepository
from dipole_kakeya.services import construction_quadruple as quad
from dipole_kakeya.services import construction_transfer as transfer
from dipole_kakeya.services.discretization import annuli_oracle_trials, suite_bands, suite_stats
from dipole_kakeya.settings import get_settings
from dipole_kakeya.utils.logging import get_logger

logger = get_logger(__name__)

# Longest schedule searched when picking the transfer stage for a scale.
SCHEDULE_HORIZON = 12

SUITE_COLUMNS = ["delta", "n_cells", "n_good", "n_bad", "n_edges", "case", "cell_exponent"]
BAND_COLUMNS = ["delta", "j", "low", "high", "cell_pairs", "common_neighbours"]


def _pair_source(config):
    """Build the smallest state that serves every requested scale."""
    if config.construction == "a":
        schedule = transfer.default_schedule(SCHEDULE_HORIZON)
        k = max(transfer.stage_for_scale(schedule, d) for d in config.deltas)
        state = transfer.build_construction_a(schedule, k)
        return lambda delta: transfer.pairs_for_scale(state, delta)
    n = max(quad.stage_for_scale(d) for d in config.deltas)
    state = quad.build_construction_b(n, arc_cap=get_settings().arc_cap)
    return lambda delta: quad.pairs_for_scale(state, delta)


@click.command("suite")
@click.option("--construction", type=click.Choice(["a", "b"]), help="Pair source [default: a]")
@click.option("--deltas", help="Comma list of scales, 2^-j accepted [default: 2^-6..2^-10]")
@click.option("--gamma", type=float, help="Good/bad threshold exponent in (0, 1/2) [default: 2/7]")
@click.option("--out", help="Stats CSV [default: stats.csv]")
@click.option("--bands", help="Optional CSV of sector-graph cell pairs per dyadic distance band")
@click.option("--no-cordoba", is_flag=True, help="Skip the maximal-operator ratio")
@click.pass_context
def suite(ctx, construction, deltas, gamma, out, bands, no_cordoba):
    """Discretization statistics of a construction, one row per scale."""
    config = build_run_config(
        ctx,
        "suite",
        construction=construction,
        deltas=deltas,
        gamma=gamma,
        out=out,
        bands=bands,
    )
    pairs_at = _pair_source(config)
    rows = [
        suite_stats(pairs_at(delta), delta, config.gamma, with_cordoba=not no_cordoba)
        for delta in config.deltas
    ]

    target = CsvRepository().write_stats(rows, config.out or "stats.csv")
    print_table(
        title=f"Suite ({config.construction}, gamma={config.gamma:.4g})",
        rows=[row.model_dump() for row in rows],
        column_names=SUITE_COLUMNS,
    )
    print_success(f"Wrote {len(rows)} rows to {target}")

    if config.bands is not None:
        band_rows = [
            {"delta": delta, **band.model_dump()}
            for delta in config.deltas
            for band in suite_bands(pairs_at(delta), delta, config.gamma)
        ]
        target = CsvRepository().write_table(band_rows, BAND_COLUMNS, config.bands)
        print_success(f"Wrote {len(band_rows)} bands to {target}")


@click.command("oracle")
@click.option("--trials", type=int, help="Number of random (d, delta) draws [default: 200]")
@click.option(
    "--mode", type=click.Choice(["two_window", "one_window"]), help="Regime to draw from"
)
@click.option("--seed", type=int, help="Seed of the draws [default: settings seed]")
@click.option("--out", help="Results CSV [default: oracle.csv]")
@click.pass_context
def oracle(ctx, trials, mode, seed, out):
    """Seeded trials of the annuli intersection cover."""
    config = build_run_config(ctx, "oracle", trials=trials, mode=mode, seed=seed, out=out)
    results = annuli_oracle_trials(config.trials, config.mode, seed=config.seed)

    target = CsvRepository().write_oracle_results(results, config.out or "oracle.csv")
    covered = sum(r.covered for r in results)
    if covered < len(results):
        logger.warning("Uncovered oracle trials", failed=len(results) - covered)
    print_info(f"{covered} of {len(results)} trials covered ({config.mode})")
    print_success(f"Wrote {len(results)} rows to {target}")
