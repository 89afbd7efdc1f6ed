import math

import click

from dipole_kakeya.cli.utils import build_run_config, print_info, print_success, print_table
from dipole_kakeya.exceptions import InvalidParameterError
from dipole_kakeya.repositories.csv_repository import CsvRepository
from dipole_kakeya.schemas.geometry import Point2
from dipole_kakeya.services import construction_quadruple as quad
from dipole_kakeya.services import construction_transfer as transfer
from dipole_kakeya.services.dimension_estimators import (
    assouad_profile,
    assouad_scale_rows,
    cover_report,
    hausdorff_content_upper_bound,
)
from dipole_kakeya.settings import get_settings

COVERAGE_COLUMNS = ["stage", "delta", "gap", "gap_unrotated", "bound"]
ASSOUAD_COLUMNS = ["big_r", "r", "centres", "max_count", "mean_count", "exponent"]
DECAY_COLUMNS = [
    "k",
    "log2_delta",
    "log2_tail",
    "log2_twice_next",
    "log2_scale",
    "tail_ok",
    "next_ok",
    "predicted_slope",
    "log_content_bound",
    "cover_content",
]

# Lower bound on the Assouad dimension of the transfer construction.
ASSOUAD_TARGET = 2.0 / 3.0


@click.command("dims")
@click.option("--points", help="CSV with x and y columns")
@click.option(
    "--scales",
    help="auto-dyadic:j_min:j_max (r = 2^-j) or a comma list [default: auto-dyadic:5:12]",
)
@click.option("--origin", help="Grid origin as x,y [default: 0,0]")
@click.option("--out", help="Output CSV (r,N_r); printed to stdout when omitted")
@click.pass_context
def dims(ctx, points, scales, origin, out):
    """Grid covering counts of a point set and the fitted box slope."""
    config = build_run_config(ctx, "dims", points=points, scales=scales, origin=origin, out=out)
    if config.points is None:
        raise InvalidParameterError("dims needs --points")

    repo = CsvRepository()
    xy = repo.read_points(config.points)
    ox, oy = config.origin
    report = cover_report(xy, config.scales, origin=Point2(x=ox, y=oy))

    if config.out is None:
        click.echo(repo.render_cover_report(report), nl=False)
    else:
        target = repo.write_cover_report(report, config.out)
        print_success(f"Wrote {len(report.entries)} scales to {target}")
    if report.fitted_slope is not None:
        print_info(f"Fitted slope of log N_r against log 1/r: {report.fitted_slope:.4f}")


@click.command("assouad")
@click.option("--points", help="CSV with x and y columns")
@click.option(
    "--radii",
    help="Outer radii R as auto-dyadic:j_min:j_max or a comma list [default: auto-dyadic:2:5]",
)
@click.option("--gap", type=int, help="Inner scale r = R 2^-gap [default: 4]")
@click.option("--centres", type=int, help="Most sampled centres [default: assouad_max_centres]")
@click.option("--seed", type=int, help="Seed of the centre sample [default: settings seed]")
@click.option("--out", help="Per scale pair CSV [default: assouad.csv]")
@click.pass_context
def assouad(ctx, points, radii, gap, centres, seed, out):
    """Local covering counts N_r(B(x, R)) at sampled centres and their exponent."""
    config = build_run_config(
        ctx,
        "assouad",
        points=points,
        radii=radii,
        gap=gap,
        centres=centres,
        seed=seed,
        out=out,
    )
    if config.points is None:
        raise InvalidParameterError("assouad needs --points")

    repo = CsvRepository()
    xy = repo.read_points(config.points)
    pairs = [(big_r, big_r * 2.0**-config.gap) for big_r in config.radii]
    profile = assouad_profile(xy, pairs, seed=config.seed, max_centres=config.centres)
    rows = [row.model_dump() for row in assouad_scale_rows(profile)]

    print_table(title="Assouad profile", rows=rows, column_names=ASSOUAD_COLUMNS)
    target = repo.write_table(rows, ASSOUAD_COLUMNS, config.out or "assouad.csv")
    print_success(f"Wrote {len(rows)} scale pairs to {target}")
    print_info(
        f"Exponent estimate {profile.exponent_estimate:.4f} "
        f"(lower bound for the transfer construction: {ASSOUAD_TARGET:.4f})"
    )


@click.command("coverage")
@click.option(
    "--construction", type=click.Choice(["a", "b"]), help="Which construction [default: a]"
)
@click.option("--k-max", type=int, help="Transfer stages for construction a")
@click.option("--levels", type=int, help="Splitting levels for construction b")
@click.option("--out", help="Optional CSV of the per-stage gaps")
@click.pass_context
def coverage(ctx, construction, k_max, levels, out):
    """Per-stage direction coverage gaps."""
    config = build_run_config(
        ctx, "coverage", construction=construction, k_max=k_max, levels=levels, out=out
    )
    rows = []
    if config.construction == "a":
        if config.k_max < 1:
            raise InvalidParameterError("coverage needs at least one transfer stage")
        state = transfer.build_construction_a(transfer.default_schedule(config.k_max), config.k_max)
        for k in range(1, config.k_max + 1):
            delta = state.schedule.delta(k)
            rows.append(
                {
                    "stage": k,
                    "delta": delta,
                    "gap": transfer.direction_density_gap(state, k),
                    "gap_unrotated": "",
                    "bound": 2.0 * delta,
                }
            )
    else:
        # Gaps depend on the live arcs of each level, so each level is rebuilt.
        for n in range(1, config.levels + 1):
            state = quad.build_construction_b(n)
            rows.append(
                {
                    "stage": n,
                    "delta": (math.pi / 2.0) * 4.0**-n,
                    "gap": quad.stage_coverage_gap(state),
                    "gap_unrotated": quad.stage_coverage_gap(state, include_rotated=False),
                    "bound": 0.5 * (math.pi / 2.0) * 4.0**-n,
                }
            )

    print_table(title=f"Direction coverage ({config.construction})", rows=rows)
    if config.out is not None:
        target = CsvRepository().write_table(rows, COVERAGE_COLUMNS, config.out)
        print_success(f"Wrote {len(rows)} rows to {target}")


@click.command("decay")
@click.option("--k-max", type=int, help="Length of the scale schedule [default: 3]")
@click.option(
    "--schedule",
    type=click.Choice(["polynomial", "doubly-exponential"]),
    default="polynomial",
    show_default=True,
    help="Scale schedule delta_k",
)
@click.option("--exponent", type=float, help="s of the Hausdorff content bound [default: 0.5]")
@click.option(
    "--cover",
    is_flag=True,
    help="Also build construction a to stage k_max - 1 and sum its explicit ball cover",
)
@click.option("--out", help="Optional CSV with one row per k")
@click.pass_context
def decay(ctx, k_max, schedule, exponent, cover, out):
    """Tail decay, finite-k slope and Hausdorff content bound per stage."""
    settings = get_settings()
    config = build_run_config(
        ctx,
        "decay",
        k_max=k_max,
        schedule_a=settings.schedule_a,
        schedule_b=settings.schedule_b,
        schedule_offset=settings.schedule_offset,
        exponent=exponent,
        out=out,
        point_cap=settings.point_cap,
    )
    if config.k_max < 2:
        raise InvalidParameterError("decay needs a schedule of at least two scales")
    if schedule == "doubly-exponential":
        sched = transfer.doubly_exponential_schedule(config.k_max)
    else:
        sched = transfer.polynomial_schedule(
            config.k_max, config.schedule_a, config.schedule_b, config.schedule_offset
        )
    state = None
    if cover:
        state = transfer.build_construction_a(sched, config.k_max - 1, point_cap=config.point_cap)

    rows = []
    for k in range(1, config.k_max):
        tail = transfer.fast_decay_report(sched, k)
        bound = hausdorff_content_upper_bound(sched, config.exponent, k)
        rows.append(
            {
                "k": k,
                "log2_delta": sched.log2_deltas[k - 1],
                "log2_tail": tail.log2_tail,
                "log2_twice_next": tail.log2_twice_next,
                "log2_scale": tail.log2_scale,
                "tail_ok": tail.tail_ok,
                "next_ok": tail.next_ok,
                "predicted_slope": transfer.predicted_lower_slope(sched, k),
                "log_content_bound": bound.log_value,
                "cover_content": (
                    transfer.hausdorff_cover(state, k).content(config.exponent)
                    if state is not None
                    else ""
                ),
            }
        )

    print_table(title=f"Schedule decay ({schedule}, s={config.exponent:.4g})", rows=rows)
    if config.out is not None:
        target = CsvRepository().write_table(rows, DECAY_COLUMNS, config.out)
        print_success(f"Wrote {len(rows)} rows to {target}")
