import click

from dipole_kakeya.cli.utils import build_run_config, print_success, print_table
from dipole_kakeya.repositories.csv_repository import CsvRepository
from dipole_kakeya.services import construction_quadruple as quad
from dipole_kakeya.services import construction_transfer as transfer
from dipole_kakeya.settings import get_settings


@click.command("construct-a")
@click.option("--k-max", type=int, help="Number of transfer stages [default: 3]")
@click.option(
    "--schedule",
    type=click.Choice(["polynomial", "doubly-exponential"]),
    default="polynomial",
    show_default=True,
    help="Scale schedule delta_k",
)
@click.option("--schedule-a", type=float, help="a in delta_k = 2^-(a k^2 + b k + offset)")
@click.option("--schedule-b", type=float, help="b in delta_k = 2^-(a k^2 + b k + offset)")
@click.option("--schedule-offset", type=float, help="offset in delta_k = 2^-(a k^2 + b k + offset)")
@click.option("--out", help="Points CSV (stage,x,y,parent) [default: construction_a.csv]")
@click.pass_context
def construct_a(ctx, k_max, schedule, schedule_a, schedule_b, schedule_offset, out):
    """Build the transfer construction and write its points."""
    settings = get_settings()
    config = build_run_config(
        ctx,
        "construct-a",
        k_max=k_max,
        schedule_a=schedule_a if schedule_a is not None else settings.schedule_a,
        schedule_b=schedule_b if schedule_b is not None else settings.schedule_b,
        schedule_offset=(
            schedule_offset if schedule_offset is not None else settings.schedule_offset
        ),
        out=out,
        point_cap=settings.point_cap,
    )
    if schedule == "doubly-exponential":
        sched = transfer.doubly_exponential_schedule(max(config.k_max, 1))
    else:
        sched = transfer.polynomial_schedule(
            max(config.k_max, 1), config.schedule_a, config.schedule_b, config.schedule_offset
        )
    state = transfer.build_construction_a(sched, config.k_max, point_cap=config.point_cap)

    target = CsvRepository().write_construction_a(state, config.out or "construction_a.csv")
    print_table(
        title="Construction A",
        rows=[
            {
                "stage": j,
                "log2 delta": sched.log2_deltas[j - 1] if j else "",
                "points": int(p.shape[0]),
            }
            for j, p in enumerate(state.points)
        ],
    )
    print_success(f"Wrote {state.all_points().shape[0]} points to {target}")


@click.command("construct-b")
@click.option("--levels", type=int, help="Number of splitting levels [default: 6]")
@click.option("--out", help="Points CSV (stage,x,y,parent) [default: construction_b.csv]")
@click.option("--lineage", help="Optional lineage CSV (index,stage,parent,sign,cut,host_x,host_y)")
@click.pass_context
def construct_b(ctx, levels, out, lineage):
    """Build the quadruple-split construction and write its points."""
    settings = get_settings()
    config = build_run_config(
        ctx, "construct-b", levels=levels, out=out, lineage=lineage, arc_cap=settings.arc_cap
    )
    state = quad.build_construction_b(config.levels, arc_cap=config.arc_cap)

    target = CsvRepository().write_construction_b(
        state, config.out or "construction_b.csv", lineage_path=config.lineage
    )
    print_table(
        title="Construction B",
        rows=[
            {
                "level": n,
                "points": int((state.point_stage == n).sum()),
                "expected total": quad.expected_point_count(n),
            }
            for n in range(1, state.stage + 1)
        ],
    )
    print_success(f"Wrote {state.points.shape[0]} points to {target}")
