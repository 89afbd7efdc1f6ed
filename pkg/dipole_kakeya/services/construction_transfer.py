"""Iterated arc transfer: a dipole Kakeya set with lower box dimension <= 2/3.

Starting from the unit circle around the origin, every arc of stage k is cut
into pieces of length in [delta_{k+1}, 2 delta_{k+1}]; each piece is moved to
pivot around its first cut point while starting at the old centre, which keeps
the set of unit directions it spans. The cut points form P_{k+1} and the moved
pieces form A_{k+1}.
"""

import math
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from dipole_kakeya.exceptions import (
    InvalidParameterError,
    ResourceCapError,
    StageMismatchError,
)
from dipole_kakeya.schemas.construction import ArcArray, ConstructionAState, Schedule
from dipole_kakeya.schemas.geometry import TWO_PI, ORIGIN, Point2, UnitArc
from dipole_kakeya.schemas.reports import (
    CellCoverRow,
    FastDecayReport,
    HausdorffCover,
    RecursionReport,
)
from dipole_kakeya.services.dimension_estimators import coverage_gap, covering_count
from dipole_kakeya.services.geometry import (
    partition_arc,
    partition_batch,
    piece_count,
    predicted_cut_points,
)
from dipole_kakeya.settings import get_settings
from dipole_kakeya.utils.decorators.validators import POSITIVE, validate_args
from dipole_kakeya.utils.logging import get_logger

logger = get_logger(__name__)

# Initial circle, traversed clockwise so every partition lists points clockwise.
INITIAL_CIRCLE = UnitArc(centre=ORIGIN, start=0.0, span=-TWO_PI)

_QUERY_CHUNK = 1 << 20
_STREAM_POINTS = 1 << 22


def polynomial_schedule(
    k_max: int, a: float = 1.0, b: float = 0.0, offset: float = 2.0
) -> Schedule:
    """delta_k = 2^-(a k^2 + b k + offset), k = 1..k_max."""
    if k_max < 1:
        raise InvalidParameterError("a schedule needs at least one scale")
    return Schedule(
        log2_deltas=[-(a * k * k + b * k + offset) for k in range(1, k_max + 1)],
        kind="polynomial",
        a=a,
        b=b,
        offset=offset,
    )


def doubly_exponential_schedule(k_max: int) -> Schedule:
    """delta_k = 2^-(2^(k^2)); only usable in log space past k = 2."""
    if k_max < 1:
        raise InvalidParameterError("a schedule needs at least one scale")
    return Schedule(
        log2_deltas=[-float(2 ** (k * k)) for k in range(1, k_max + 1)],
        kind="doubly_exponential",
    )


def default_schedule(k_max: int) -> Schedule:
    settings = get_settings()
    return polynomial_schedule(
        k_max, settings.schedule_a, settings.schedule_b, settings.schedule_offset
    )


@validate_args({"delta": POSITIVE})
def transfer_arcs(arc: UnitArc, delta: float) -> tuple[list[Point2], list[UnitArc]]:
    """P(E, delta) and A(E, delta) for a single arc.

    Piece i (from cut point e_i to e_{i+1}) becomes the arc centred at e_i that
    starts at the centre e of E and turns through the same signed angle, so
    {p - e_i : p on the new arc} = {q - e : q on the piece} up to sign.

    Turning counterclockwise regardless of the piece's sense preserves the
    directions only when the pivot is the far cut point e_{i+1}; pivoting at
    e_i with a counterclockwise turn reflects them.
    """
    points, pieces = partition_arc(arc, delta)
    moved = []
    for i, piece in enumerate(pieces):
        pivot = points[i]
        moved.append(
            UnitArc(
                centre=pivot,
                start=math.atan2(arc.centre.y - pivot.y, arc.centre.x - pivot.x),
                span=piece.span,
            )
        )
    return points, moved


def _transfer_stage(arcs: ArcArray, arc_pivot: np.ndarray, delta: float, base: int):
    part = partition_batch(arcs, delta)
    cut = part.cut_points
    pivots = cut[part.sub_start_point]
    moved = ArcArray(
        cx=pivots[:, 0].copy(),
        cy=pivots[:, 1].copy(),
        start=part.subarcs.start + math.pi,
        span=part.subarcs.span,
    )
    centres = arcs.centres()[part.point_owner]
    parents = arc_pivot[part.point_owner]
    return cut, moved, centres, parents, base + part.sub_start_point


def _predicted_point_total(schedule: Schedule, k_max: int) -> float:
    return sum(2.0 ** -v for v in schedule.log2_deltas[:k_max])


def build_construction_a(
    schedule: Schedule, k_max: int, point_cap: Optional[int] = None
) -> ConstructionAState:
    """Run the transfer for k_max stages.

    Generating pairs (centre of each partitioned arc, each of its cut points)
    are stored explicitly so later consumers see exact unit distances.
    """
    settings = get_settings()
    cap = settings.point_cap if point_cap is None else point_cap
    if k_max < 0:
        raise InvalidParameterError("k_max must be non-negative")
    if len(schedule) < k_max:
        raise InvalidParameterError(
            f"schedule has {len(schedule)} scales, {k_max} stages requested"
        )
    predicted = _predicted_point_total(schedule, k_max)
    if predicted > cap:
        raise ResourceCapError(
            f"predicted point count {predicted:.3g} exceeds the cap {cap}"
        )

    arcs = ArcArray.from_arcs([INITIAL_CIRCLE])
    points = [np.zeros((1, 2))]
    parents = [np.full(1, -1, dtype=np.int64)]
    arc_pivot = np.zeros(1, dtype=np.int64)
    history = [arcs]
    firsts, seconds, stages = [], [], []
    total = 1
    for k in range(1, k_max + 1):
        delta = schedule.delta(k)
        upcoming = predicted_cut_points(arcs, delta)
        if total + upcoming > cap:
            raise ResourceCapError(
                f"stage {k} would hold {total + upcoming} points, above the cap {cap}"
            )
        cut, arcs, centres, point_parent, arc_pivot = _transfer_stage(
            arcs, arc_pivot, delta, total
        )
        points.append(cut)
        parents.append(point_parent)
        history.append(arcs)
        firsts.append(centres)
        seconds.append(cut)
        stages.append(np.full(cut.shape[0], k, dtype=np.int32))
        total += cut.shape[0]
        logger.debug(
            "Transfer stage built", stage=k, points=cut.shape[0], arcs=len(arcs)
        )

    empty = np.empty((0, 2))
    state = ConstructionAState(
        stage=k_max,
        schedule=schedule,
        points=points,
        arcs=arcs,
        arc_history=history,
        pair_first=np.concatenate(firsts) if firsts else empty,
        pair_second=np.concatenate(seconds) if seconds else empty.copy(),
        pair_stage=np.concatenate(stages) if stages else np.empty(0, dtype=np.int32),
        point_parent=parents,
    )
    logger.info("Construction A built", stages=k_max, points=total)
    return state


def containment_check(state: ConstructionAState, k: int) -> float:
    """max over p in P_{k+1} of dist(p, P_{k-1}); should not exceed 2 delta_k."""
    if not 1 <= k <= state.stage - 1:
        raise StageMismatchError(
            f"containment at k={k} needs 1 <= k <= {state.stage - 1}"
        )
    tree = cKDTree(state.points[k - 1])
    target = state.points[k + 1]
    worst = 0.0
    for i in range(0, target.shape[0], _QUERY_CHUNK):
        dist, _ = tree.query(target[i : i + _QUERY_CHUNK], k=1)
        worst = max(worst, float(dist.max()))
    return worst


def containment_check_streaming(state: ConstructionAState, k: int) -> float:
    """`containment_check` without storing P_{k+1}; admits k = stage.

    A_k is cut at delta_{k+1} chunk by chunk. The distance to P_{k-1} is
    1-Lipschitz along an arc, so an arc of length L whose endpoints sit at
    distances f0 and f1 holds no cut point beyond (L + f0 + f1) / 2; arcs whose
    bound cannot beat the running maximum are never cut.
    """
    if not 1 <= k <= state.stage:
        raise StageMismatchError(f"containment at k={k} needs 1 <= k <= {state.stage}")
    if len(state.schedule) < k + 1:
        raise StageMismatchError(f"containment at k={k} needs delta_{k + 1} in the schedule")
    arcs = state.arc_history[k]
    delta = state.schedule.delta(k + 1)
    tree = cKDTree(state.points[k - 1])

    # Endpoints are cut points of every partition, so they seed the maximum.
    f0, _ = tree.query(arcs.start_points(), k=1)
    f1, _ = tree.query(arcs.end_points(), k=1)
    worst = float(max(f0.max(), f1.max()))
    upper = 0.5 * (np.abs(arcs.span) + f0 + f1) + get_settings().geometry_tolerance
    order = np.argsort(-upper, kind="stable")
    upper_desc = upper[order]
    cost = np.cumsum(piece_count(np.abs(arcs.span[order]), delta) + 1)

    i, scanned = 0, 0
    while True:
        live = int(np.searchsorted(-upper_desc, -worst, side="left"))
        if i >= live:
            break
        done = cost[i - 1] if i else 0
        j = int(np.searchsorted(cost, done + _STREAM_POINTS, side="right"))
        j = min(max(j, i + 1), live)
        part = partition_batch(arcs.take(order[i:j]), delta)
        dist, _ = tree.query(part.cut_points, k=1)
        worst = max(worst, float(dist.max()))
        scanned += j - i
        i = j
    logger.debug(
        "Streamed containment", k=k, arcs=len(arcs), cut_arcs=scanned, worst=worst
    )
    return worst


def predicted_lower_slope(schedule: Schedule, k: int) -> float:
    """log(delta_{k-1} delta_k) / ((3/2) log delta_k), delta_0 = 1."""
    if not 1 <= k <= len(schedule):
        raise InvalidParameterError(f"k={k} outside the schedule")
    prev = schedule.log2_deltas[k - 2] if k >= 2 else 0.0
    cur = schedule.log2_deltas[k - 1]
    return (prev + cur) / (1.5 * cur)


def covering_recursion_check(
    state: ConstructionAState,
    k: int,
    r: Optional[float] = None,
    constant: float = 1.0,
) -> RecursionReport:
    """N_r of P_0 ∪ ... ∪ P_{k+1} at r = delta_k^{3/2} against C delta_{k-1}^-1 delta_k^-1."""
    if state.stage < k + 1 or k < 1:
        raise StageMismatchError(
            f"covering recursion at k={k} needs stage >= {k + 1}, state has {state.stage}"
        )
    schedule = state.schedule
    if r is None:
        r = schedule.delta(k) ** 1.5
    if r < get_settings().min_cover_scale:
        raise InvalidParameterError(f"scale r={r!r} is below the float resolution guard")
    n_r = covering_count(state.all_points(k + 1), r)
    prev = schedule.delta(k - 1) if k >= 2 else 1.0
    unit = 1.0 / (prev * schedule.delta(k))
    report = RecursionReport(
        k=k,
        r=r,
        n_r=n_r,
        unit_bound=unit,
        bound=constant * unit,
        slope=math.log(n_r) / math.log(1.0 / r),
        predicted_slope=predicted_lower_slope(schedule, k),
    )
    logger.debug("Covering recursion", k=k, n_r=n_r, bound=report.bound)
    return report


def direction_density_gap(state: ConstructionAState, k: int) -> float:
    """Coverage gap of the generating pairs produced through stage k."""
    if not 1 <= k <= state.stage:
        raise StageMismatchError(f"stage {k} not available (state has {state.stage})")
    first, second = state.pairs_through(k)
    return coverage_gap(first, second)


def fast_decay_report(schedule: Schedule, k: int) -> FastDecayReport:
    """Tail check sum_{i>=k+1} delta_i <= 2 delta_{k+1} <= delta_k^{3/2} (finite tail)."""
    if not 1 <= k < len(schedule):
        raise InvalidParameterError(f"k={k} needs delta_{k + 1} in the schedule")
    log2 = schedule.log2_deltas
    ln2 = math.log(2.0)
    tail = np.logaddexp.reduce(np.array(log2[k:]) * ln2) / ln2
    twice_next = 1.0 + log2[k]
    scale = 1.5 * log2[k - 1]
    return FastDecayReport(
        k=k,
        log2_tail=float(tail),
        log2_twice_next=twice_next,
        log2_scale=scale,
        tail_ok=bool(tail <= twice_next + 1e-12),
        next_ok=bool(twice_next <= scale + 1e-12),
    )


def hausdorff_cover(state: ConstructionAState, k: int) -> HausdorffCover:
    """Ball cover behind the content bound: P_0..P_{k-1} at 3 delta_k, P_k at 3 delta_{k+1}."""
    if not 1 <= k <= state.stage or len(state.schedule) < k + 1:
        raise StageMismatchError(f"cover at k={k} needs stage >= {k} and delta_{k + 1}")
    early = sum(p.shape[0] for p in state.points[:k])
    return HausdorffCover(
        k=k,
        rows=[
            CellCoverRow(count=early, radius=3.0 * state.schedule.delta(k)),
            CellCoverRow(
                count=state.points[k].shape[0], radius=3.0 * state.schedule.delta(k + 1)
            ),
        ],
    )


def stage_for_scale(schedule: Schedule, delta: float) -> int:
    """Smallest k with delta_k <= 2 delta: pairs through stage k are then close
    enough to every direction of a delta-net."""
    for k, log2 in enumerate(schedule.log2_deltas, start=1):
        if 2.0**log2 <= 2.0 * delta:
            return k
    raise InvalidParameterError(f"schedule never reaches 2 * delta = {2.0 * delta!r}")


def pairs_for_scale(state: ConstructionAState, delta: float) -> tuple[np.ndarray, np.ndarray]:
    k = stage_for_scale(state.schedule, delta)
    if k > state.stage:
        raise StageMismatchError(f"scale {delta!r} needs stage {k}, state has {state.stage}")
    return state.pairs_through(k)
