"""Four-way arc splitting: a dipole Kakeya set with upper box dimension 3/4.

An arc E of angle theta is cut at its two outer quarter points x_1, x_2. The
sub-arc E_i of angle theta/4 centred on x_i is rotated about x_i by +theta/8
and -theta/8, giving four arcs of angle theta/4; x_1, x_2 join the point set.
Repeating on every arc, seen at resolution 4^-k, each point splits with
multiplicity 2 instead of 4, so N_k ≈ 4^{3k/4}.
"""

import math
from typing import Optional

import numpy as np

from dipole_kakeya.exceptions import (
    CoverageError,
    InvalidParameterError,
    LineageError,
    ResourceCapError,
    StageMismatchError,
)
from dipole_kakeya.schemas.construction import ArcArray, ConstructionBState
from dipole_kakeya.schemas.geometry import ORIGIN, Point2, UnitArc
from dipole_kakeya.schemas.reports import SiblingStats
from dipole_kakeya.services.dimension_estimators import covering_count, sample_arcs
from dipole_kakeya.services.geometry import (
    arc_point_at,
    max_circular_gap,
    pair_directions,
    rotate_about,
    rotate_batch,
)
from dipole_kakeya.settings import get_settings
from dipole_kakeya.utils.logging import get_logger

logger = get_logger(__name__)

ROOT = -1
QUARTER_TURN = math.pi / 2.0


def split_arc_quadruple(arc: UnitArc) -> tuple[list[Point2], list[UnitArc]]:
    """P(E) = [x_1, x_2] and A(E) = [E'_1, E''_1, E'_2, E''_2]."""
    theta = arc.length
    if theta <= 0.0:
        raise InvalidParameterError("cannot split an arc of zero span")
    sign = math.copysign(1.0, arc.span)
    points: list[Point2] = []
    children: list[UnitArc] = []
    for offset in (theta / 4.0, 3.0 * theta / 4.0):
        x = arc_point_at(arc, offset)
        points.append(x)
        mid_angle = arc.start + sign * offset
        for turn in (theta / 8.0, -theta / 8.0):
            children.append(
                UnitArc(
                    centre=rotate_about(arc.centre, x, turn),
                    start=mid_angle - sign * theta / 8.0 + turn,
                    span=sign * theta / 4.0,
                )
            )
    return points, children


def initial_opposite_config(verify: bool = True) -> list[UnitArc]:
    """E_0, a pi/2-arc about the origin, and the two pi/4-arcs centred at its
    quarter points whose midpoint is the origin.

    With `verify`, the (centre, arc point) directions of the three arcs and of
    their quarter-turn copies must leave no gap wider than the sampling step.
    """
    e0 = UnitArc(centre=ORIGIN, start=math.pi / 4.0, span=math.pi / 2.0)
    arcs = [e0]
    for offset in (math.pi / 8.0, 3.0 * math.pi / 8.0):
        x = arc_point_at(e0, offset)
        towards_origin = math.atan2(-x.y, -x.x)
        arcs.append(UnitArc(centre=x, start=towards_origin - math.pi / 8.0, span=math.pi / 4.0))
    if verify:
        samples = get_settings().coverage_samples_per_arc
        config = ArcArray.from_arcs(arcs)
        gap = _centre_direction_gap(_with_quarter_turn(config), samples)
        resolution = e0.length / (samples - 1)
        if gap > resolution * (1.0 + 1e-6) + 1e-12:
            raise CoverageError(
                f"initial configuration leaves a direction gap of {gap!r} rad"
            )
    return arcs


def _with_quarter_turn(arcs: ArcArray) -> ArcArray:
    turned = rotate_batch(arcs.centres(), np.zeros(2), QUARTER_TURN)
    return ArcArray(
        cx=np.concatenate((arcs.cx, turned[:, 0])),
        cy=np.concatenate((arcs.cy, turned[:, 1])),
        start=np.concatenate((arcs.start, arcs.start + QUARTER_TURN)),
        span=np.concatenate((arcs.span, arcs.span)),
    )


def _centre_direction_gap(arcs: ArcArray, samples_per_arc: int) -> float:
    spacing = float(np.max(np.abs(arcs.span))) / (samples_per_arc - 1)
    pts = sample_arcs(arcs, spacing)
    m = np.ceil(np.abs(arcs.span) / spacing).astype(np.int64) + 1
    centres = np.repeat(arcs.centres(), m, axis=0)
    theta = pair_directions(centres, pts)
    return max_circular_gap(np.concatenate((theta, theta + math.pi)))


def _split_stage(arcs: ArcArray, pivots: np.ndarray, signs: np.ndarray, base: int):
    theta = np.abs(arcs.span)
    sense = np.sign(arcs.span)
    m = len(arcs)

    # Quarter points, two per arc, row order [x_1, x_2] per arc.
    offsets = np.stack((theta / 4.0, 3.0 * theta / 4.0), axis=1)
    mid_angle = arcs.start[:, None] + sense[:, None] * offsets
    px = arcs.cx[:, None] + np.cos(mid_angle)
    py = arcs.cy[:, None] + np.sin(mid_angle)
    points = np.column_stack((px.ravel(), py.ravel()))

    # Child arcs, row order [E'_1, E''_1, E'_2, E''_2] per arc.
    turn = np.array([1.0, -1.0])
    child_turn = (theta[:, None, None] / 8.0) * turn[None, None, :]  # (m, 2, 2)
    child_turn = np.broadcast_to(child_turn, (m, 2, 2)).reshape(-1)
    point_of_child = np.repeat(np.arange(2 * m), 2)
    parent_arc = np.repeat(np.arange(m), 4)
    centres = rotate_batch(
        arcs.centres()[parent_arc], points[point_of_child], child_turn
    )
    children = ArcArray(
        cx=centres[:, 0],
        cy=centres[:, 1],
        start=np.repeat(mid_angle.ravel(), 2)
        - sense[parent_arc] * theta[parent_arc] / 8.0
        + child_turn,
        span=arcs.span[parent_arc] / 4.0,
    )
    child_pivot = base + point_of_child
    child_sign = np.tile(turn, 2 * m).astype(np.int8)

    point_parent = np.repeat(pivots, 2)
    point_sign = np.repeat(signs, 2)
    point_cut = np.tile(np.array([0, 1], dtype=np.int8), m)
    host_centre = np.repeat(arcs.centres(), 2, axis=0)
    return (
        points,
        point_parent,
        point_sign,
        point_cut,
        host_centre,
        children,
        child_pivot,
        child_sign,
    )


def build_construction_b(n_max: int, arc_cap: Optional[int] = None) -> ConstructionBState:
    """Split every arc n_max times, starting from the opposite configuration."""
    cap = get_settings().arc_cap if arc_cap is None else arc_cap
    if n_max < 1:
        raise InvalidParameterError("n_max must be at least 1")
    if 3 * 4**n_max > cap:
        raise ResourceCapError(
            f"stage {n_max} holds {3 * 4**n_max} arcs, above the cap {cap}"
        )

    initial = initial_opposite_config()
    arcs = ArcArray.from_arcs(initial)
    pivots = np.full(len(arcs), ROOT, dtype=np.int64)
    signs = np.zeros(len(arcs), dtype=np.int8)

    pts, parents, p_signs, cuts, hosts, born = [], [], [], [], [], []
    total = 0
    for n in range(n_max):
        (points, point_parent, point_sign, point_cut, host,
         arcs, pivots, signs) = _split_stage(arcs, pivots, signs, total)
        pts.append(points)
        parents.append(point_parent)
        p_signs.append(point_sign)
        cuts.append(point_cut)
        hosts.append(host)
        born.append(np.full(points.shape[0], n + 1, dtype=np.int32))
        total += points.shape[0]
        logger.debug("Quadruple stage built", stage=n + 1, points=total, arcs=len(arcs))

    def _cat(parts, shape, dtype):
        return np.concatenate(parts) if parts else np.empty(shape, dtype=dtype)

    state = ConstructionBState(
        stage=n_max,
        arcs=arcs,
        arc_pivot=pivots,
        arc_sign=signs,
        initial_config=initial,
        points=_cat(pts, (0, 2), np.float64),
        point_stage=_cat(born, (0,), np.int32),
        point_parent=_cat(parents, (0,), np.int64),
        point_sign=_cat(p_signs, (0,), np.int8),
        point_cut=_cat(cuts, (0,), np.int8),
        point_host_centre=_cat(hosts, (0, 2), np.float64),
    )
    logger.info("Construction B built", stages=n_max, points=total, arcs=len(arcs))
    return state


def expected_point_count(n: int) -> int:
    """2 * 3 * (4^n - 1) / 3: two points per arc ever split."""
    return 2 * (4**n - 1)


def sibling_distance_stats(state: ConstructionBState, n: int) -> SiblingStats:
    """Distances among the four stage-(n+1) descendants of every stage-n point.

    Descendants pair up as (cut j of the +rotated arc, cut j of the -rotated
    arc); intra-pair distances are divided by 4^-2n, cross-pair ones by 4^-n.
    Points cut from the initial arcs have no pivot, so n = 0 yields nothing.
    """
    if n < 0:
        raise InvalidParameterError("n must be non-negative")
    if n == 0:
        return SiblingStats(n=0, intra_ratios=[], inter_ratios=[])
    if state.stage < n + 1:
        raise StageMismatchError(
            f"descendants of stage {n} need stage {n + 1}, state has {state.stage}"
        )
    parents_idx = np.flatnonzero(state.point_stage == n)
    local = np.full(state.points.shape[0], -1, dtype=np.int64)
    local[parents_idx] = np.arange(parents_idx.size)

    kids = np.flatnonzero(state.point_stage == n + 1)
    if np.any(state.point_parent[kids] < 0):
        raise LineageError(f"stage {n + 1} points are missing their pivot parent")
    slot_sign = (state.point_sign[kids] < 0).astype(np.int64)
    table = np.full((parents_idx.size, 2, 2, 2), np.nan)
    table[local[state.point_parent[kids]], slot_sign, state.point_cut[kids]] = state.points[kids]
    if np.isnan(table).any():
        raise LineageError(f"some stage-{n} points lack four descendants")

    def dist(a, b):
        return np.hypot(*(a - b).T)

    intra = np.concatenate(
        [dist(table[:, 0, j], table[:, 1, j]) for j in (0, 1)]
    ) / 4.0 ** (-2 * n)
    inter = np.concatenate(
        [dist(table[:, 0, i], table[:, 1, j]) for i in (0, 1) for j in (0, 1) if i != j]
        + [dist(table[:, s, 0], table[:, s, 1]) for s in (0, 1)]
    ) / 4.0 ** (-n)
    return SiblingStats(n=n, intra_ratios=intra.tolist(), inter_ratios=inter.tolist())


def splitting_multiplicity_count(state: ConstructionBState, k: int) -> int:
    """Grid covering count at r = 4^-k of all points born through stage k."""
    if not 0 <= k <= state.stage:
        raise StageMismatchError(f"stage {k} not available (state has {state.stage})")
    return covering_count(state.points_through(k), 4.0**-k)


def rotate_and_union(state: ConstructionBState) -> tuple[np.ndarray, ArcArray]:
    """F ∪ F' where F' is F turned by 90 degrees about the origin."""
    turned = rotate_batch(state.points, np.zeros(2), QUARTER_TURN)
    return np.concatenate((state.points, turned)), _with_quarter_turn(state.arcs)


def stage_coverage_gap(
    state: ConstructionBState, include_rotated: bool = True, samples_per_arc: int = 3
) -> float:
    """(centre, arc point) direction gap of the current arcs."""
    arcs = _with_quarter_turn(state.arcs) if include_rotated else state.arcs
    return _centre_direction_gap(arcs, samples_per_arc)


def generating_pairs(
    state: ConstructionBState, through: Optional[int] = None, include_rotated: bool = True
) -> tuple[np.ndarray, np.ndarray]:
    """(host arc centre, point) for every point born through the given stage."""
    through = state.stage if through is None else through
    mask = state.point_stage <= through
    first, second = state.point_host_centre[mask], state.points[mask]
    if include_rotated:
        origin = np.zeros(2)
        first = np.concatenate((first, rotate_batch(first, origin, QUARTER_TURN)))
        second = np.concatenate((second, rotate_batch(second, origin, QUARTER_TURN)))
    return first, second


def stage_for_scale(delta: float) -> int:
    """Smallest n whose quarter-point directions leave no net direction more
    than 2 delta away: (pi/2) 4^-(n-1) / 4 <= 2 delta."""
    if delta <= 0:
        raise InvalidParameterError("delta must be greater than 0")
    n = 1
    while (math.pi / 8.0) * 4.0 ** -(n - 1) > 2.0 * delta:
        n += 1
    return n


def pairs_for_scale(state: ConstructionBState, delta: float) -> tuple[np.ndarray, np.ndarray]:
    n = stage_for_scale(delta)
    if n > state.stage:
        raise StageMismatchError(f"scale {delta!r} needs stage {n}, state has {state.stage}")
    return generating_pairs(state, through=n)
