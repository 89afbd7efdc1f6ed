"""Planar primitives: rotations, unit arcs, arc partitions and direction nets.

Scalar functions work on the pydantic types; the `*_batch` helpers are the
numpy column versions the constructions run on.
"""

import math
from typing import NamedTuple

import numpy as np

from dipole_kakeya.exceptions import InvalidParameterError, UnitPairRejection
from dipole_kakeya.schemas.construction import ArcArray
from dipole_kakeya.schemas.geometry import (
    TWO_PI,
    AngularNet,
    Direction,
    Point2,
    UnitArc,
)
from dipole_kakeya.settings import get_settings
from dipole_kakeya.utils.decorators.validators import POSITIVE, validate_args

# Slack when turning a ratio that should be an integer into a count.
_COUNT_EPS = 1e-9


def rotate_about(p: Point2, pivot: Point2, angle: float) -> Point2:
    """Counterclockwise rotation of p about pivot."""
    c, s = math.cos(angle), math.sin(angle)
    dx, dy = p.x - pivot.x, p.y - pivot.y
    return Point2(x=pivot.x + c * dx - s * dy, y=pivot.y + s * dx + c * dy)


def rotate_batch(
    xy: np.ndarray, pivot: np.ndarray, angle: np.ndarray | float
) -> np.ndarray:
    """Row-wise rotation of (n, 2) points about (n, 2) or (2,) pivots."""
    c, s = np.cos(angle), np.sin(angle)
    d = xy - pivot
    return pivot + np.column_stack((c * d[:, 0] - s * d[:, 1], s * d[:, 0] + c * d[:, 1]))


def arc_point_at(arc: UnitArc, s: float) -> Point2:
    """Point at arclength s from the start endpoint, moving in the sense of span."""
    tol = get_settings().geometry_tolerance
    if not (-tol <= s <= arc.length + tol):
        raise InvalidParameterError(
            f"arclength {s!r} outside [0, {arc.length!r}] for this arc"
        )
    angle = arc.start + math.copysign(s, arc.span)
    return Point2(
        x=arc.centre.x + math.cos(angle), y=arc.centre.y + math.sin(angle)
    )


def piece_count(length: np.ndarray | float, delta: float) -> np.ndarray:
    """Number of equal pieces, ceil(L / 2delta), or 1 for the trivial partition."""
    length = np.asarray(length, dtype=np.float64)
    n = np.ceil(length / (2.0 * delta) - _COUNT_EPS)
    return np.where(length > delta, np.maximum(n, 1.0), 1.0).astype(np.int64)


def _is_full_circle(span: np.ndarray) -> np.ndarray:
    return np.abs(np.abs(span) - TWO_PI) <= get_settings().geometry_tolerance


@validate_args({"delta": POSITIVE})
def partition_arc(arc: UnitArc, delta: float) -> tuple[list[Point2], list[UnitArc]]:
    """Split an arc into equal sub-arcs of length in [delta, 2*delta].

    Cut points are listed in the sense of the arc's span (clockwise for the
    negative spans the constructions use). A full circle is half-open, so it
    yields as many cut points as pieces. Arcs no longer than delta keep the
    trivial partition: the two endpoints and the arc itself.
    """
    if arc.length <= delta:
        return [arc.start_point, arc.end_point], [arc]

    n = int(piece_count(arc.length, delta))
    piece = arc.span / n
    n_points = n if arc.is_full_circle else n + 1
    points = []
    for j in range(n_points):
        angle = arc.start + j * piece
        points.append(
            Point2(x=arc.centre.x + math.cos(angle), y=arc.centre.y + math.sin(angle))
        )
    subarcs = [
        UnitArc(centre=arc.centre, start=arc.start + j * piece, span=piece)
        for j in range(n)
    ]
    return points, subarcs


class BatchPartition(NamedTuple):
    cut_points: np.ndarray
    point_owner: np.ndarray
    subarcs: ArcArray
    sub_owner: np.ndarray
    sub_start_point: np.ndarray


def partition_batch(arcs: ArcArray, delta: float) -> BatchPartition:
    """Vectorized `partition_arc` over an arc column store.

    Sub-arc j of an arc starts at the arc's cut point j; `sub_start_point`
    holds that cut point's row in `cut_points`.
    """
    if delta <= 0:
        raise InvalidParameterError("delta must be greater than 0")
    length = np.abs(arcs.span)
    n = piece_count(length, delta)
    full = _is_full_circle(arcs.span)
    n_points = np.where(full, n, n + 1)
    piece = arcs.span / n

    arc_index = np.arange(len(arcs))
    point_owner = np.repeat(arc_index, n_points)
    point_offsets = np.repeat(np.cumsum(n_points) - n_points, n_points)
    j = np.arange(point_owner.shape[0]) - point_offsets
    angle = arcs.start[point_owner] + j * piece[point_owner]
    cut_points = np.column_stack(
        (arcs.cx[point_owner] + np.cos(angle), arcs.cy[point_owner] + np.sin(angle))
    )

    sub_owner = np.repeat(arc_index, n)
    sub_offsets = np.repeat(np.cumsum(n) - n, n)
    js = np.arange(sub_owner.shape[0]) - sub_offsets
    subarcs = ArcArray(
        cx=arcs.cx[sub_owner],
        cy=arcs.cy[sub_owner],
        start=arcs.start[sub_owner] + js * piece[sub_owner],
        span=piece[sub_owner],
    )
    sub_start_point = (np.cumsum(n_points) - n_points)[sub_owner] + js
    return BatchPartition(cut_points, point_owner, subarcs, sub_owner, sub_start_point)


def predicted_cut_points(arcs: ArcArray, delta: float) -> int:
    n = piece_count(np.abs(arcs.span), delta)
    full = _is_full_circle(arcs.span)
    return int(np.sum(np.where(full, n, n + 1)))


@validate_args({"delta": POSITIVE})
def max_separated_directions(
    interval: tuple[float, float] | None, delta: float
) -> AngularNet:
    """Greedy delta-separated, delta-covering net of S^1 or of [low, low + width).

    On the full circle the sweep stops at floor(2pi/delta) angles so the wrap
    gap also stays >= delta.
    """
    if interval is None:
        low, width = 0.0, TWO_PI
    else:
        low, width = interval
    if not 0 < delta < width:
        raise InvalidParameterError(
            f"delta must lie in (0, {width!r}) for this interval"
        )
    if width >= TWO_PI:
        count = int(math.floor(TWO_PI / delta + _COUNT_EPS))
    else:
        count = int(math.ceil(width / delta - _COUNT_EPS))
    angles = [math.fmod(low + j * delta, TWO_PI) % TWO_PI for j in range(count)]
    return AngularNet(delta=delta, angles=angles, low=low, width=min(width, TWO_PI))


def unit_pair_direction(x: Point2, y: Point2, tol: float) -> Direction:
    """Direction of y - x when |y - x| = 1 within tol, else UnitPairRejection."""
    if tol < 0:
        raise InvalidParameterError("tol must be non-negative")
    dx, dy = y.x - x.x, y.y - x.y
    distance = math.hypot(dx, dy)
    if abs(distance - 1.0) > tol:
        raise UnitPairRejection(distance=distance, tol=tol)
    return Direction(theta=math.atan2(dy, dx))


def normalize_angles(theta: np.ndarray) -> np.ndarray:
    out = np.mod(theta, TWO_PI)
    return np.where(out >= TWO_PI, 0.0, out)


def angular_distance(a: np.ndarray | float, b: np.ndarray | float) -> np.ndarray:
    """Arclength distance on S^1."""
    d = np.mod(np.asarray(a) - np.asarray(b), TWO_PI)
    return np.minimum(d, TWO_PI - d)


def pair_directions(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    d = second - first
    return normalize_angles(np.arctan2(d[:, 1], d[:, 0]))


def max_circular_gap(theta: np.ndarray) -> float:
    """Largest gap between consecutive angles on S^1 (2pi for an empty set)."""
    if theta.size == 0:
        return TWO_PI
    t = np.sort(normalize_angles(theta))
    gaps = np.diff(t)
    wrap = t[0] + TWO_PI - t[-1]
    return float(max(wrap, gaps.max() if gaps.size else 0.0))
