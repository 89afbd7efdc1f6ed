"""Covering numbers and the dimension functionals built on them.

All counts are taken on the integer grid of side r anchored at `origin`:
cell (floor((x - ox) / r), floor((y - oy) / r)). A grid count is within a
bounded constant factor of the minimal cover by side-r squares, which is all
the approximate (≈, ≲) statements need.
"""

import math
from typing import Iterable, Literal, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import logsumexp

from dipole_kakeya.exceptions import InvalidParameterError, UnitPairRejection
from dipole_kakeya.schemas.construction import ArcArray, Schedule
from dipole_kakeya.schemas.geometry import ORIGIN, Point2
from dipole_kakeya.schemas.reports import (
    AssouadProfile,
    AssouadSample,
    AssouadScaleRow,
    CoverEntry,
    CoverReport,
    HausdorffBound,
)
from dipole_kakeya.services.geometry import max_circular_gap, pair_directions
from dipole_kakeya.settings import get_settings
from dipole_kakeya.utils.decorators.validators import POSITIVE, validate_args
from dipole_kakeya.utils.logging import get_logger

logger = get_logger(__name__)

_CELL_LIMIT = 2.0**62
_CHUNK = 1 << 22
LN2 = math.log(2.0)


def sample_arcs(arcs: ArcArray, spacing: float) -> np.ndarray:
    """Points along every arc at arclength spacing <= `spacing`, endpoints included."""
    if len(arcs) == 0:
        return np.empty((0, 2))
    length = np.abs(arcs.span)
    m = np.ceil(length / spacing).astype(np.int64) + 1
    owner = np.repeat(np.arange(len(arcs)), m)
    offsets = np.repeat(np.cumsum(m) - m, m)
    j = np.arange(owner.shape[0]) - offsets
    step = arcs.span / (m - 1)
    angle = arcs.start[owner] + j * step[owner]
    return np.column_stack(
        (arcs.cx[owner] + np.cos(angle), arcs.cy[owner] + np.sin(angle))
    )


def grid_cells(points: np.ndarray, r: float, origin: Point2 = ORIGIN) -> np.ndarray:
    """(floor((x - ox) / r), floor((y - oy) / r)) per row, as int64."""
    scaled = np.floor((points - np.array([origin.x, origin.y])) / r)
    if scaled.size and np.max(np.abs(scaled)) >= _CELL_LIMIT:
        raise InvalidParameterError(
            f"grid index overflow at r={r!r}; coordinates too large for this scale"
        )
    return scaled.astype(np.int64)


def occupied_cells(points: np.ndarray, r: float, origin: Point2 = ORIGIN) -> np.ndarray:
    """Distinct (ix, iy) grid cells hit by the points, sorted lexicographically."""
    if points.shape[0] == 0:
        return np.empty((0, 2), dtype=np.int64)
    chunks = [
        np.unique(grid_cells(points[i : i + _CHUNK], r, origin), axis=0)
        for i in range(0, points.shape[0], _CHUNK)
    ]
    if len(chunks) == 1:
        return chunks[0]
    return np.unique(np.concatenate(chunks, axis=0), axis=0)


def _count_distinct(cells: np.ndarray) -> int:
    lo = cells.min(axis=0)
    span = cells.max(axis=0) - lo + 1
    if float(span[0]) * float(span[1]) < _CELL_LIMIT:
        keys = (cells[:, 0] - lo[0]) * span[1] + (cells[:, 1] - lo[1])
        return int(np.unique(keys).size)
    return int(np.unique(cells, axis=0).shape[0])


@validate_args({"r": POSITIVE})
def covering_count(
    points: np.ndarray,
    r: float,
    arcs: Optional[ArcArray] = None,
    origin: Point2 = ORIGIN,
) -> int:
    """Number of side-r grid cells meeting the points (and the sampled arcs)."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if arcs is not None and len(arcs):
        spacing = r * get_settings().arc_sample_fraction
        pts = np.concatenate((pts, sample_arcs(arcs, spacing)), axis=0)
    if pts.shape[0] == 0:
        return 0

    # Per-chunk distinct keys, then a union over chunks.
    parts = []
    for i in range(0, pts.shape[0], _CHUNK):
        parts.append(np.unique(grid_cells(pts[i : i + _CHUNK], r, origin), axis=0))
    cells = parts[0] if len(parts) == 1 else np.concatenate(parts, axis=0)
    return _count_distinct(cells)


def cover_report(
    points: np.ndarray,
    scales: Iterable[float],
    arcs: Optional[ArcArray] = None,
    origin: Point2 = ORIGIN,
    fit_range: Optional[tuple[int, int]] = None,
) -> CoverReport:
    scales = sorted(set(float(r) for r in scales), reverse=True)
    entries = [
        CoverEntry(r=r, n_r=covering_count(points, r, arcs=arcs, origin=origin))
        for r in scales
    ]
    report = CoverReport(entries=entries, fit_range=fit_range)
    if len(entries) >= 3:
        report.fitted_slope = box_dimension_fit(
            report, mode="lower" if fit_range else "upper"
        )
    logger.debug("Cover report computed", scales=len(entries))
    return report


def dyadic_scales(j_min: int, j_max: int) -> list[float]:
    """r = 2^-j for j = j_min..j_max."""
    if j_max < j_min:
        raise InvalidParameterError("dyadic scale range is empty")
    return [2.0**-j for j in range(j_min, j_max + 1)]


def box_dimension_fit(
    report: CoverReport,
    mode: Literal["lower", "upper"] = "upper",
    indices: Optional[Sequence[int]] = None,
) -> float:
    """Least-squares slope of log N_r against log(1/r).

    `upper` fits every scale. `lower` fits only a designated scale subsequence:
    `indices` when given, otherwise the report's `fit_range`. No liminf is ever
    claimed; the caller picks the subsequence.
    """
    if len(report.entries) < 3:
        raise InvalidParameterError("box_dimension_fit needs at least 3 entries")
    if mode == "lower":
        if indices is None:
            if report.fit_range is None:
                raise InvalidParameterError(
                    "lower mode needs designated indices or a fit_range"
                )
            indices = range(*report.fit_range)
        chosen = [report.entries[i] for i in indices]
    else:
        chosen = report.entries
    if len(chosen) < 2:
        raise InvalidParameterError("fit needs at least two scales")

    x = np.log([1.0 / e.r for e in chosen])
    y = np.log([max(e.n_r, 1) for e in chosen])
    if np.ptp(x) == 0:
        raise InvalidParameterError("degenerate fit: all scales coincide")
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def dyadic_scale_pairs(j_values: Iterable[int], m: int) -> list[tuple[float, float]]:
    """(R, r) = (2^-j, 2^-(j+m))."""
    if m < 1:
        raise InvalidParameterError("scale gap m must be at least 1")
    return [(2.0**-j, 2.0 ** -(j + m)) for j in j_values]


def _local_counts(
    tree: cKDTree, pts: np.ndarray, centres: np.ndarray, big_r: float, r: float
) -> np.ndarray:
    """N_r(B(x, R) ∩ F) for every centre x, 0 for empty balls."""
    neighbours = tree.query_ball_point(centres, big_r)
    sizes = np.fromiter((len(n) for n in neighbours), dtype=np.int64, count=len(neighbours))
    total = np.cumsum(sizes)
    counts = np.zeros(len(neighbours), dtype=np.int64)
    start = 0
    while start < len(neighbours):
        done = total[start - 1] if start else 0
        stop = int(np.searchsorted(total, done + _CHUNK, side="right"))
        stop = min(max(stop, start + 1), len(neighbours))
        if total[stop - 1] > done:
            idx = np.concatenate(
                [np.asarray(n, dtype=np.int64) for n in neighbours[start:stop]]
            )
            owner = np.repeat(np.arange(stop - start), sizes[start:stop])
            keyed = np.unique(np.column_stack((owner, grid_cells(pts[idx], r))), axis=0)
            counts[start:stop] = np.bincount(keyed[:, 0], minlength=stop - start)
        start = stop
    return counts


def assouad_profile(
    points: np.ndarray,
    scale_pairs: Sequence[tuple[float, float]],
    sample_centres: Optional[np.ndarray] = None,
    seed: Optional[int] = None,
    max_centres: Optional[int] = None,
) -> AssouadProfile:
    """Local covering counts N_r(B(x, R) ∩ F) and the worst exponent seen.

    Centres default to a seeded random subset of the set itself (at most
    `max_centres`, else `assouad_max_centres`). Balls that contain no point are
    skipped and counted. Each scale pair takes one ball query over all centres.
    """
    settings = get_settings()
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    for big_r, r in scale_pairs:
        if not 0 < r < big_r:
            raise InvalidParameterError(f"scale pair requires 0 < r < R, got ({big_r}, {r})")
    if sample_centres is None:
        rng = np.random.default_rng(settings.seed if seed is None else seed)
        cap = settings.assouad_max_centres if max_centres is None else max_centres
        take = min(pts.shape[0], cap)
        sample_centres = pts[np.sort(rng.choice(pts.shape[0], size=take, replace=False))]
    centres = np.asarray(sample_centres, dtype=np.float64).reshape(-1, 2)
    if not scale_pairs or centres.shape[0] == 0:
        return AssouadProfile(samples=[], exponent_estimate=0.0)

    tree = cKDTree(pts)
    counts = np.column_stack(
        [_local_counts(tree, pts, centres, big_r, r) for big_r, r in scale_pairs]
    )
    samples: list[AssouadSample] = []
    exponent = 0.0
    for centre, row in zip(centres, counts):
        x = Point2(x=float(centre[0]), y=float(centre[1]))
        for (big_r, r), local in zip(scale_pairs, row):
            if local == 0:
                continue
            samples.append(AssouadSample(x=x, big_r=big_r, r=r, local_count=int(local)))
            exponent = max(exponent, math.log(local) / math.log(big_r / r))
    skipped = int((counts == 0).sum())
    if skipped:
        logger.warning("Empty balls skipped in Assouad profile", skipped=skipped)
    return AssouadProfile(samples=samples, exponent_estimate=exponent, skipped_empty=skipped)


def assouad_scale_rows(profile: AssouadProfile) -> list[AssouadScaleRow]:
    """Per (R, r): centres with a nonempty ball, their largest and mean count."""
    grouped: dict[tuple[float, float], list[int]] = {}
    for sample in profile.samples:
        grouped.setdefault((sample.big_r, sample.r), []).append(sample.local_count)
    return [
        AssouadScaleRow(
            big_r=big_r,
            r=r,
            centres=len(found),
            max_count=max(found),
            mean_count=float(np.mean(found)),
            exponent=math.log(max(found)) / math.log(big_r / r),
        )
        for (big_r, r), found in grouped.items()
    ]


def _log2_deltas(schedule: Schedule | Sequence[float]) -> list[float]:
    if isinstance(schedule, Schedule):
        return list(schedule.log2_deltas)
    return [float(v) for v in schedule]


@validate_args({"s": POSITIVE, "k": {"required": True, "min": {"value": 1}}})
def hausdorff_content_upper_bound(
    schedule: Schedule | Sequence[float], s: float, k: int
) -> HausdorffBound:
    """(sum_{i<=k-1} delta_i^-1) * delta_k^s + delta_k^-1 * delta_{k+1}^s, in log space.

    `schedule` is a Schedule or a raw list of log2(delta_i), which lets
    non-decreasing test sequences through.
    """
    log2 = _log2_deltas(schedule)
    if len(log2) < k + 1:
        raise InvalidParameterError(
            f"schedule needs at least {k + 1} entries for k={k}, has {len(log2)}"
        )
    ln = [v * LN2 for v in log2]
    ln_k, ln_next = ln[k - 1], ln[k]
    terms = [-ln_k + s * ln_next]
    if k >= 2:
        ln_sum = float(logsumexp([-v for v in ln[: k - 1]]))
        terms.append(ln_sum + s * ln_k)
    log_value = float(logsumexp(terms))
    value = math.exp(log_value) if log_value < 700 else math.inf
    return HausdorffBound(k=k, s=s, log_value=log_value, value=value)


def coverage_gap(
    first: np.ndarray, second: np.ndarray, tol: Optional[float] = None
) -> float:
    """Largest angular gap of the pair directions after antipodal doubling."""
    first = np.asarray(first, dtype=np.float64).reshape(-1, 2)
    second = np.asarray(second, dtype=np.float64).reshape(-1, 2)
    if first.shape[0] == 0:
        raise InvalidParameterError("coverage_gap needs at least one pair")
    tol = get_settings().unit_pair_tolerance if tol is None else tol
    dist = np.hypot(*(second - first).T)
    bad = np.flatnonzero(np.abs(dist - 1.0) > tol)
    if bad.size:
        raise UnitPairRejection(distance=float(dist[bad[0]]), tol=tol)
    theta = pair_directions(first, second)
    return max_circular_gap(np.concatenate((theta, theta + math.pi)))
