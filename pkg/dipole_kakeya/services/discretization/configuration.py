"""Dipole configurations at scale delta.

A configuration keeps one generating pair per direction of a maximal
delta-separated net, the delta-cells met by the pair endpoints and, per cell,
the set of net directions realized from it.
"""

import math
from typing import Optional, Sequence, Union

import numpy as np

from dipole_kakeya.exceptions import CoverageError, InvalidParameterError, UnitPairRejection
from dipole_kakeya.schemas.discretization import DipoleConfiguration
from dipole_kakeya.schemas.geometry import TWO_PI, AngularNet, Point2
from dipole_kakeya.services.dimension_estimators import grid_cells
from dipole_kakeya.services.geometry import (
    angular_distance,
    max_separated_directions,
    normalize_angles,
    pair_directions,
)
from dipole_kakeya.settings import get_settings
from dipole_kakeya.utils.decorators.validators import POSITIVE, validate_args
from dipole_kakeya.utils.logging import get_logger

logger = get_logger(__name__)

PairInput = Union[Sequence[tuple[Point2, Point2]], tuple[np.ndarray, np.ndarray]]

SECTOR_WIDTH = math.pi / 10.0

# Net directions may be served by a pair up to this many deltas away.
ASSIGNMENT_SLACK = 2.0


def pair_arrays(pairs: PairInput) -> tuple[np.ndarray, np.ndarray]:
    """(first, second) endpoint arrays from Point2 tuples or from two arrays."""
    if (
        isinstance(pairs, tuple)
        and len(pairs) == 2
        and isinstance(pairs[0], np.ndarray)
    ):
        first = np.asarray(pairs[0], dtype=np.float64).reshape(-1, 2)
        second = np.asarray(pairs[1], dtype=np.float64).reshape(-1, 2)
        if first.shape != second.shape:
            raise InvalidParameterError("pair endpoint arrays differ in shape")
        return first, second
    pairs = list(pairs)
    first = np.array([p.as_tuple() for p, _ in pairs], dtype=np.float64).reshape(-1, 2)
    second = np.array([q.as_tuple() for _, q in pairs], dtype=np.float64).reshape(-1, 2)
    return first, second


def nearest_net_index(net: AngularNet, theta: np.ndarray) -> np.ndarray:
    """Index of the net angle closest to each theta on S^1."""
    angles = np.asarray(net.angles, dtype=np.float64)
    perm = np.argsort(angles, kind="stable")
    ordered = angles[perm]
    theta = normalize_angles(np.asarray(theta, dtype=np.float64))
    hi = np.searchsorted(ordered, theta) % ordered.size
    lo = (hi - 1) % ordered.size
    pick = np.where(
        angular_distance(ordered[hi], theta) < angular_distance(ordered[lo], theta),
        hi,
        lo,
    )
    return perm[pick]


def _select_pairs(
    first: np.ndarray, second: np.ndarray, net_angles: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    m = first.shape[0]
    # Both orientations are candidates: (x, y) realizes y - x and (y, x) its antipode.
    cand_x = np.concatenate((first, second))
    cand_y = np.concatenate((second, first))
    cand_src = np.concatenate((np.arange(m), np.arange(m)))
    theta = pair_directions(cand_x, cand_y)

    rank = np.empty(2 * m, dtype=np.int64)
    lex = np.lexsort((cand_y[:, 1], cand_y[:, 0], cand_x[:, 1], cand_x[:, 0]))
    rank[lex] = np.arange(2 * m)

    order = np.lexsort((rank, theta))
    sorted_theta = theta[order]
    sorted_rank = rank[order]
    new_run = np.r_[True, np.diff(sorted_theta) > 0]
    run_start = np.maximum.accumulate(np.where(new_run, np.arange(2 * m), 0))

    idx = np.searchsorted(sorted_theta, net_angles, side="left")
    right = idx % (2 * m)
    left = run_start[(idx - 1) % (2 * m)]
    err_right = angular_distance(sorted_theta[right], net_angles)
    err_left = angular_distance(sorted_theta[left], net_angles)
    take_right = (err_right < err_left) | (
        (err_right == err_left) & (sorted_rank[right] < sorted_rank[left])
    )
    chosen = order[np.where(take_right, right, left)]
    error = np.where(take_right, err_right, err_left)
    return cand_x[chosen], cand_y[chosen], cand_src[chosen], error, theta[chosen]


@validate_args({"delta": POSITIVE})
def build_configuration(
    pairs: PairInput,
    delta: float,
    interval: Optional[tuple[float, float]] = None,
    tol: Optional[float] = None,
) -> DipoleConfiguration:
    """Collect one pair per net direction and the cells they occupy.

    Each net direction takes the pair (in either orientation) of least
    angular error, ties going to the lexicographically smaller (x, y). A
    direction left without a pair within 2 delta raises CoverageError.

    dir(C) gets e from the first endpoint of the pair chosen for e. The
    second endpoint contributes the net direction nearest to e + pi on the
    full circle; on a sector net, where e + pi is absent, it contributes e.
    """
    tol = get_settings().unit_pair_tolerance if tol is None else tol
    first, second = pair_arrays(pairs)
    if first.shape[0] == 0:
        raise InvalidParameterError("build_configuration needs at least one pair")
    dist = np.hypot(*(second - first).T)
    off = np.flatnonzero(np.abs(dist - 1.0) > tol)
    if off.size:
        raise UnitPairRejection(distance=float(dist[off[0]]), tol=tol)

    net = max_separated_directions(interval, delta)
    net_angles = np.asarray(net.angles, dtype=np.float64)
    pair_x, pair_y, source, error, _ = _select_pairs(first, second, net_angles)

    limit = ASSIGNMENT_SLACK * delta + tol
    uncovered = np.flatnonzero(error > limit)
    if uncovered.size:
        raise CoverageError(
            f"{uncovered.size} of {net_angles.size} net directions have no pair "
            f"within {ASSIGNMENT_SLACK:g} delta (worst error {float(error.max())!r} rad)"
        )

    n = net_angles.size
    endpoints = np.concatenate((pair_x, pair_y))
    cell_index, inverse = np.unique(grid_cells(endpoints, delta), axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    x_cell, y_cell = inverse[:n], inverse[n:]

    e = np.arange(n)
    if net.is_full_circle:
        y_dir = nearest_net_index(net, net_angles + math.pi)
    else:
        y_dir = e
    owner = np.concatenate((x_cell, y_cell)).astype(np.int64)
    label = np.concatenate((e, y_dir)).astype(np.int64)
    keys = np.unique(owner * n + label)
    dir_owner, dir_indices = np.divmod(keys, n)
    per_cell = np.bincount(dir_owner, minlength=cell_index.shape[0])
    dir_indptr = np.concatenate(([0], np.cumsum(per_cell)))

    config = DipoleConfiguration(
        delta=delta,
        net=net,
        pair_x=pair_x,
        pair_y=pair_y,
        pair_source=source,
        pair_error=error,
        cell_index=cell_index,
        x_cell=x_cell,
        y_cell=y_cell,
        dir_indptr=dir_indptr.astype(np.int64),
        dir_indices=dir_indices.astype(np.int64),
    )
    logger.debug(
        "Configuration built",
        delta=delta,
        net=n,
        pairs=config.n_pairs,
        cells=config.n_cells,
        worst_error=float(error.max()),
    )
    return config


def sector_configuration(
    pairs: PairInput, delta: float, low: float = 0.0, width: float = SECTOR_WIDTH
) -> DipoleConfiguration:
    """Configuration over the directions of the arc [low, low + width)."""
    if not 0.0 < width < TWO_PI:
        raise InvalidParameterError("sector width must lie in (0, 2pi)")
    return build_configuration(pairs, delta, interval=(low, width))
