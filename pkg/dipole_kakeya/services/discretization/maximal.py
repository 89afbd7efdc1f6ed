"""Discretized Kakeya maximal operator on unions of delta-cells.

For a direction s the tube T(s, x) is a 1 x delta rectangle with long side
along s. The sup over x of area(T ∩ supp f) / delta is approximated on a
slab grid: each cell's area is split exactly across width-delta slabs
perpendicular to s (the projection of a square is the sum of two uniform
variables), cells fall in length-1 windows along s by their centre, and two
grid offsets are tried on each axis.
"""

import math

import numpy as np

from dipole_kakeya.exceptions import InvalidParameterError
from dipole_kakeya.schemas.discretization import MaximalValue
from dipole_kakeya.schemas.geometry import TWO_PI, AngularNet
from dipole_kakeya.utils.decorators.validators import POSITIVE, validate_args
from dipole_kakeya.utils.logging import get_logger

logger = get_logger(__name__)

MAX_DIAMETER = 4.0
OFFSETS = (0.0, 0.5)


def _ramp(x: np.ndarray) -> np.ndarray:
    return 0.5 * np.maximum(x, 0.0) ** 2


def projected_square_cdf(z: np.ndarray, a: float, b: float) -> np.ndarray:
    """CDF of U1 + U2, U1 ~ U[-a/2, a/2], U2 ~ U[-b/2, b/2], a >= b >= 0."""
    if b <= 1e-12 * a:
        return np.clip(z / a + 0.5, 0.0, 1.0)
    p, q = 0.5 * (a + b), 0.5 * (a - b)
    value = (_ramp(z + p) - _ramp(z + q) - _ramp(z - q) + _ramp(z - p)) / (a * b)
    return np.clip(value, 0.0, 1.0)


def _direction_value(centres: np.ndarray, delta: float, theta: float) -> float:
    ux, uy = math.cos(theta), math.sin(theta)
    nx, ny = -uy, ux
    a, b = sorted((delta * abs(nx), delta * abs(ny)), reverse=True)
    w = centres[:, 0] * nx + centres[:, 1] * ny
    t = centres[:, 0] * ux + centres[:, 1] * uy

    best = 0.0
    for w_off in OFFSETS:
        base = np.floor(w / delta - w_off).astype(np.int64)
        # Half the projected width is at most delta / sqrt(2), so three slabs suffice.
        slab = np.concatenate((base - 1, base, base + 1))
        lower = (slab + w_off) * delta - np.tile(w, 3)
        mass = delta * delta * (
            projected_square_cdf(lower + delta, a, b) - projected_square_cdf(lower, a, b)
        )
        slab_id = slab - slab.min()
        for t_off in OFFSETS:
            window = np.tile(np.floor(t - t_off).astype(np.int64), 3)
            window_id = window - window.min()
            n_windows = int(window_id.max()) + 1
            totals = np.bincount(slab_id * n_windows + window_id, weights=mass)
            best = max(best, float(totals.max()))
    return best / delta


@validate_args({"delta": POSITIVE})
def kakeya_maximal(
    cells: np.ndarray, delta: float, directions: AngularNet
) -> list[MaximalValue]:
    """K_delta f(s) for f the indicator of the union of the given delta-cells."""
    cells = np.unique(np.asarray(cells, dtype=np.int64).reshape(-1, 2), axis=0)
    if cells.shape[0] == 0:
        raise InvalidParameterError("kakeya_maximal needs at least one cell")
    centres = (cells + 0.5) * delta
    extent = centres.max(axis=0) - centres.min(axis=0)
    if math.hypot(*extent) > MAX_DIAMETER:
        raise InvalidParameterError(
            f"cells span a box of diameter {math.hypot(*extent):.3f}, above {MAX_DIAMETER}"
        )
    values = [
        MaximalValue(direction=float(s), value=_direction_value(centres, delta, s))
        for s in directions.angles
    ]
    logger.debug("Maximal operator evaluated", cells=cells.shape[0], directions=len(values))
    return values


def net_gaps(net: AngularNet) -> np.ndarray:
    """Angular measure attached to each net direction: the gap to the next one."""
    angles = np.asarray(net.angles, dtype=np.float64)
    if net.is_full_circle:
        rel = np.mod(angles - net.low, TWO_PI)
    else:
        rel = angles - net.low
    perm = np.argsort(rel, kind="stable")
    ordered = rel[perm]
    end = TWO_PI if net.is_full_circle else net.width
    gaps_sorted = np.diff(np.append(ordered, ordered[0] + end if net.is_full_circle else end))
    gaps = np.empty_like(gaps_sorted)
    gaps[perm] = gaps_sorted
    return gaps


def cordoba_ratio(cells: np.ndarray, delta: float, directions: AngularNet) -> float:
    """||K_delta f||_2 / (sqrt(log(1/delta)) * ||f||_2) over the direction net."""
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError("cordoba_ratio needs 0 < delta < 1")
    values = kakeya_maximal(cells, delta, directions)
    v = np.array([mv.value for mv in values])
    gaps = net_gaps(directions)
    k_norm = math.sqrt(float(np.sum(v * v * gaps)))
    n_cells = np.unique(np.asarray(cells, dtype=np.int64).reshape(-1, 2), axis=0).shape[0]
    f_norm = delta * math.sqrt(n_cells)
    ratio = k_norm / (math.sqrt(math.log(1.0 / delta)) * f_norm)
    logger.debug("Cordoba ratio", delta=delta, ratio=ratio)
    return ratio
