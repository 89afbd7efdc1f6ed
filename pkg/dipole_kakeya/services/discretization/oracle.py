"""Sampling oracle for the intersection of two unit annuli.

Points p on the unit circle around c1 with ||p - c2| - 1| <= 10 delta must fit
in two angular windows of width 100 delta^{1/2} around c1, or in one window
when the circles are almost outer tangent.
"""

import math
from typing import Literal, Optional

import numpy as np

from dipole_kakeya.exceptions import ResourceCapError
from dipole_kakeya.schemas.discretization import AnnuliCoverResult
from dipole_kakeya.schemas.geometry import TWO_PI, Point2
from dipole_kakeya.settings import get_settings
from dipole_kakeya.utils.decorators.validators import POSITIVE, validate_args
from dipole_kakeya.utils.logging import get_logger

logger = get_logger(__name__)

Mode = Literal["two_window", "one_window"]


def _band_distance(c1: Point2, c2: Point2, phi: np.ndarray) -> np.ndarray:
    px = c1.x + np.cos(phi) - c2.x
    py = c1.y + np.sin(phi) - c2.y
    return np.abs(np.hypot(px, py) - 1.0)


def _survivor_angles(c1: Point2, c2: Point2, delta: float) -> np.ndarray:
    settings = get_settings()
    width = settings.annulus_width_factor * delta
    m = settings.oracle_coarse_samples
    h = TWO_PI / m
    phi = np.arange(m) * h
    g = _band_distance(c1, c2, phi)

    # g is 1-Lipschitz in phi, so a coarse cell can hold a survivor only if an
    # endpoint is within width + h/2.
    near = np.minimum(g, np.roll(g, -1)) <= width + 0.5 * h
    cells = np.flatnonzero(near)
    if cells.size == 0:
        return np.empty(0)
    per_cell = max(1, math.ceil(h / (settings.oracle_sample_fraction * delta)))
    if cells.size * per_cell > settings.point_cap:
        raise ResourceCapError(
            f"annulus refinement needs {cells.size * per_cell} samples, above the cap"
        )
    fine = (phi[cells][:, None] + np.arange(per_cell)[None, :] * (h / per_cell)).ravel()
    keep = _band_distance(c1, c2, fine) <= width
    return np.sort(fine[keep])


def _cover_windows(
    angles: np.ndarray, window: float, count: int
) -> Optional[list[tuple[float, float]]]:
    """Windows of the given width covering every angle, or None.

    Some optimal cover starts a window at a sample, and from a fixed first
    window the greedy continuation is optimal, so trying every start is exact.
    """
    n = angles.size
    if n == 0:
        return []
    if window * count >= TWO_PI:
        return [(float(angles[0]), float(angles[0]) + window)]
    ext = np.concatenate((angles, angles + TWO_PI))
    start = np.arange(n)
    reach = start.copy()
    starts = []
    for _ in range(count):
        starts.append(reach.copy())
        nxt = np.searchsorted(ext, ext[np.minimum(reach, 2 * n - 1)] + window, side="right")
        reach = np.where(reach >= start + n, reach, nxt)
    ok = np.flatnonzero(reach >= start + n)
    if ok.size == 0:
        return None
    i = int(ok[0])
    windows = []
    for s in starts:
        j = int(s[i])
        if j >= i + n:
            break
        windows.append((float(ext[j] % TWO_PI), float(ext[j] % TWO_PI) + window))
    return windows


def expected_mode(distance: float, delta: float) -> tuple[Mode, bool]:
    root = math.sqrt(delta)
    if root <= distance <= 2.0 - root:
        return "two_window", True
    if 2.0 - root < distance <= 2.0:
        return "one_window", True
    return ("one_window" if distance > 2.0 else "two_window"), False


@validate_args({"delta": POSITIVE})
def annuli_cover_oracle(
    c1: Point2, c2: Point2, delta: float, mode: Optional[Mode] = None
) -> AnnuliCoverResult:
    distance = c1.distance(c2)
    regime, precondition_ok = expected_mode(distance, delta)
    mode = regime if mode is None else mode
    if not precondition_ok:
        logger.warning(
            "Annuli precondition violated", distance=distance, delta=delta, mode=mode
        )
    window = get_settings().window_factor * math.sqrt(delta)
    survivors = _survivor_angles(c1, c2, delta)
    windows = _cover_windows(survivors, window, 2 if mode == "two_window" else 1)
    return AnnuliCoverResult(
        covered=windows is not None,
        mode=mode,
        precondition_ok=precondition_ok,
        distance=distance,
        delta=delta,
        window=window,
        survivors=int(survivors.size),
        windows=windows or [],
    )


def annuli_oracle_trials(
    n_trials: int,
    mode: Mode = "two_window",
    seed: Optional[int] = None,
    log10_delta_range: tuple[float, float] = (-6.0, -3.0),
) -> list[AnnuliCoverResult]:
    """Seeded random (d, delta) draws inside the regime of the given mode."""
    rng = np.random.default_rng(get_settings().seed if seed is None else seed)
    results = []
    for _ in range(n_trials):
        delta = 10.0 ** rng.uniform(*log10_delta_range)
        root = math.sqrt(delta)
        if mode == "two_window":
            d = rng.uniform(root, 2.0 - root)
        else:
            d = 2.0 - root * rng.uniform(0.0, 1.0)
        c1 = Point2(x=float(rng.uniform(-1.0, 1.0)), y=float(rng.uniform(-1.0, 1.0)))
        psi = rng.uniform(0.0, TWO_PI)
        c2 = Point2(x=c1.x + d * math.cos(psi), y=c1.y + d * math.sin(psi))
        results.append(annuli_cover_oracle(c1, c2, delta, mode=mode))
    passed = sum(r.covered for r in results)
    logger.info("Annuli oracle trials", mode=mode, trials=n_trials, passed=passed)
    return results
