import math
from typing import Optional

import numpy as np

from dipole_kakeya.schemas.discretization import (
    CaseSplitReport,
    DipoleConfiguration,
    DirectionSplit,
    IncidenceGraph,
)
from dipole_kakeya.schemas.geometry import TWO_PI
from dipole_kakeya.services.discretization.graph import build_incidence_graph
from dipole_kakeya.settings import get_settings
from dipole_kakeya.utils.decorators.validators import validate_args
from dipole_kakeya.utils.logging import get_logger

logger = get_logger(__name__)

GAMMA_RULE = {
    "required": True,
    "exclusiveMin": {"value": 0, "message": "gamma must lie in (0, 1/2)"},
    "exclusiveMax": {"value": 0.5, "message": "gamma must lie in (0, 1/2)"},
}


def good_threshold(delta: float, gamma: float) -> int:
    """Smallest integer count meeting #(dir C ∩ B(e, delta^{1/2})) >= delta^-gamma."""
    return max(1, math.ceil(delta**-gamma - 1e-9))


def _good_intervals(angles: np.ndarray, threshold: int, radius: float) -> np.ndarray:
    """Angles e with at least `threshold` of `angles` inside [e - radius, e + radius].

    Any such e lies in [a_{i+T-1} - radius, a_i + radius] for some run of T
    consecutive angles (cyclically), so those intervals are exactly the set.
    """
    m = angles.size
    a = np.sort(angles)
    ext = np.concatenate((a, a + TWO_PI))
    i = np.arange(m)
    lo = ext[i + threshold - 1] - radius
    hi = ext[i] + radius
    keep = lo <= hi
    return np.column_stack((lo[keep], hi[keep]))


@validate_args({"gamma": GAMMA_RULE})
def classify_good_bad(config: DipoleConfiguration, gamma: float) -> DirectionSplit:
    """Partition the net into good and bad directions.

    e is good when some cell C has at least delta^-gamma directions of
    dir(C) within angular distance delta^{1/2} of e; bad is the rest.
    """
    delta = config.delta
    threshold = good_threshold(delta, gamma)
    radius = math.sqrt(delta)
    angles = np.asarray(config.net.angles, dtype=np.float64)

    sizes = np.diff(config.dir_indptr)
    chunks = [
        _good_intervals(angles[config.dir_set(int(c))], threshold, radius)
        for c in np.flatnonzero(sizes >= threshold)
    ]
    perm = np.argsort(angles, kind="stable")
    ordered = angles[perm]
    marks = np.zeros(ordered.size + 1, dtype=np.int64)
    if chunks:
        iv = np.concatenate(chunks)
        shift = np.floor(iv[:, 0] / TWO_PI) * TWO_PI
        lo, hi = iv[:, 0] - shift, iv[:, 1] - shift
        start = np.searchsorted(ordered, lo, side="left")
        stop = np.searchsorted(ordered, np.minimum(hi, TWO_PI), side="right")
        np.add.at(marks, start, 1)
        np.add.at(marks, stop, -1)
        wrap = hi >= TWO_PI
        if wrap.any():
            wrap_stop = np.searchsorted(ordered, hi[wrap] - TWO_PI, side="right")
            np.add.at(marks, np.zeros(wrap_stop.size, dtype=np.int64), 1)
            np.add.at(marks, wrap_stop, -1)
    good_sorted = np.cumsum(marks[:-1]) > 0
    good_mask = np.empty(ordered.size, dtype=bool)
    good_mask[perm] = good_sorted

    split = DirectionSplit(
        good=np.flatnonzero(good_mask),
        bad=np.flatnonzero(~good_mask),
        threshold=threshold,
    )
    logger.debug(
        "Directions classified",
        delta=delta,
        gamma=gamma,
        threshold=threshold,
        good=int(split.good.size),
        bad=int(split.bad.size),
    )
    return split


def case_split(
    config: DipoleConfiguration,
    gamma: float,
    split: Optional[DirectionSplit] = None,
    graph: Optional[IncidenceGraph] = None,
) -> CaseSplitReport:
    """Which branch of the lower-bound argument the configuration falls in.

    With fewer good than bad directions, also reports the share of edges that
    touch a vertex of degree at most factor * delta^-gamma.
    """
    split = classify_good_bad(config, gamma) if split is None else split
    n_good, n_bad = int(split.good.size), int(split.bad.size)
    degree_threshold = get_settings().degree_threshold_factor * config.delta**-gamma
    report = CaseSplitReport(
        n_net=config.n_net,
        n_good=n_good,
        n_bad=n_bad,
        case="good_majority" if 2 * n_good >= config.n_net else "bad_majority",
        degree_threshold=degree_threshold,
    )
    if report.case == "bad_majority":
        graph = build_incidence_graph(config, split.bad) if graph is None else graph
        if graph.n_edges:
            deg = graph.degrees
            low = (deg[graph.edge_u] <= degree_threshold) | (deg[graph.edge_v] <= degree_threshold)
            report.low_degree_edge_share = float(low.mean())
    logger.info("Case split", case=report.case, good=n_good, bad=n_bad)
    return report
