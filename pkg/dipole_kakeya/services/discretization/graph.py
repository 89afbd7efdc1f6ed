"""Incidence graph on delta-cells and the counts taken on it.

Two cells are adjacent when the pair chosen for some bad direction joins
them. Common neighbours come from the sparse square of the adjacency matrix.
"""

import math
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.spatial import cKDTree

from dipole_kakeya.schemas.discretization import (
    DegreeSquaredRow,
    DipoleConfiguration,
    DyadicBand,
    IncidenceGraph,
)
from dipole_kakeya.settings import get_settings
from dipole_kakeya.utils.logging import get_logger

logger = get_logger(__name__)

# Pairs of cells further apart than this are never counted in the dyadic profile.
DYADIC_LIMIT = 1.9


def build_incidence_graph(config: DipoleConfiguration, bad: np.ndarray) -> IncidenceGraph:
    bad = np.unique(np.asarray(bad, dtype=np.int64))
    u = config.x_cell[bad].astype(np.int64)
    v = config.y_cell[bad].astype(np.int64)
    loops = u == v
    if loops.any():
        logger.debug("Pairs inside a single cell skipped", count=int(loops.sum()))
    u, v, label = u[~loops], v[~loops], bad[~loops]
    a, b = np.minimum(u, v), np.maximum(u, v)

    # One edge per cell pair, labelled by its smallest bad direction.
    order = np.lexsort((label, b, a))
    a, b, label = a[order], b[order], label[order]
    first = np.r_[True, (np.diff(a) != 0) | (np.diff(b) != 0)] if a.size else np.empty(0, bool)
    a, b, label = a[first], b[first], label[first]

    n = config.n_cells
    adjacency = sp.coo_matrix(
        (np.ones(2 * a.size, dtype=np.int64), (np.concatenate((a, b)), np.concatenate((b, a)))),
        shape=(n, n),
    ).tocsr()
    adjacency.sort_indices()
    graph = IncidenceGraph(
        n_vertices=n, adjacency=adjacency, edge_u=a, edge_v=b, edge_label=label
    )
    logger.debug("Incidence graph built", vertices=n, edges=graph.n_edges)
    return graph


def common_neighbour_pairs(
    graph: IncidenceGraph, config: DipoleConfiguration
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(C1, C2, #common neighbours, centre distance) for C1 < C2 sharing a neighbour."""
    square = (graph.adjacency @ graph.adjacency).tocoo()
    keep = square.row < square.col
    rows, cols, counts = square.row[keep], square.col[keep], square.data[keep]
    centres = config.cell_centres()
    dist = np.hypot(*(centres[rows] - centres[cols]).T)
    return rows, cols, counts.astype(np.int64), dist


def common_neighbour_stat(
    graph: IncidenceGraph, config: DipoleConfiguration, gamma: float
) -> float:
    """Largest common-neighbour count over delta^{1/2}-separated pairs, over delta^-gamma."""
    rows, cols, counts, dist = common_neighbour_pairs(graph, config)
    separated = dist >= math.sqrt(config.delta)
    worst = int(counts[separated].max()) if separated.any() else 0
    ratio = worst / config.delta**-gamma
    if separated.any():
        at = int(np.argmax(np.where(separated, counts, -1)))
        logger.debug(
            "Common neighbours",
            worst=worst,
            ratio=ratio,
            cells=(int(rows[at]), int(cols[at])),
            distance=float(dist[at]),
        )
    return ratio


def deg_squared_pairs(
    graph: IncidenceGraph,
    config: DipoleConfiguration,
    gamma: float,
    factor: Optional[float] = None,
) -> list[DegreeSquaredRow]:
    """For vertices of degree above factor * delta^-gamma, the ordered pairs of
    neighbours at mutual distance >= delta^{1/2}."""
    factor = get_settings().degree_threshold_factor if factor is None else factor
    threshold = factor * config.delta**-gamma
    separation = math.sqrt(config.delta)
    below = np.nextafter(separation, 0.0)
    centres = config.cell_centres()
    degrees = graph.degrees

    rows = []
    for c in np.flatnonzero(degrees > threshold):
        nbr = centres[graph.neighbours(int(c))]
        tree = cKDTree(nbr)
        close = int(tree.count_neighbors(tree, below))  # includes the d self-pairs
        d = int(degrees[c])
        rows.append(
            DegreeSquaredRow(
                cell=(int(config.cell_index[c, 0]), int(config.cell_index[c, 1])),
                degree=d,
                separated_pairs=d * d - close,
            )
        )
    logger.debug("Degree-squared table", threshold=threshold, vertices=len(rows))
    return rows


def triple_incidence_count(graph: IncidenceGraph) -> int:
    """#{(C1, C2, C3) : C1 ~ C2, C1 ~ C3} = sum of squared degrees."""
    deg = graph.degrees
    return int(np.dot(deg, deg))


def cauchy_schwarz_slack(graph: IncidenceGraph) -> int:
    """V * sum deg^2 - (sum deg)^2, in exact integers; never negative."""
    deg = [int(d) for d in graph.degrees]
    return graph.n_vertices * sum(d * d for d in deg) - sum(deg) ** 2


def dyadic_pair_profile(
    config: DipoleConfiguration, graph: IncidenceGraph, limit: float = DYADIC_LIMIT
) -> list[DyadicBand]:
    """Cell pairs and common neighbours per band [2^j delta, 2^{j+1} delta)."""
    delta = config.delta
    bands = []
    j = 0
    while 2**j * delta < limit:
        bands.append((j, 2**j * delta, 2 ** (j + 1) * delta))
        j += 1
    if not bands:
        return []

    centres = config.cell_centres()
    tree = cKDTree(centres)
    edges = np.array([bands[0][1]] + [hi for _, _, hi in bands])
    # count_neighbors counts ordered pairs with distance <= r, self-pairs included.
    ordered = tree.count_neighbors(tree, np.nextafter(edges, 0.0))
    below = (np.asarray(ordered, dtype=np.int64) - config.n_cells) // 2

    _, _, counts, dist = common_neighbour_pairs(graph, config)
    band_of = np.floor(np.log2(np.maximum(dist, 1e-300) / delta)).astype(np.int64)
    in_range = (band_of >= 0) & (band_of < len(bands))
    per_band = np.bincount(band_of[in_range], weights=counts[in_range], minlength=len(bands))

    return [
        DyadicBand(
            j=j,
            low=low,
            high=high,
            cell_pairs=int(below[i + 1] - below[i]),
            common_neighbours=int(per_band[i]),
        )
        for i, (j, low, high) in enumerate(bands)
    ]
