from typing import Literal, Optional

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, Field

from dipole_kakeya.schemas.geometry import AngularNet


class Cell(BaseModel):
    """A delta-cell of the origin-anchored grid and its direction set."""

    index: tuple[int, int]
    dir_set: list[int]


class DipoleConfiguration(BaseModel):
    """Pairs selected at scale delta, their cells and the cells' direction sets.

    Row e of `pair_x` / `pair_y` is the pair chosen for net direction e,
    oriented so that pair_y[e] - pair_x[e] is the realized unit vector.
    `cell_index` holds the distinct (ix, iy) cells in lexicographic order and
    `x_cell` / `y_cell` map each pair endpoint to its row there. Direction
    sets are stored in CSR form: the net indices of cell c are
    `dir_indices[dir_indptr[c]:dir_indptr[c + 1]]`, sorted.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    delta: float
    net: AngularNet
    pair_x: np.ndarray
    pair_y: np.ndarray
    pair_source: np.ndarray
    pair_error: np.ndarray
    cell_index: np.ndarray
    x_cell: np.ndarray
    y_cell: np.ndarray
    dir_indptr: np.ndarray
    dir_indices: np.ndarray

    @property
    def n_net(self) -> int:
        return len(self.net)

    @property
    def n_cells(self) -> int:
        return int(self.cell_index.shape[0])

    @property
    def n_pairs(self) -> int:
        """Distinct generating pairs; several net directions may share one."""
        return int(np.unique(self.pair_source).size)

    def cell_centres(self) -> np.ndarray:
        return (self.cell_index + 0.5) * self.delta

    def dir_set(self, c: int) -> np.ndarray:
        return self.dir_indices[self.dir_indptr[c] : self.dir_indptr[c + 1]]

    @property
    def cells(self) -> list[Cell]:
        return [
            Cell(
                index=(int(ix), int(iy)),
                dir_set=self.dir_set(c).tolist(),
            )
            for c, (ix, iy) in enumerate(self.cell_index)
        ]


class DirectionSplit(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    good: np.ndarray
    bad: np.ndarray
    threshold: int


class IncidenceGraph(BaseModel):
    """Undirected simple graph on the cells of a configuration.

    `adjacency` is the symmetric 0/1 CSR matrix; `edge_u < edge_v` list each
    edge once, with `edge_label` the bad net direction that produced it.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    n_vertices: int
    adjacency: sp.csr_matrix
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_label: np.ndarray

    @property
    def n_edges(self) -> int:
        return int(self.edge_u.shape[0])

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.adjacency.indptr).astype(np.int64)

    def neighbours(self, v: int) -> np.ndarray:
        return self.adjacency.indices[self.adjacency.indptr[v] : self.adjacency.indptr[v + 1]]


class CaseSplitReport(BaseModel):
    n_net: int
    n_good: int
    n_bad: int
    case: Literal["good_majority", "bad_majority"]
    degree_threshold: float
    low_degree_edge_share: Optional[float] = None


class DegreeSquaredRow(BaseModel):
    cell: tuple[int, int]
    degree: int
    separated_pairs: int

    @property
    def ratio(self) -> float:
        return self.separated_pairs / float(self.degree**2)


class DyadicBand(BaseModel):
    j: int
    low: float
    high: float
    cell_pairs: int
    common_neighbours: int


class MaximalValue(BaseModel):
    direction: float
    value: float


class AnnuliCoverResult(BaseModel):
    covered: bool
    mode: Literal["two_window", "one_window"]
    precondition_ok: bool
    distance: float
    delta: float
    window: float
    survivors: int
    windows: list[tuple[float, float]] = Field(default_factory=list)


class SuiteStats(BaseModel):
    """One row of the stats table."""

    delta: float
    gamma: float
    n_net: int
    n_pairs: int
    n_cells: int
    n_good: int
    n_bad: int
    n_edges: int
    max_common_neighbour_ratio: float
    triples: int
    cordoba_ratio: float
    cell_exponent: float
    case: Literal["good_majority", "bad_majority"]
    high_degree_cells: int
    low_degree_edge_share: Optional[float] = None
    min_separated_ratio: Optional[float] = None
