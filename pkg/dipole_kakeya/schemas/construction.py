import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from dipole_kakeya.schemas.geometry import Point2, UnitArc


class ArcArray(BaseModel):
    """Column store of unit arcs (centre x/y, start angle, signed span)."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    cx: np.ndarray
    cy: np.ndarray
    start: np.ndarray
    span: np.ndarray

    def __len__(self) -> int:
        return int(self.cx.shape[0])

    @classmethod
    def empty(cls) -> "ArcArray":
        z = np.empty(0, dtype=np.float64)
        return cls(cx=z, cy=z.copy(), start=z.copy(), span=z.copy())

    @classmethod
    def from_arcs(cls, arcs: list[UnitArc]) -> "ArcArray":
        return cls(
            cx=np.array([a.centre.x for a in arcs], dtype=np.float64),
            cy=np.array([a.centre.y for a in arcs], dtype=np.float64),
            start=np.array([a.start for a in arcs], dtype=np.float64),
            span=np.array([a.span for a in arcs], dtype=np.float64),
        )

    def arc(self, i: int) -> UnitArc:
        return UnitArc(
            centre=Point2(x=float(self.cx[i]), y=float(self.cy[i])),
            start=float(self.start[i]),
            span=float(self.span[i]),
        )

    def to_arcs(self) -> list[UnitArc]:
        return [self.arc(i) for i in range(len(self))]

    def take(self, index: np.ndarray) -> "ArcArray":
        return ArcArray(
            cx=self.cx[index],
            cy=self.cy[index],
            start=self.start[index],
            span=self.span[index],
        )

    def start_points(self) -> np.ndarray:
        return np.column_stack(
            (self.cx + np.cos(self.start), self.cy + np.sin(self.start))
        )

    def end_points(self) -> np.ndarray:
        end = self.start + self.span
        return np.column_stack((self.cx + np.cos(end), self.cy + np.sin(end)))

    def centres(self) -> np.ndarray:
        return np.column_stack((self.cx, self.cy))


class Schedule(BaseModel):
    """Decreasing scales delta_1 > delta_2 > ..., held in log2 form.

    `log2_deltas[k-1]` is log2(delta_k). Float values underflow to 0 for the
    doubly exponential rate; log-space consumers never read `deltas`.
    """

    log2_deltas: list[float] = Field(min_length=1)
    kind: Literal["polynomial", "doubly_exponential", "explicit"] = "explicit"
    a: float | None = None
    b: float | None = None
    offset: float | None = None

    @model_validator(mode="after")
    def _strictly_decreasing(self) -> "Schedule":
        for prev, nxt in zip(self.log2_deltas, self.log2_deltas[1:]):
            if not nxt < prev:
                raise ValueError("schedule must be strictly decreasing")
        if self.log2_deltas[0] >= 0:
            raise ValueError("delta_1 must be below 1")
        return self

    def __len__(self) -> int:
        return len(self.log2_deltas)

    @property
    def deltas(self) -> list[float]:
        return [2.0**v for v in self.log2_deltas]

    def delta(self, k: int) -> float:
        """delta_k, 1-based."""
        return 2.0 ** self.log2_deltas[k - 1]

    def ln_delta(self, k: int) -> float:
        return self.log2_deltas[k - 1] * math.log(2.0)


class ConstructionAState(BaseModel):
    """Stage-k snapshot of the iterated arc transfer.

    `points[j]` is P_j as an (n, 2) array; `arcs` is A_k; generating pairs are
    (centre of a partitioned arc, cut point) accumulated over all stages, with
    `pair_stage` recording the stage that produced each pair.
    `point_parent[j]` holds, for each point of P_j, the global row (in
    `all_points()`) of the centre of the arc it was cut from; -1 for P_0.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    stage: int
    schedule: Schedule
    points: list[np.ndarray]
    arcs: ArcArray
    arc_history: list[ArcArray]
    pair_first: np.ndarray
    pair_second: np.ndarray
    pair_stage: np.ndarray
    point_parent: list[np.ndarray]

    def all_points(self, through: int | None = None) -> np.ndarray:
        through = self.stage if through is None else through
        return np.concatenate(self.points[: through + 1], axis=0)

    def pairs_through(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        mask = self.pair_stage <= k
        return self.pair_first[mask], self.pair_second[mask]


class ConstructionBState(BaseModel):
    """Stage-n snapshot of the four-way split construction.

    Arcs of stage n have span theta0 * 4^-n, theta0 being the span of the
    initial arc they descend from. Points carry their birth stage (>= 1), the
    index of the pivot point whose rotated arcs spawned them (-1 for points cut
    from the initial arcs), the sign of that rotation (0 for roots), which of
    the two quarter points of the host arc they are, and the host arc centre.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    stage: int
    arcs: ArcArray
    arc_pivot: np.ndarray
    arc_sign: np.ndarray
    initial_config: list[UnitArc]
    points: np.ndarray
    point_stage: np.ndarray
    point_parent: np.ndarray
    point_sign: np.ndarray
    point_cut: np.ndarray
    point_host_centre: np.ndarray

    def points_through(self, n: int) -> np.ndarray:
        return self.points[self.point_stage <= n]
