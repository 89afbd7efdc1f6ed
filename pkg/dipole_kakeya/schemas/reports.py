from typing import Optional

from pydantic import BaseModel, Field, model_validator

from dipole_kakeya.schemas.geometry import Point2


class CoverEntry(BaseModel):
    r: float = Field(gt=0)
    n_r: int = Field(ge=0)


class CoverReport(BaseModel):
    """Scale -> grid covering count table. Counts are grid-anchored, so they
    match the minimal cube cover only up to a bounded constant factor."""

    entries: list[CoverEntry]
    fitted_slope: Optional[float] = None
    fit_range: Optional[tuple[int, int]] = None

    @model_validator(mode="after")
    def _ordered(self) -> "CoverReport":
        for prev, nxt in zip(self.entries, self.entries[1:]):
            if not nxt.r < prev.r:
                raise ValueError("scales must be strictly decreasing")
        if self.fit_range is not None:
            lo, hi = self.fit_range
            if not 0 <= lo < hi <= len(self.entries):
                raise ValueError("fit_range must be a half-open index interval")
        return self

    @property
    def scales(self) -> list[float]:
        return [e.r for e in self.entries]

    @property
    def counts(self) -> list[int]:
        return [e.n_r for e in self.entries]

    def is_monotone(self) -> bool:
        return all(b.n_r >= a.n_r for a, b in zip(self.entries, self.entries[1:]))


class AssouadSample(BaseModel):
    x: Point2
    big_r: float
    r: float
    local_count: int

    @model_validator(mode="after")
    def _scales(self) -> "AssouadSample":
        if not self.r < self.big_r:
            raise ValueError("r must be smaller than R")
        return self


class AssouadProfile(BaseModel):
    samples: list[AssouadSample]
    exponent_estimate: float
    skipped_empty: int = 0


class AssouadScaleRow(BaseModel):
    big_r: float
    r: float
    centres: int
    max_count: int
    mean_count: float
    exponent: float


class HausdorffBound(BaseModel):
    """Natural log of the content bound plus its float value (0.0 on underflow)."""

    k: int
    s: float
    log_value: float
    value: float


class RecursionReport(BaseModel):
    k: int
    r: float
    n_r: int
    unit_bound: float
    bound: float
    slope: float
    predicted_slope: Optional[float] = None

    @property
    def within_bound(self) -> bool:
        return self.n_r <= self.bound


class FastDecayReport(BaseModel):
    k: int
    log2_tail: float
    log2_twice_next: float
    log2_scale: float
    tail_ok: bool
    next_ok: bool


class SiblingStats(BaseModel):
    n: int
    intra_ratios: list[float]
    inter_ratios: list[float]


class CellCoverRow(BaseModel):
    count: int
    radius: float


class HausdorffCover(BaseModel):
    k: int
    rows: list[CellCoverRow]

    def content(self, s: float) -> float:
        return sum(row.count * (2.0 * row.radius) ** s for row in self.rows)
