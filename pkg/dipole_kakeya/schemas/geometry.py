import math

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from dipole_kakeya.settings import get_settings

TWO_PI = 2.0 * math.pi


class Point2(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float = Field(allow_inf_nan=False)
    y: float = Field(allow_inf_nan=False)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)

    def distance(self, other: "Point2") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)


ORIGIN = Point2(x=0.0, y=0.0)


class Direction(BaseModel):
    """A unit direction on S^1, stored as an angle normalized to [0, 2pi)."""

    model_config = ConfigDict(frozen=True)

    theta: float

    @field_validator("theta")
    @classmethod
    def _normalize(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("theta must be finite")
        value = math.fmod(value, TWO_PI)
        if value < 0.0:
            value += TWO_PI
        # fmod of a value just below a multiple of 2pi can round up to 2pi
        return 0.0 if value >= TWO_PI else value

    @property
    def vector(self) -> tuple[float, float]:
        return (math.cos(self.theta), math.sin(self.theta))

    def antipode(self) -> "Direction":
        return Direction(theta=self.theta + math.pi)


class UnitArc(BaseModel):
    """Arc of a radius-1 circle; span is signed, positive is counterclockwise."""

    model_config = ConfigDict(frozen=True)

    centre: Point2
    start: float = Field(allow_inf_nan=False)
    span: float = Field(allow_inf_nan=False)

    @field_validator("span")
    @classmethod
    def _span_bounded(cls, value: float) -> float:
        if abs(value) > TWO_PI * (1.0 + 1e-15):
            raise ValueError("|span| must not exceed 2pi")
        return value

    @property
    def length(self) -> float:
        return abs(self.span)

    @property
    def end(self) -> float:
        return self.start + self.span

    @property
    def is_full_circle(self) -> bool:
        return abs(abs(self.span) - TWO_PI) <= get_settings().geometry_tolerance

    @property
    def start_point(self) -> Point2:
        return Point2(
            x=self.centre.x + math.cos(self.start),
            y=self.centre.y + math.sin(self.start),
        )

    @property
    def end_point(self) -> Point2:
        return Point2(
            x=self.centre.x + math.cos(self.end),
            y=self.centre.y + math.sin(self.end),
        )


class AngularNet(BaseModel):
    """Ordered delta-separated set of angles inside [low, low + width)."""

    delta: float
    angles: list[float]
    low: float = 0.0
    width: float = TWO_PI

    @model_validator(mode="after")
    def _check(self) -> "AngularNet":
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if not self.angles:
            raise ValueError("a net holds at least one angle")
        return self

    @property
    def is_full_circle(self) -> bool:
        return self.width >= TWO_PI

    def __len__(self) -> int:
        return len(self.angles)
