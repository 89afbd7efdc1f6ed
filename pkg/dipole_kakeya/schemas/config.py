import re
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator

from dipole_kakeya.exceptions import InvalidParameterError

_DYADIC = re.compile(r"^auto-dyadic:(-?\d+):(-?\d+)$")
_POWER = re.compile(r"^2\^(-?\d+)$")


def parse_scale(token: str) -> float:
    """A float literal or 2^j."""
    token = token.strip()
    match = _POWER.match(token)
    if match:
        return 2.0 ** int(match.group(1))
    try:
        return float(token)
    except ValueError:
        raise InvalidParameterError(f"cannot read a scale from {token!r}")


def parse_scale_list(text: str) -> list[float]:
    """`auto-dyadic:j_min:j_max` (r = 2^-j) or a comma separated list of scales."""
    text = text.strip()
    match = _DYADIC.match(text)
    if match:
        j_min, j_max = int(match.group(1)), int(match.group(2))
        if j_max < j_min:
            raise InvalidParameterError(f"empty dyadic range in {text!r}")
        return [2.0**-j for j in range(j_min, j_max + 1)]
    scales = [parse_scale(tok) for tok in text.split(",") if tok.strip()]
    if not scales:
        raise InvalidParameterError("scale list is empty")
    return scales


def load_config_file(path: Path) -> dict[str, str]:
    """key=value lines; blank lines and # comments are skipped."""
    if not path.exists():
        raise InvalidParameterError(f"config file {path} does not exist")
    values = {}
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameterError(f"{path}:{number}: expected key=value")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


class RunConfig(BaseModel):
    """Parameters of one CLI run, after merging the config file and the flags."""

    command: str
    construction: Literal["a", "b"] = "a"
    k_max: int = Field(default=3, ge=0)
    levels: int = Field(default=6, ge=1)
    schedule_a: float = Field(default=1.0, gt=0)
    schedule_b: float = 0.0
    schedule_offset: float = Field(default=2.0, gt=0)
    deltas: list[float] = Field(default_factory=lambda: [2.0**-j for j in range(6, 11)])
    gamma: float = Field(default=2.0 / 7.0, gt=0, lt=0.5)
    scales: list[float] = Field(default_factory=lambda: [2.0**-j for j in range(5, 13)])
    radii: list[float] = Field(default_factory=lambda: [2.0**-j for j in range(2, 6)])
    gap: int = Field(default=4, ge=1)
    centres: Optional[int] = Field(default=None, gt=0)
    exponent: float = Field(default=0.5, gt=0)
    seed: Optional[int] = None
    origin: tuple[float, float] = (0.0, 0.0)
    trials: int = Field(default=200, ge=1)
    mode: Literal["two_window", "one_window"] = "two_window"
    profile: Literal["desk", "smoke"] = "desk"
    points: Optional[Path] = None
    out: Optional[Path] = None
    lineage: Optional[Path] = None
    bands: Optional[Path] = None
    point_cap: Optional[int] = Field(default=None, gt=0)
    arc_cap: Optional[int] = Field(default=None, gt=0)

    @field_validator("deltas", "scales", "radii", mode="before")
    @classmethod
    def _scale_list(cls, value):
        if isinstance(value, str):
            return parse_scale_list(value)
        return value

    @field_validator("deltas", "scales", "radii")
    @classmethod
    def _positive(cls, value: list[float]) -> list[float]:
        if any(not 0 < v for v in value):
            raise ValueError("scales must be positive")
        return value

    @field_validator("origin", mode="before")
    @classmethod
    def _origin(cls, value):
        if isinstance(value, str):
            parts = [p for p in value.split(",") if p.strip()]
            if len(parts) != 2:
                raise ValueError("origin must be given as x,y")
            return tuple(float(p) for p in parts)
        return value


# RunConfig fields each subcommand reads; other file keys do not reach it.
COMMAND_FIELDS: dict[str, frozenset[str]] = {
    "construct-a": frozenset(
        {"k_max", "schedule_a", "schedule_b", "schedule_offset", "out", "point_cap"}
    ),
    "construct-b": frozenset({"levels", "out", "lineage", "arc_cap"}),
    "dims": frozenset({"points", "scales", "origin", "out"}),
    "assouad": frozenset({"points", "radii", "gap", "centres", "seed", "out"}),
    "coverage": frozenset({"construction", "k_max", "levels", "out"}),
    "decay": frozenset(
        {"k_max", "schedule_a", "schedule_b", "schedule_offset", "exponent", "out", "point_cap"}
    ),
    "suite": frozenset({"construction", "deltas", "gamma", "out", "bands"}),
    "oracle": frozenset({"trials", "mode", "seed", "out"}),
    "verify-all": frozenset({"profile", "out"}),
}
