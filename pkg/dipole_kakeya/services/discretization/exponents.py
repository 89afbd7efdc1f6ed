import math
from fractions import Fraction
from typing import Union

import numpy as np

from dipole_kakeya.exceptions import InvalidParameterError
from dipole_kakeya.schemas.discretization import DipoleConfiguration
from dipole_kakeya.services.discretization.classification import GAMMA_RULE
from dipole_kakeya.utils.decorators.validators import validate_args

Number = Union[float, Fraction]


@validate_args({"gamma": GAMMA_RULE})
def lower_bound_exponent(gamma: Number) -> Number:
    """min(2 gamma, 1 - gamma, (2 - gamma) / 3); exact for Fraction input."""
    return min(2 * gamma, 1 - gamma, (2 - gamma) / 3)


def lower_bound_argmax(grid: int = 10_000) -> tuple[float, float]:
    """Grid search of lower_bound_exponent over the open interval (0, 1/2)."""
    if grid < 2:
        raise InvalidParameterError("grid needs at least two points")
    gamma = 0.5 * np.arange(1, grid + 1) / (grid + 1)
    values = np.minimum(np.minimum(2 * gamma, 1 - gamma), (2 - gamma) / 3)
    best = int(np.argmax(values))
    return float(gamma[best]), float(values[best])


def cell_count_exponent(config: DipoleConfiguration) -> float:
    """log #cells / log(1/delta)."""
    if not 0.0 < config.delta < 1.0:
        raise InvalidParameterError("cell_count_exponent needs 0 < delta < 1")
    return math.log(config.n_cells) / math.log(1.0 / config.delta)
