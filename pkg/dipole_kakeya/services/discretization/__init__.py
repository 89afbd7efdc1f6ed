"""Discretization at scale delta: configurations, direction classes, the
incidence graph, the maximal operator, the annuli oracle and exponents."""

from dipole_kakeya.services.discretization.classification import (
    case_split,
    classify_good_bad,
)
from dipole_kakeya.services.discretization.configuration import (
    build_configuration,
    sector_configuration,
)
from dipole_kakeya.services.discretization.exponents import (
    cell_count_exponent,
    lower_bound_argmax,
    lower_bound_exponent,
)
from dipole_kakeya.services.discretization.graph import (
    build_incidence_graph,
    cauchy_schwarz_slack,
    common_neighbour_stat,
    deg_squared_pairs,
    dyadic_pair_profile,
    triple_incidence_count,
)
from dipole_kakeya.services.discretization.maximal import cordoba_ratio, kakeya_maximal
from dipole_kakeya.services.discretization.oracle import (
    annuli_cover_oracle,
    annuli_oracle_trials,
)
from dipole_kakeya.services.discretization.suite import suite_bands, suite_stats

__all__ = [
    "annuli_cover_oracle",
    "annuli_oracle_trials",
    "build_configuration",
    "build_incidence_graph",
    "case_split",
    "cauchy_schwarz_slack",
    "cell_count_exponent",
    "classify_good_bad",
    "common_neighbour_stat",
    "cordoba_ratio",
    "deg_squared_pairs",
    "dyadic_pair_profile",
    "kakeya_maximal",
    "lower_bound_argmax",
    "lower_bound_exponent",
    "sector_configuration",
    "suite_bands",
    "suite_stats",
    "triple_incidence_count",
]
