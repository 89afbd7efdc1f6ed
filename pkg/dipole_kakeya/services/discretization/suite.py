from dipole_kakeya.exceptions import PropertyCheckError
from dipole_kakeya.schemas.discretization import DyadicBand, SuiteStats
from dipole_kakeya.services.discretization.classification import case_split, classify_good_bad
from dipole_kakeya.services.discretization.configuration import (
    PairInput,
    build_configuration,
    sector_configuration,
)
from dipole_kakeya.services.discretization.exponents import cell_count_exponent
from dipole_kakeya.services.discretization.graph import (
    build_incidence_graph,
    cauchy_schwarz_slack,
    common_neighbour_stat,
    deg_squared_pairs,
    dyadic_pair_profile,
    triple_incidence_count,
)
from dipole_kakeya.services.discretization.maximal import cordoba_ratio
from dipole_kakeya.utils.logging import get_logger

logger = get_logger(__name__)


def suite_stats(
    pairs: PairInput, delta: float, gamma: float, with_cordoba: bool = True
) -> SuiteStats:
    """One stats row: configuration sizes, graph counts and the Cordoba ratio.

    Triples are counted on the graph of the pi/10 sector configuration. The
    case columns say which branch of the lower-bound argument applies, and
    `min_separated_ratio` is the smallest #P(C) / deg(C)^2 over high-degree cells.
    """
    config = build_configuration(pairs, delta)
    split = classify_good_bad(config, gamma)
    graph = build_incidence_graph(config, split.bad)

    sector = sector_configuration(pairs, delta)
    sector_graph = build_incidence_graph(sector, classify_good_bad(sector, gamma).bad)
    for g in (graph, sector_graph):
        if cauchy_schwarz_slack(g) < 0:
            raise PropertyCheckError("sum of squared degrees below (sum deg)^2 / V")
    report = case_split(config, gamma, split=split, graph=graph)
    heavy = deg_squared_pairs(graph, config, gamma)

    stats = SuiteStats(
        delta=delta,
        gamma=gamma,
        n_net=config.n_net,
        n_pairs=config.n_pairs,
        n_cells=config.n_cells,
        n_good=int(split.good.size),
        n_bad=int(split.bad.size),
        n_edges=graph.n_edges,
        max_common_neighbour_ratio=common_neighbour_stat(graph, config, gamma),
        triples=triple_incidence_count(sector_graph),
        cordoba_ratio=(
            cordoba_ratio(config.cell_index, delta, config.net) if with_cordoba else float("nan")
        ),
        cell_exponent=cell_count_exponent(config),
        case=report.case,
        high_degree_cells=len(heavy),
        low_degree_edge_share=report.low_degree_edge_share,
        min_separated_ratio=min((row.ratio for row in heavy), default=None),
    )
    logger.info("Suite row", delta=delta, gamma=gamma, cells=stats.n_cells, edges=stats.n_edges)
    return stats


def suite_bands(pairs: PairInput, delta: float, gamma: float) -> list[DyadicBand]:
    """Dyadic distance bands of the pi/10 sector graph at scale delta."""
    sector = sector_configuration(pairs, delta)
    graph = build_incidence_graph(sector, classify_good_bad(sector, gamma).bad)
    return dyadic_pair_profile(sector, graph)
