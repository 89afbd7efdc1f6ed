"""
Dipole Kakeya - explicit dipole Kakeya sets in the plane and the covering
machinery used to bound their dimensions.

This package provides:
- The transfer construction along a scale schedule
- The quadruple-split construction with point lineage
- Grid covering counts, box/Assouad estimates and Hausdorff-content bounds
- Discretization at scale delta: incidence graphs, the Kakeya maximal
  operator and the annuli intersection oracle
- A CLI writing every result as CSV
"""

from dipole_kakeya.services.construction_quadruple import build_construction_b
from dipole_kakeya.services.construction_transfer import (
    build_construction_a,
    default_schedule,
)
from dipole_kakeya.services.dimension_estimators import cover_report, covering_count
from dipole_kakeya.settings import Settings, configure_settings, get_settings

__version__ = "0.1.0"

__all__ = [
    "Settings",
    "configure_settings",
    "get_settings",
    "build_construction_a",
    "build_construction_b",
    "default_schedule",
    "cover_report",
    "covering_count",
]
