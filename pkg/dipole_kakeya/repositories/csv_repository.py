"""CSV persistence for points, lineage, covering tables and suite statistics.

Files are UTF-8 with LF line endings and a header row. Floats are written in
their shortest round-trip form and read back with the round-trip parser, so a
write followed by a read reproduces every coordinate bit for bit.
"""

from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np
import pandas as pd

from dipole_kakeya.exceptions import InvalidParameterError
from dipole_kakeya.schemas.construction import ConstructionAState, ConstructionBState
from dipole_kakeya.schemas.discretization import AnnuliCoverResult, SuiteStats
from dipole_kakeya.schemas.reports import CoverEntry, CoverReport
from dipole_kakeya.settings import get_settings
from dipole_kakeya.utils.logging import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]

POINT_COLUMNS = ["stage", "x", "y", "parent"]
LINEAGE_COLUMNS = ["index", "stage", "parent", "sign", "cut", "host_x", "host_y"]
COVER_COLUMNS = ["r", "N_r"]
STATS_COLUMNS = list(SuiteStats.model_fields)
ORACLE_COLUMNS = ["distance", "delta", "mode", "survivors", "covered"]


class CsvRepository:
    def __init__(self, directory: Optional[PathLike] = None):
        self.directory = Path(directory if directory is not None else get_settings().output_dir)

    def resolve(self, path: PathLike) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.directory / path

    def _write(self, frame: pd.DataFrame, path: PathLike) -> Path:
        target = self.resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(target, index=False, encoding="utf-8", lineterminator="\n")
        logger.debug("CSV written", path=str(target), rows=len(frame))
        return target

    def _read(self, path: PathLike, columns: list[str]) -> pd.DataFrame:
        target = self.resolve(path)
        if not target.exists():
            raise InvalidParameterError(f"no such file: {target}")
        frame = pd.read_csv(target, float_precision="round_trip")
        missing = [c for c in columns if c not in frame.columns]
        if missing:
            raise InvalidParameterError(f"{target} lacks columns {missing}")
        return frame

    def write_construction_a(self, state: ConstructionAState, path: PathLike) -> Path:
        stages = np.concatenate(
            [np.full(p.shape[0], j, dtype=np.int64) for j, p in enumerate(state.points)]
        )
        xy = state.all_points()
        frame = pd.DataFrame(
            {
                "stage": stages,
                "x": xy[:, 0],
                "y": xy[:, 1],
                "parent": np.concatenate(state.point_parent),
            }
        )
        return self._write(frame, path)

    def write_construction_b(
        self, state: ConstructionBState, path: PathLike, lineage_path: Optional[PathLike] = None
    ) -> Path:
        frame = pd.DataFrame(
            {
                "stage": state.point_stage.astype(np.int64),
                "x": state.points[:, 0],
                "y": state.points[:, 1],
                "parent": state.point_parent,
            }
        )
        target = self._write(frame, path)
        if lineage_path is not None:
            lineage = pd.DataFrame(
                {
                    "index": np.arange(state.points.shape[0]),
                    "stage": state.point_stage.astype(np.int64),
                    "parent": state.point_parent,
                    "sign": state.point_sign.astype(np.int64),
                    "cut": state.point_cut.astype(np.int64),
                    "host_x": state.point_host_centre[:, 0],
                    "host_y": state.point_host_centre[:, 1],
                },
                columns=LINEAGE_COLUMNS,
            )
            self._write(lineage, lineage_path)
        return target

    def read_points(self, path: PathLike) -> np.ndarray:
        """(n, 2) coordinates from any file with x and y columns."""
        frame = self._read(path, ["x", "y"])
        return frame[["x", "y"]].to_numpy(dtype=np.float64)

    def read_point_table(self, path: PathLike) -> pd.DataFrame:
        return self._read(path, POINT_COLUMNS)

    def write_cover_report(self, report: CoverReport, path: PathLike) -> Path:
        frame = pd.DataFrame({"r": report.scales, "N_r": report.counts}, columns=COVER_COLUMNS)
        return self._write(frame, path)

    def render_cover_report(self, report: CoverReport) -> str:
        """The r,N_r table as CSV text, for printing to stdout."""
        frame = pd.DataFrame({"r": report.scales, "N_r": report.counts}, columns=COVER_COLUMNS)
        return frame.to_csv(index=False, lineterminator="\n")

    def read_cover_report(self, path: PathLike) -> CoverReport:
        frame = self._read(path, COVER_COLUMNS)
        return CoverReport(
            entries=[CoverEntry(r=float(r), n_r=int(n)) for r, n in zip(frame["r"], frame["N_r"])]
        )

    def write_stats(self, rows: Iterable[SuiteStats], path: PathLike) -> Path:
        frame = pd.DataFrame([row.model_dump() for row in rows], columns=STATS_COLUMNS)
        return self._write(frame, path)

    def write_oracle_results(self, results: Iterable[AnnuliCoverResult], path: PathLike) -> Path:
        frame = pd.DataFrame(
            [
                {
                    "distance": r.distance,
                    "delta": r.delta,
                    "mode": r.mode,
                    "survivors": r.survivors,
                    "covered": r.covered,
                }
                for r in results
            ],
            columns=ORACLE_COLUMNS,
        )
        return self._write(frame, path)

    def write_table(self, rows: list[dict], columns: list[str], path: PathLike) -> Path:
        return self._write(pd.DataFrame(rows, columns=columns), path)
