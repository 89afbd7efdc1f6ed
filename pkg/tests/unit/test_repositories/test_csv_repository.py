"""Tests for CSV persistence."""

import numpy as np
import pytest

from dipole_kakeya.exceptions import InvalidParameterError
from dipole_kakeya.repositories.csv_repository import (
    LINEAGE_COLUMNS,
    STATS_COLUMNS,
    CsvRepository,
)
from dipole_kakeya.schemas.discretization import AnnuliCoverResult, SuiteStats
from dipole_kakeya.schemas.reports import CoverEntry, CoverReport
from dipole_kakeya.services import construction_quadruple as quad


@pytest.fixture
def repo(tmp_path):
    return CsvRepository(tmp_path)


class TestPoints:
    """Test point files of both constructions."""

    def test_construction_a_round_trip(self, repo, state_a):
        """Test coordinates survive a write and read bit for bit."""
        repo.write_construction_a(state_a, "a.csv")
        points = repo.read_points("a.csv")
        assert np.array_equal(points, state_a.all_points())

    def test_construction_a_header_and_stages(self, repo, state_a, tmp_path):
        """Test the stage,x,y,parent header and one stage label per point set."""
        path = repo.write_construction_a(state_a, "a.csv")
        assert path == tmp_path / "a.csv"
        assert path.read_text(encoding="utf-8").splitlines()[0] == "stage,x,y,parent"
        table = repo.read_point_table("a.csv")
        counts = table["stage"].value_counts().sort_index().tolist()
        assert counts == [p.shape[0] for p in state_a.points]
        assert (table.loc[table["stage"] == 0, "parent"] == -1).all()

    def test_construction_b_with_lineage(self, repo, state_b):
        """Test the point file and the lineage file of the splitting."""
        repo.write_construction_b(state_b, "b.csv", lineage_path="lineage.csv")
        table = repo.read_point_table("b.csv")
        assert len(table) == quad.expected_point_count(state_b.stage)
        assert np.array_equal(table[["x", "y"]].to_numpy(), state_b.points)
        lineage = repo._read("lineage.csv", LINEAGE_COLUMNS)
        assert list(lineage.columns) == LINEAGE_COLUMNS
        assert np.array_equal(lineage["parent"].to_numpy(), state_b.point_parent)

    def test_lf_line_endings(self, repo, state_b, tmp_path):
        """Test files use LF only."""
        repo.write_construction_b(state_b, "b.csv")
        assert b"\r\n" not in (tmp_path / "b.csv").read_bytes()

    def test_missing_file(self, repo):
        """Test reading a missing file is rejected."""
        with pytest.raises(InvalidParameterError, match="no such file"):
            repo.read_points("absent.csv")

    def test_missing_columns(self, repo, tmp_path):
        """Test a file without x and y is rejected."""
        (tmp_path / "bad.csv").write_text("a,b\n1,2\n")
        with pytest.raises(InvalidParameterError, match="lacks columns"):
            repo.read_points("bad.csv")

    def test_absolute_path_kept(self, repo, tmp_path, state_b):
        """Test absolute paths bypass the output directory."""
        target = tmp_path / "nested" / "b.csv"
        assert repo.write_construction_b(state_b, target) == target
        assert target.exists()


class TestTables:
    """Test covering, stats and oracle tables."""

    def test_cover_report(self, repo):
        """Test the r,N_r table reads back as the same report."""
        report = CoverReport(entries=[CoverEntry(r=2.0**-j, n_r=3 * 2**j) for j in range(5, 9)])
        repo.write_cover_report(report, "dims.csv")
        assert repo.read_cover_report("dims.csv").entries == report.entries
        text = repo.render_cover_report(report)
        assert text.splitlines()[:2] == ["r,N_r", "0.03125,96"]

    def test_stats_columns(self, repo, tmp_path):
        """Test the stats header follows the row fields."""
        row = SuiteStats(
            delta=2.0**-6,
            gamma=2.0 / 7.0,
            n_net=402,
            n_pairs=400,
            n_cells=900,
            n_good=10,
            n_bad=392,
            n_edges=380,
            max_common_neighbour_ratio=0.5,
            triples=1200,
            cordoba_ratio=float("nan"),
            cell_exponent=1.6,
            case="bad_majority",
            high_degree_cells=0,
        )
        repo.write_stats([row, row], "stats.csv")
        lines = (tmp_path / "stats.csv").read_text().splitlines()
        assert lines[0] == ",".join(STATS_COLUMNS)
        assert len(lines) == 3

    def test_oracle_results(self, repo, tmp_path):
        """Test one row per oracle result."""
        result = AnnuliCoverResult(
            covered=True,
            mode="two_window",
            precondition_ok=True,
            distance=1.0,
            delta=1e-4,
            window=1.0,
            survivors=480,
        )
        repo.write_oracle_results([result], "oracle.csv")
        lines = (tmp_path / "oracle.csv").read_text().splitlines()
        assert lines == ["distance,delta,mode,survivors,covered", "1.0,0.0001,two_window,480,True"]

    def test_default_directory(self, test_settings, tmp_path):
        """Test relative paths land in the configured output directory."""
        assert CsvRepository().resolve("x.csv") == tmp_path / "x.csv"
