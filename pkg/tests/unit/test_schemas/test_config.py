"""Tests for run configuration parsing."""

import pytest
from pydantic import ValidationError

from dipole_kakeya.exceptions import InvalidParameterError
from dipole_kakeya.schemas.config import (
    RunConfig,
    load_config_file,
    parse_scale,
    parse_scale_list,
)


class TestParseScale:
    """Test single scale tokens."""

    @pytest.mark.parametrize(
        "token, expected",
        [("0.25", 0.25), ("2^-8", 2.0**-8), (" 2^3 ", 8.0), ("1e-3", 1e-3)],
    )
    def test_tokens(self, token, expected):
        """Test float literals and powers of two."""
        assert parse_scale(token) == expected

    def test_garbage(self):
        """Test an unreadable token is rejected."""
        with pytest.raises(InvalidParameterError, match="half"):
            parse_scale("half")


class TestParseScaleList:
    """Test scale list specs."""

    def test_auto_dyadic(self):
        """Test auto-dyadic:5:12 gives the 8 scales 2^-5 .. 2^-12."""
        scales = parse_scale_list("auto-dyadic:5:12")
        assert scales == [2.0**-j for j in range(5, 13)]

    def test_comma_list(self):
        """Test a comma list keeps its order and skips empty items."""
        assert parse_scale_list("2^-6, 0.01,") == [2.0**-6, 0.01]

    def test_empty_range(self):
        """Test j_max below j_min is rejected."""
        with pytest.raises(InvalidParameterError):
            parse_scale_list("auto-dyadic:9:5")

    def test_empty_list(self):
        """Test a list without scales is rejected."""
        with pytest.raises(InvalidParameterError):
            parse_scale_list(" , ")


class TestLoadConfigFile:
    """Test key=value config files."""

    def test_reads_pairs(self, tmp_path):
        """Test comments and blank lines are skipped and dashes become underscores."""
        path = tmp_path / "run.conf"
        path.write_text("# desk run\nk-max = 4\n\nscales=auto-dyadic:5:8  # coarse\n")
        assert load_config_file(path) == {"k_max": "4", "scales": "auto-dyadic:5:8"}

    def test_missing_file(self, tmp_path):
        """Test a missing file is rejected."""
        with pytest.raises(InvalidParameterError, match="does not exist"):
            load_config_file(tmp_path / "nope.conf")

    def test_malformed_line(self, tmp_path):
        """Test a line without '=' names its line number."""
        path = tmp_path / "run.conf"
        path.write_text("k_max=3\nlevels\n")
        with pytest.raises(InvalidParameterError, match=":2:"):
            load_config_file(path)


class TestRunConfig:
    """Test validation of merged run parameters."""

    def test_defaults(self):
        """Test the defaults of a bare run."""
        config = RunConfig(command="suite")
        assert config.construction == "a"
        assert config.gamma == pytest.approx(2 / 7)
        assert config.deltas == [2.0**-j for j in range(6, 11)]
        assert len(config.scales) == 8
        assert config.origin == (0.0, 0.0)

    def test_string_values(self):
        """Test config-file strings are coerced."""
        config = RunConfig(
            command="dims", scales="auto-dyadic:5:12", origin="0.5, 0.25", k_max="4"
        )
        assert len(config.scales) == 8
        assert config.origin == (0.5, 0.25)
        assert config.k_max == 4

    @pytest.mark.parametrize(
        "field, value",
        [
            ("gamma", 0.5),
            ("gamma", 0.0),
            ("levels", 0),
            ("k_max", -1),
            ("construction", "c"),
            ("deltas", "0.1,-0.2"),
            ("origin", "1,2,3"),
            ("point_cap", 0),
        ],
    )
    def test_invalid(self, field, value):
        """Test out-of-range values are rejected."""
        with pytest.raises(ValidationError):
            RunConfig(command="suite", **{field: value})
