"""Tests for logging configuration."""

from structlog.testing import capture_logs

from dipole_kakeya.utils.logging import configure_logging, get_logger


class TestConfigureLogging:
    """Test level filtering of the package loggers."""

    def teardown_method(self):
        configure_logging("WARNING")

    def test_level_filters(self):
        """Test records below the configured level are dropped."""
        configure_logging("WARNING")
        logger = get_logger("dipole_kakeya.test")
        with capture_logs() as logs:
            logger.info("Stage built", stage=1)
            logger.warning("Uncovered oracle trials", failed=2)
        assert logs == [
            {"event": "Uncovered oracle trials", "failed": 2, "log_level": "warning"}
        ]

    def test_debug_level(self):
        """Test DEBUG lets every record through."""
        configure_logging("debug")
        with capture_logs() as logs:
            get_logger("dipole_kakeya.test").debug("Configuration built", cells=4)
        assert logs[0]["event"] == "Configuration built"

    def test_writes_to_stderr(self, capsys):
        """Test rendered records go to stderr and leave stdout empty."""
        configure_logging("INFO")
        get_logger("dipole_kakeya.test").info("Suite row", delta=0.25)
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "Suite row" in captured.err
        assert "delta=0.25" in captured.err
