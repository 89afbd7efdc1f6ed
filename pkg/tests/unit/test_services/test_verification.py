"""Tests for the acceptance-check profiles."""

import pytest

from dipole_kakeya.exceptions import CoverageError
from dipole_kakeya.services import construction_transfer as transfer
from dipole_kakeya.services import verification
from dipole_kakeya.services.verification import (
    PROFILES,
    CheckResult,
    _check,
    _containment,
    _density,
    _exponent_identities,
    _hausdorff,
    _oracle,
    run_verification,
)


class TestCheckWrapper:
    """Test that checks report failures instead of raising."""

    def test_error_becomes_failed_result(self):
        """Test a package error is captured with its detail."""

        def boom():
            raise CoverageError("no pairs near direction 3")

        result = _check("boom", boom)
        assert result.name == "boom"
        assert not result.passed
        assert result.detail == "no pairs near direction 3"

    def test_passing_result_kept(self):
        """Test a passing result is returned unchanged."""
        ok = CheckResult(name="ok", passed=True, value=1.0, bound=2.0)
        assert _check("ok", lambda: ok) is ok

    def test_other_errors_propagate(self):
        """Test errors outside the package are not swallowed."""

        def broken():
            raise ZeroDivisionError

        with pytest.raises(ZeroDivisionError):
            _check("broken", broken)


class TestIndividualChecks:
    """Test single checks on the shared construction states."""

    @pytest.mark.parametrize("k", [1, 2])
    def test_containment_and_density(self, state_a, k):
        """Test the transfer stages pass containment and density within 2 delta_k."""
        for result in (_containment(state_a, k), _density(state_a, k)):
            assert result.passed
            assert result.value <= result.bound

    def test_containment_streams_top_stage(self, mocker, state_a):
        """Test containment at k = stage takes the streamed check and still passes."""
        streamed = mocker.spy(transfer, "containment_check_streaming")
        result = _containment(state_a, state_a.stage)
        assert streamed.call_count == 1
        assert result.passed

    def test_exponent_identities(self):
        """Test the exact exponent identity and the grid argmax."""
        result = _exponent_identities()
        assert result.passed
        assert result.value == pytest.approx(2 / 7, abs=1e-4)

    def test_hausdorff(self):
        """Test content bounds decrease along the doubly exponential schedule."""
        result = _hausdorff()
        assert result.passed
        assert result.value < 0

    def test_oracle(self):
        """Test a few seeded oracle trials in both regimes."""
        result = _oracle(4, 2)
        assert result.passed
        assert result.value == result.bound == 6.0


class TestRunVerification:
    """Test whole profiles."""

    def test_profiles(self):
        """Test the named profiles."""
        assert set(PROFILES) == {"desk", "smoke"}
        assert PROFILES["smoke"].recursion_ks == []

    def test_smoke(self):
        """Test the smoke profile passes with one result per check."""
        results = run_verification(PROFILES["smoke"])
        names = [r.name for r in results]
        assert len(names) == len(set(names))
        assert {"containment k=2", "containment k=3"} <= set(names)
        assert "splitting invariants" in names
        assert "cordoba ratio" not in names
        assert [r.name for r in results if not r.passed] == []

    def test_failure_reported(self, mocker):
        """Test a failing check shows up as a failed row and the run continues."""
        mocker.patch.object(
            verification,
            "_hausdorff",
            return_value=CheckResult(name="hausdorff content decreasing", passed=False),
        )
        results = run_verification(PROFILES["smoke"])
        failed = [r.name for r in results if not r.passed]
        assert failed == ["hausdorff content decreasing"]
        assert results[-1].name == "estimator sanity"
