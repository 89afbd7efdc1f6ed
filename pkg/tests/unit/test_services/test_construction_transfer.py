"""Tests for the iterated arc transfer construction."""

import math

import numpy as np
import pytest

from dipole_kakeya.exceptions import (
    InvalidParameterError,
    ResourceCapError,
    StageMismatchError,
)
from dipole_kakeya.schemas.construction import ArcArray
from dipole_kakeya.schemas.geometry import ORIGIN, TWO_PI, Point2, UnitArc
from dipole_kakeya.services import construction_transfer as transfer
from dipole_kakeya.services.dimension_estimators import covering_count


class TestSchedules:
    """Test scale schedules."""

    def test_polynomial(self):
        """Test delta_k = 2^-(k^2 + 2) for the default parameters."""
        schedule = transfer.polynomial_schedule(4)
        assert schedule.log2_deltas == [-3.0, -6.0, -11.0, -18.0]
        assert schedule.delta(2) == 2.0**-6

    def test_doubly_exponential_stays_in_log_space(self):
        """Test the doubly exponential schedule keeps exponents beyond float range."""
        schedule = transfer.doubly_exponential_schedule(4)
        assert schedule.log2_deltas == [-2.0, -16.0, -512.0, -65536.0]
        assert schedule.deltas[-1] == 0.0

    def test_default_uses_settings(self, test_settings):
        """Test default_schedule reads a, b and offset from settings."""
        schedule = transfer.default_schedule(2)
        assert schedule.a == test_settings.schedule_a
        assert schedule.offset == test_settings.schedule_offset

    def test_empty_schedule_rejected(self):
        """Test k_max < 1 is rejected."""
        with pytest.raises(InvalidParameterError):
            transfer.polynomial_schedule(0)


class TestTransferArcs:
    """Test P(E, delta) and A(E, delta) on single arcs."""

    def test_full_circle_half_turns(self):
        """Test the circle at delta = pi/2 moves two half circles onto the centre."""
        points, arcs = transfer.transfer_arcs(transfer.INITIAL_CIRCLE, math.pi / 2)
        assert len(points) == 2
        assert len(arcs) == 2
        for arc in arcs:
            assert arc.length == pytest.approx(math.pi)
            assert arc.start_point.as_tuple() == pytest.approx((0.0, 0.0), abs=1e-15)

    def test_quarter_arc_keeps_orientation(self):
        """Test the clockwise quarter from (1,0) to (0,-1) moves to centre (1,0) ending at (1,1)."""
        arc = UnitArc(centre=ORIGIN, start=0.0, span=-math.pi / 2)
        points, arcs = transfer.transfer_arcs(arc, math.pi / 2)
        assert len(arcs) == 1
        moved = arcs[0]
        assert moved.centre.as_tuple() == pytest.approx((1.0, 0.0))
        assert moved.start_point.as_tuple() == pytest.approx((0.0, 0.0), abs=1e-15)
        assert moved.span == pytest.approx(-math.pi / 2)
        assert moved.end_point.as_tuple() == pytest.approx((1.0, 1.0))

    def test_directions_preserved(self):
        """Test each moved arc sees the same unit directions as its piece."""
        arc = UnitArc(centre=ORIGIN, start=0.3, span=-1.1)
        _, moved = transfer.transfer_arcs(arc, 0.2)
        piece = arc.span / len(moved)
        for i, m in enumerate(moved):
            assert m.span == pytest.approx(piece)
            for s in np.linspace(0.0, m.length, 7):
                moved_angle = m.start + math.copysign(s, m.span)
                piece_angle = arc.start + i * piece - s
                # p - e_i on the moved arc is the antipode of q - e on the piece
                diff = (moved_angle - piece_angle - math.pi) % TWO_PI
                assert min(diff, TWO_PI - diff) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize(
        "arc, delta",
        [
            (transfer.INITIAL_CIRCLE, 0.3),
            (UnitArc(centre=ORIGIN, start=0.3, span=-1.1), 0.2),
            (UnitArc(centre=Point2(x=0.4, y=-1.2), start=2.0, span=-0.05), 0.1),
        ],
    )
    def test_stage_matches_single_arc(self, arc, delta):
        """Test the column stage reproduces transfer_arcs point for point."""
        points, moved = transfer.transfer_arcs(arc, delta)
        cut, arcs, centres, parents, pivots = transfer._transfer_stage(
            ArcArray.from_arcs([arc]), np.zeros(1, dtype=np.int64), delta, 1
        )
        assert cut == pytest.approx(np.array([p.as_tuple() for p in points]), abs=1e-15)
        assert centres == pytest.approx(np.tile(arc.centre.as_tuple(), (len(points), 1)))
        assert parents.tolist() == [0] * len(points)
        assert pivots.tolist() == [1 + i for i in range(len(moved))]
        assert len(arcs) == len(moved)
        expected = ArcArray.from_arcs(moved)
        assert arcs.centres() == pytest.approx(expected.centres(), abs=1e-15)
        assert arcs.span == pytest.approx(expected.span, abs=1e-15)
        assert arcs.start_points() == pytest.approx(expected.start_points(), abs=1e-14)
        assert arcs.end_points() == pytest.approx(expected.end_points(), abs=1e-14)


class TestBuildConstructionA:
    """Test the staged construction."""

    def test_stage_zero(self, schedule):
        """Test k_max = 0 keeps P_0 = {origin} and the unit circle."""
        state = transfer.build_construction_a(schedule, 0)
        assert state.all_points().tolist() == [[0.0, 0.0]]
        assert len(state.arcs) == 1
        assert abs(state.arcs.span[0]) == pytest.approx(TWO_PI)

    def test_first_stage_count(self):
        """Test delta_1 = 2^-6 gives between 2 pi / (2 delta) and 2 pi / delta points."""
        schedule = transfer.polynomial_schedule(1, a=0.0, b=0.0, offset=6.0)
        state = transfer.build_construction_a(schedule, 1)
        n = state.points[1].shape[0]
        assert 201 <= n <= 403

    def test_pairs_are_unit(self, state_a):
        """Test every generating pair is at distance 1."""
        dist = np.hypot(*(state_a.pair_second - state_a.pair_first).T)
        assert np.abs(dist - 1.0).max() <= 1e-12

    def test_parents_are_unit_away(self, state_a):
        """Test each point of P_k, k >= 1, sits at distance 1 from its parent centre."""
        everything = state_a.all_points()
        for k in range(1, state_a.stage + 1):
            parent = state_a.point_parent[k]
            assert parent.min() >= 0
            dist = np.hypot(*(state_a.points[k] - everything[parent]).T)
            assert np.abs(dist - 1.0).max() <= 1e-12
        assert state_a.point_parent[0].tolist() == [-1]

    def test_too_few_scales(self, schedule):
        """Test asking for more stages than the schedule holds."""
        with pytest.raises(InvalidParameterError):
            transfer.build_construction_a(schedule, 5)

    def test_point_cap(self, schedule):
        """Test the resource cap stops the build."""
        with pytest.raises(ResourceCapError) as exc_info:
            transfer.build_construction_a(schedule, 3, point_cap=100)
        assert exc_info.value.exit_code == 3


class TestStageProperties:
    """Test containment, density and covering bounds per stage."""

    @pytest.mark.parametrize("k", [1, 2])
    def test_containment(self, state_a, k):
        """Test P_{k+1} lies in the 2 delta_k neighbourhood of P_{k-1}."""
        bound = 2 * state_a.schedule.delta(k) + 1e-9
        assert transfer.containment_check(state_a, k) <= bound

    def test_containment_second_stage_value(self, state_a):
        """Test the measured distance at k = 2 is at most 2^-5."""
        assert transfer.containment_check(state_a, 2) <= 2.0**-5

    def test_containment_out_of_range(self, state_a):
        """Test k = stage has no P_{k+1}."""
        with pytest.raises(StageMismatchError):
            transfer.containment_check(state_a, state_a.stage)

    @pytest.mark.parametrize("k", [1, 2])
    def test_streamed_matches_stored(self, state_a, k):
        """Test cutting A_k on the fly gives the stored-P_{k+1} distance."""
        stored = transfer.containment_check(state_a, k)
        assert transfer.containment_check_streaming(state_a, k) == pytest.approx(
            stored, abs=1e-12
        )

    def test_streamed_top_stage(self, state_a):
        """Test k = stage is admitted and stays within 2 delta_k."""
        k = state_a.stage
        bound = 2 * state_a.schedule.delta(k) + 1e-9
        assert transfer.containment_check_streaming(state_a, k) <= bound

    def test_streamed_needs_next_scale(self):
        """Test the stream refuses a schedule without delta_{k+1}."""
        state = transfer.build_construction_a(transfer.polynomial_schedule(2), 2)
        with pytest.raises(StageMismatchError, match="delta_3"):
            transfer.containment_check_streaming(state, 2)

    @pytest.mark.slow
    def test_streamed_top_stage_matches_next_build(self, schedule, state_a):
        """Test the streamed value at k = 3 equals the check on a stage-4 build."""
        deeper = transfer.build_construction_a(schedule, 4)
        assert transfer.containment_check_streaming(state_a, 3) == pytest.approx(
            transfer.containment_check(deeper, 3), abs=1e-12
        )

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_direction_density(self, state_a, k):
        """Test the pairs through stage k are 2 delta_k dense in S^1."""
        assert transfer.direction_density_gap(state_a, k) <= 2 * state_a.schedule.delta(k) + 1e-9

    def test_single_stage_fine_scale_count(self):
        """Test N_r = #P_1 once r is below the point gap."""
        schedule = transfer.polynomial_schedule(1, a=0.0, b=0.0, offset=6.0)
        state = transfer.build_construction_a(schedule, 1)
        assert covering_count(state.points[1], 1e-4) == state.points[1].shape[0]

    def test_covering_recursion_report(self, state_a):
        """Test the recursion report at k = 2 uses r = delta_2^{3/2}."""
        report = transfer.covering_recursion_check(state_a, 2)
        assert report.r == pytest.approx(2.0**-9)
        assert report.unit_bound == pytest.approx(2.0**9)
        assert report.n_r > 0
        assert report.predicted_slope == pytest.approx(1.0)

    def test_covering_recursion_needs_next_stage(self, state_a):
        """Test k = stage is refused."""
        with pytest.raises(StageMismatchError):
            transfer.covering_recursion_check(state_a, state_a.stage)

    def test_predicted_lower_slope_first_stage(self, schedule):
        """Test the finite-k slope at k = 1 is 2/3."""
        assert transfer.predicted_lower_slope(schedule, 1) == pytest.approx(2.0 / 3.0)


class TestSupplementalReports:
    """Test fast decay, Hausdorff cover and scale lookup."""

    def test_fast_decay(self, schedule):
        """Test the tail condition holds at k = 1 of the default schedule."""
        report = transfer.fast_decay_report(schedule, 1)
        assert report.tail_ok
        assert report.next_ok
        assert report.log2_twice_next == -5.0

    def test_fast_decay_needs_next_scale(self, schedule):
        """Test k = len(schedule) is rejected."""
        with pytest.raises(InvalidParameterError):
            transfer.fast_decay_report(schedule, len(schedule))

    def test_hausdorff_cover(self, state_a):
        """Test the k = 1 cover uses P_0 at 3 delta_1 and P_1 at 3 delta_2."""
        cover = transfer.hausdorff_cover(state_a, 1)
        assert cover.rows[0].count == 1
        assert cover.rows[0].radius == pytest.approx(3 * 2.0**-3)
        assert cover.rows[1].count == state_a.points[1].shape[0]
        assert cover.rows[1].radius == pytest.approx(3 * 2.0**-6)

    def test_stage_for_scale(self, schedule):
        """Test the smallest stage with delta_k <= 2 delta."""
        assert transfer.stage_for_scale(schedule, 2.0**-4) == 1
        assert transfer.stage_for_scale(schedule, 2.0**-10) == 3
        with pytest.raises(InvalidParameterError):
            transfer.stage_for_scale(schedule, 2.0**-30)

    def test_pairs_for_scale_needs_stage(self, state_a):
        """Test a scale beyond the built stages is refused."""
        with pytest.raises(StageMismatchError):
            transfer.pairs_for_scale(state_a, 2.0**-15)
