"""Tests for covering counts and dimension estimates."""

import math

import numpy as np
import pytest

from dipole_kakeya.exceptions import InvalidParameterError, UnitPairRejection
from dipole_kakeya.schemas.construction import ArcArray
from dipole_kakeya.schemas.geometry import ORIGIN, TWO_PI, Point2, UnitArc
from dipole_kakeya.schemas.reports import CoverEntry, CoverReport
from dipole_kakeya.services.dimension_estimators import (
    assouad_profile,
    assouad_scale_rows,
    box_dimension_fit,
    cover_report,
    coverage_gap,
    covering_count,
    dyadic_scale_pairs,
    dyadic_scales,
    grid_cells,
    hausdorff_content_upper_bound,
    occupied_cells,
)


def _report(power: float, c: float = 3.0) -> CoverReport:
    scales = [2.0**-j for j in range(1, 11)]
    return CoverReport(entries=[CoverEntry(r=r, n_r=int(round(c * r**-power))) for r in scales])


class TestCoveringCount:
    """Test grid covering counts."""

    def test_single_point(self):
        """Test one point occupies one cell at any scale."""
        for r in (1.0, 1e-3, 1e-9):
            assert covering_count(np.array([[0.3, 0.7]]), r) == 1

    def test_segment_samples(self):
        """Test 1001 samples of [0, 1] x {0} at r = 1/8 hit 9 cells."""
        xs = np.linspace(0.0, 1.0, 1001)
        pts = np.column_stack((xs, np.zeros_like(xs)))
        assert covering_count(pts, 1 / 8) == 9

    def test_sampled_circle(self):
        """Test the unit circle, sampled at r/4, is within a factor 2 of 2 pi / r."""
        r = 2.0**-6
        circle = ArcArray.from_arcs([UnitArc(centre=ORIGIN, start=0.0, span=TWO_PI)])
        n_r = covering_count(np.empty((0, 2)), r, arcs=circle)
        expected = TWO_PI / r
        assert expected / 2 <= n_r <= 2 * expected

    def test_origin_shift(self):
        """Test the grid origin moves cell boundaries."""
        pts = np.array([[0.05, 0.05], [0.15, 0.05]])
        assert covering_count(pts, 0.2) == 1
        assert covering_count(pts, 0.2, origin=Point2(x=0.1, y=0.0)) == 2

    def test_grid_cells_floor(self):
        """Test cells are floor((p - origin) / r), negatives included."""
        cells = grid_cells(np.array([[-0.01, 0.25]]), 0.1)
        assert cells.tolist() == [[-1, 2]]

    def test_occupied_cells_distinct(self, rng):
        """Test occupied_cells returns each cell once."""
        pts = rng.uniform(0, 1, size=(500, 2))
        cells = occupied_cells(pts, 0.25)
        assert cells.shape == (16, 2)
        assert covering_count(pts, 0.25) == 16

    def test_non_positive_scale(self):
        """Test r <= 0 is rejected."""
        with pytest.raises(InvalidParameterError):
            covering_count(np.zeros((1, 2)), 0.0)


class TestBoxDimensionFit:
    """Test the log-log fit."""

    @pytest.mark.parametrize("power", [1.0, 2.0])
    def test_power_laws(self, power):
        """Test N_r = c / r^p fits slope p."""
        assert box_dimension_fit(_report(power)) == pytest.approx(power, abs=1e-3)

    def test_lower_mode_needs_subsequence(self):
        """Test lower mode without indices or fit_range is rejected."""
        with pytest.raises(InvalidParameterError):
            box_dimension_fit(_report(1.0), mode="lower")

    def test_lower_mode_on_indices(self):
        """Test lower mode fits only the designated scales."""
        slope = box_dimension_fit(_report(2.0), mode="lower", indices=[4, 5, 6])
        assert slope == pytest.approx(2.0, abs=1e-2)

    def test_too_few_entries(self):
        """Test fewer than three scales are rejected."""
        report = CoverReport(entries=[CoverEntry(r=0.5, n_r=2), CoverEntry(r=0.25, n_r=4)])
        with pytest.raises(InvalidParameterError):
            box_dimension_fit(report)

    def test_cover_report_orders_scales(self):
        """Test cover_report sorts scales from coarse to fine and fits a slope."""
        xs = np.linspace(0.0, 1.0, 4097)
        pts = np.column_stack((xs, xs))
        report = cover_report(pts, [2.0**-8, 2.0**-5, 2.0**-6, 2.0**-7])
        assert report.scales == [2.0**-5, 2.0**-6, 2.0**-7, 2.0**-8]
        assert report.is_monotone()
        assert report.fitted_slope == pytest.approx(1.0, abs=0.05)

    def test_dyadic_scales(self):
        """Test auto-dyadic 5..12 gives 8 scales."""
        scales = dyadic_scales(5, 12)
        assert len(scales) == 8
        assert scales[0] == 2.0**-5


class TestAssouadProfile:
    """Test local covering ratios."""

    def test_lattice_exponent_near_two(self):
        """Test a fine lattice in the unit square gives an exponent about 2."""
        g = np.arange(0, 65) / 64
        pts = np.array(np.meshgrid(g, g)).reshape(2, -1).T
        profile = assouad_profile(
            pts, [(0.25, 2.0**-5)], sample_centres=np.array([[0.5, 0.5]])
        )
        assert 2.0 <= profile.exponent_estimate <= 3.0
        assert profile.samples[0].local_count > 100

    def test_single_point(self):
        """Test one point has exponent 0."""
        profile = assouad_profile(np.array([[0.1, 0.2]]), dyadic_scale_pairs([1, 2], 3))
        assert profile.exponent_estimate == 0.0

    def test_empty_balls_skipped(self):
        """Test centres away from the set are counted as skipped."""
        profile = assouad_profile(
            np.array([[0.0, 0.0]]), [(0.1, 0.01)], sample_centres=np.array([[5.0, 5.0]])
        )
        assert profile.skipped_empty == 1
        assert profile.samples == []

    def test_bad_scale_pair(self):
        """Test r >= R is rejected."""
        with pytest.raises(InvalidParameterError):
            assouad_profile(np.zeros((1, 2)), [(0.1, 0.2)])

    def test_counts_match_ball_by_ball(self, rng):
        """Test the batched counts equal covering_count of each ball on its own."""
        pts = rng.uniform(-1, 1, size=(3000, 2))
        centres = rng.uniform(-1.2, 1.2, size=(40, 2))
        pairs = [(0.5, 2.0**-4), (0.25, 2.0**-6)]
        profile = assouad_profile(pts, pairs, sample_centres=centres)
        expected = []
        for centre in centres:
            for big_r, r in pairs:
                inside = pts[np.hypot(*(pts - centre).T) <= big_r]
                if inside.shape[0]:
                    expected.append((big_r, r, covering_count(inside, r)))
        got = [(s.big_r, s.r, s.local_count) for s in profile.samples]
        assert got == expected
        assert profile.skipped_empty == 2 * len(centres) - len(expected)

    def test_centre_cap(self, rng):
        """Test max_centres limits the sampled centres."""
        pts = rng.uniform(0, 1, size=(500, 2))
        profile = assouad_profile(pts, [(0.5, 0.05)], max_centres=7, seed=3)
        assert len(profile.samples) == 7

    def test_scale_rows(self):
        """Test rows group the samples by scale pair and keep the largest count."""
        g = np.arange(0, 65) / 64
        pts = np.array(np.meshgrid(g, g)).reshape(2, -1).T
        centres = np.array([[0.5, 0.5], [0.0, 0.0]])
        profile = assouad_profile(pts, [(0.25, 2.0**-5)], sample_centres=centres)
        (row,) = assouad_scale_rows(profile)
        assert row.centres == 2
        assert row.max_count == max(s.local_count for s in profile.samples)
        assert row.mean_count < row.max_count
        assert row.exponent == pytest.approx(profile.exponent_estimate)


class TestHausdorffContent:
    """Test the content upper bound along a schedule."""

    def test_constant_schedule_not_decreasing(self):
        """Test delta_{k+1} = delta_k gives at least delta_k^{s-1}."""
        bound = hausdorff_content_upper_bound([-5.0, -5.0, -5.0], 0.5, 1)
        assert bound.value >= (2.0**-5) ** -0.5 - 1e-12

    def test_polynomial_schedule_value(self, schedule):
        """Test k = 3, s = 1/2 against a direct sum."""
        expected = (2.0**3 + 2.0**6) * 2.0**-5.5 + 2.0**11 * 2.0**-9
        bound = hausdorff_content_upper_bound(schedule, 0.5, 3)
        assert bound.value == pytest.approx(expected, rel=1e-12)
        assert bound.log_value == pytest.approx(math.log(expected), rel=1e-12)

    def test_schedule_too_short(self, schedule):
        """Test k + 1 scales are required."""
        with pytest.raises(InvalidParameterError):
            hausdorff_content_upper_bound(schedule, 0.5, 4)

    def test_k_must_be_positive(self, schedule):
        """Test k = 0 is rejected."""
        with pytest.raises(InvalidParameterError):
            hausdorff_content_upper_bound(schedule, 0.5, 0)


class TestCoverageGap:
    """Test angular gaps of pair directions."""

    def test_axis_pairs(self):
        """Test four axis pairs leave a gap of pi/2."""
        second = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        assert coverage_gap(np.zeros((4, 2)), second) == pytest.approx(math.pi / 2)

    def test_single_pair(self):
        """Test one pair and its antipode leave a gap of pi."""
        assert coverage_gap(np.zeros((1, 2)), np.array([[0.6, 0.8]])) == pytest.approx(math.pi)

    def test_non_unit_pair(self):
        """Test pairs off unit distance are rejected."""
        with pytest.raises(UnitPairRejection):
            coverage_gap(np.zeros((1, 2)), np.array([[1.5, 0.0]]))

    def test_construction_a_density(self, state_a):
        """Test the pairs through stage 2 are 2 delta_2 dense."""
        first, second = state_a.pairs_through(2)
        assert coverage_gap(first, second) <= 2 * state_a.schedule.delta(2) + 1e-9
