"""
Variance ladder: prefix sums, the ratio bound D, h(n) and index windows
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from app.errors import DegenerateProfileError, DomainError, HorizonExceededError, RangeError
from app.schedules import block_schedule
from app.variance_ladder import (
    VarianceProfile,
    bracket_check,
    compensated_cumsum,
    cumulative_variance,
    index_of_variance,
    index_of_variance_many,
    ratio_bound,
    window,
)
from app.windows import WindowFamily

variances = st.lists(
    st.one_of(st.just(0.0), st.floats(min_value=1e-6, max_value=10.0)),
    min_size=2,
    max_size=200,
)


def _growing_profile(values):
    v = list(values)
    v[-1] = v[-1] + 0.5
    return VarianceProfile.from_variances(v)


class TestCompensatedCumsum:

    def test_tenths_sum_to_one(self):
        out = compensated_cumsum([0.1] * 10)
        assert abs(out[-1] - 1.0) <= 2.3e-16

    def test_empty(self):
        assert compensated_cumsum([]).size == 0

    @given(st.lists(st.floats(min_value=0.0, max_value=1e6, allow_nan=False), min_size=1, max_size=300))
    def test_non_decreasing_for_non_negative_input(self, values):
        out = compensated_cumsum(values)
        assert np.all(np.diff(out) >= 0)


class TestVarianceProfile:

    def test_prefix_sums(self):
        profile = VarianceProfile.from_variances([1.0, 2.0, 3.0])
        assert cumulative_variance(profile, 3) == 6.0
        assert profile.length == 3
        assert profile.max_level == 6.0

    def test_index_out_of_range(self):
        profile = VarianceProfile.from_variances([1.0, 2.0, 3.0])
        with pytest.raises(RangeError):
            cumulative_variance(profile, 4)
        with pytest.raises(RangeError):
            cumulative_variance(profile, 0)

    def test_rejects_negative_variance(self):
        with pytest.raises(DomainError):
            VarianceProfile.from_variances([1.0, -1.0])

    def test_rejects_all_zero(self):
        with pytest.raises(DegenerateProfileError):
            VarianceProfile.from_variances([0.0, 0.0, 0.0])

    def test_rejects_profile_that_never_grows(self):
        with pytest.raises(DegenerateProfileError):
            VarianceProfile.from_variances([1.0, 0.0, 0.0])

    def test_rejects_empty(self):
        with pytest.raises(RangeError):
            VarianceProfile.from_variances([])

    def test_first_positive_skips_zero_prefix(self):
        profile = VarianceProfile.from_variances([0.0, 0.0, 1.0, 1.0])
        assert profile.first_positive == 3


class TestRatioBound:

    def test_unit_variances(self, unit_profile):
        bound = ratio_bound(unit_profile)
        assert bound.value == pytest.approx(math.sqrt(2.0))
        assert bound.argmax == 1

    def test_leading_zeros_skipped(self):
        bound = ratio_bound(VarianceProfile.from_variances([0.0, 0.0, 1.0, 1.0]))
        assert bound.value == pytest.approx(math.sqrt(2.0))
        assert bound.argmax == 3

    @given(variances)
    def test_matches_brute_force(self, values):
        profile = _growing_profile(values)
        prefix = profile.prefix
        ratios = [
            math.sqrt(prefix[j + 1] / prefix[j])
            for j in range(1, profile.length)
            if prefix[j] > 0
        ]
        expected = max(ratios + [1.0])
        assert ratio_bound(profile).value == pytest.approx(expected, rel=1e-12)


class TestIndexOfVariance:

    def test_unit_profile(self, unit_profile):
        assert index_of_variance(unit_profile, 3.5) == 3
        assert index_of_variance(unit_profile, 1.0) == 1
        assert index_of_variance(unit_profile, 10**4) == 10**4

    def test_beyond_horizon(self, unit_profile):
        with pytest.raises(HorizonExceededError) as info:
            index_of_variance(unit_profile, 10**4 + 0.5)
        assert info.value.max_level == 10**4

    def test_below_first_term(self, unit_profile):
        with pytest.raises(DomainError):
            index_of_variance(unit_profile, 0.5)

    def test_nan(self, unit_profile):
        with pytest.raises(DomainError):
            index_of_variance(unit_profile, float("nan"))

    @given(variances, st.floats(min_value=0.0, max_value=1.0))
    def test_matches_exhaustive_scan(self, values, frac):
        profile = _growing_profile(values)
        lo = float(profile.prefix[1])
        level = lo + frac * (profile.max_level - lo)
        assume(lo <= level <= profile.max_level)
        expected = max(k for k in range(1, profile.length + 1) if profile.prefix[k] <= level)
        assert index_of_variance(profile, level) == expected
        assert index_of_variance_many(profile, [level])[0] == expected


class TestWindow:

    def test_constant_width(self, unit_profile):
        w = window(unit_profile, 10.0, WindowFamily.constant(2.0))
        assert (w.lo, w.hi) == (10, 20)
        assert w.size == 10
        assert list(w.indices())[0] == 11

    def test_empty_window(self):
        profile = VarianceProfile.from_variances([1.0] + [0.0] * 7 + [8.0])
        w = window(profile, 1.5, WindowFamily.constant(2.0))
        assert w.is_empty

    def test_top_beyond_horizon(self, unit_profile):
        with pytest.raises(HorizonExceededError):
            window(unit_profile, 6000.0, WindowFamily.constant(2.0))

    def test_level_below_one(self, unit_profile):
        with pytest.raises(DomainError):
            window(unit_profile, 0.5, WindowFamily.constant(2.0))


class TestBracketCheck:

    def test_unit_profile_on_surrogate_blocks(self, unit_profile):
        schedule = block_schedule(1.0, 4, mode="scaled_surrogate", base=2.0, growth=2.0)
        report = bracket_check(unit_profile, schedule.grid())
        assert report.ok
        assert report.checked == 13
        assert report.D == pytest.approx(math.sqrt(2.0))

    def test_levels_beyond_horizon_are_skipped(self):
        profile = VarianceProfile.from_variances(np.ones(100))
        schedule = block_schedule(1.0, 4, mode="scaled_surrogate", base=2.0, growth=2.0)
        report = bracket_check(profile, schedule.grid())
        assert report.ok
        assert report.skipped_beyond_horizon > 0
        assert report.checked + report.skipped_beyond_horizon + report.skipped_below_first_positive == 13

    def test_violation_with_too_small_D(self, unit_profile):
        report = bracket_check(unit_profile, [(1, 0, math.log(2.5))], D=1.0)
        assert not report.ok
        assert report.violations[0]["index"] == 2
