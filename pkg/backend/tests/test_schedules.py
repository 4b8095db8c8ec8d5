"""
Block and star schedules
"""

import math

import pytest

from app.errors import DomainError, RangeError, ScheduleInfeasibleError
from app.schedules import block_length, block_schedule, star_schedule
from app.windows import WindowFamily


class TestBlockLength:

    @pytest.mark.parametrize("j, expected", [(1, 0), (2, 2), (3, 3), (4, 4), (8, 6)])
    def test_m_equals_one(self, j, expected):
        assert block_length(1.0, j) == expected

    def test_index_must_be_positive(self):
        with pytest.raises(DomainError):
            block_length(1.0, 0)


class TestBlockSchedule:

    def test_paper_exact_levels(self):
        schedule = block_schedule(1.0, 4)
        assert schedule.block(1).log_N == 0.0
        assert schedule.block(2).level(0) == pytest.approx(256.0)
        assert schedule.block(3).level(0) == pytest.approx(3.0 ** 12)
        assert schedule.block(1).covers_window is None

    def test_levels_strictly_increase(self):
        schedule = block_schedule(2.0, 12)
        logs = [log for _, _, log in schedule.grid()]
        assert all(b > a for a, b in zip(logs, logs[1:]))

    def test_rows_cover_every_level(self):
        schedule = block_schedule(1.0, 5, mode="scaled_surrogate")
        assert len(schedule.rows()) == sum(b.t + 1 for b in schedule.blocks)

    def test_surrogate_blocks_are_disjoint(self):
        schedule = block_schedule(1.0, 6, mode="scaled_surrogate", base=2.0, growth=2.0)
        for a, b in zip(schedule.blocks, schedule.blocks[1:]):
            assert b.log_N == pytest.approx(a.log_top + math.log(2.0))

    def test_large_levels_stay_in_log_space(self):
        schedule = block_schedule(1.0, 200)
        assert schedule.block(200).log_N > 700
        with pytest.raises(RangeError):
            schedule.block(200).level(0)

    def test_t_outside_block(self):
        schedule = block_schedule(1.0, 3)
        with pytest.raises(RangeError):
            schedule.block(2).log_level(3)

    def test_unknown_block(self):
        with pytest.raises(RangeError):
            block_schedule(1.0, 3).block(4)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"M": 0.0, "j_max": 3},
            {"M": 1.0, "j_max": 1},
            {"M": 1.0, "j_max": 3, "mode": "fast"},
            {"M": 1.0, "j_max": 3, "mode": "scaled_surrogate", "growth": 1.0},
            {"M": 1.0, "j_max": 3, "mode": "scaled_surrogate", "base": 0.5},
        ],
    )
    def test_invalid_parameters(self, kwargs):
        with pytest.raises(DomainError):
            block_schedule(**kwargs)

    def test_paper_exact_covers_windows_eventually(self):
        schedule = block_schedule(1.0, 40)
        start = schedule.covers_from()
        assert start is not None
        assert all(b.covers_window for b in schedule.blocks[start - 1:])


class TestStarSchedule:

    def test_power_log_start(self):
        star = star_schedule(WindowFamily.power_log(1.0), 1.0, 5)
        assert star.K == 2.0
        assert star.steps[0].log_N == pytest.approx(2.0)
        assert star.steps[0].u == 1
        assert star.implication_holds()

    def test_steps_multiply_by_k_to_the_u(self):
        star = star_schedule(WindowFamily.power_log(2.0), 1.5, 6)
        log_k = math.log(star.K)
        for a, b in zip(star.steps, star.steps[1:]):
            assert b.log_N == pytest.approx(a.log_N + a.u * log_k)
            assert a.u >= 1

    def test_constant_family(self):
        star = star_schedule(WindowFamily.constant(4.0), 1.0, 4)
        assert [s.u for s in star.steps] == [2, 2, 2, 2]
        assert star.steps[2].log_N == pytest.approx(4.0 * math.log(2.0))

    def test_constant_family_below_k(self):
        with pytest.raises(ScheduleInfeasibleError):
            star_schedule(WindowFamily.constant(1.5), 1.0, 3)

    def test_square_bound_under_cap(self):
        star = star_schedule(WindowFamily.power_log(1.0, cap_at_n=True), 1.0, 6)
        assert all(s.square_bound_ok for s in star.steps)

    def test_explicit_start_too_small(self):
        with pytest.raises(ScheduleInfeasibleError):
            star_schedule(WindowFamily.power_log(1.0), 1.0, 3, start=2.0)

    def test_d_below_one(self):
        with pytest.raises(DomainError):
            star_schedule(WindowFamily.power_log(1.0), 0.5, 3)

    def test_rows(self):
        star = star_schedule(WindowFamily.power_log(1.0), 1.0, 3)
        rows = star.rows()
        assert [r["j"] for r in rows] == [1, 2, 3]
        assert rows[0]["level"] == pytest.approx(math.exp(2.0))
