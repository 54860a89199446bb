#!/usr/bin/env python3
"""
Tests for adjustment factors, monthly fill, the weekly distribution and
deterministic and stochastic baseline synthesis.
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from household_baseline.baseline import (
    FOUR_WEEK_MONTH_HOURS,
    AdjustmentFactor,
    BaselineYear,
    FactorMode,
    Generation,
    LayoutMode,
    SlotSamplePool,
    WeeklyDistribution,
    adjustment_factor,
    annual_total,
    fill_monthly,
    read_baseline_csv,
    sample_stochastic,
    synthesize_baseline,
    weekly_distribution,
    write_baseline_csv,
)
from household_baseline.errors import (
    DegenerateDistributionError,
    InsufficientDataError,
    InvalidFactorError,
    ParseError,
    PreconditionError,
    ValidationError,
)
from household_baseline.reference import ReferenceProfile
from household_baseline.timeseries import HourlySeries, MonthlyTotals, Provenance, Slot, Weekday

from conftest import YEAR_2020_UTC, hourly_profile

# Mon 2020-01-06 00:00 UTC
MONDAY_2020_UTC = YEAR_2020_UTC + 5 * 86400

UNIFORM = WeeklyDistribution(np.full(168, 1 / 168))

# Hourly kWh for one to two weeks from a Monday, with at least one non-zero hour
week_values = st.lists(
    st.one_of(st.just(0.0), st.floats(min_value=0.01, max_value=50.0)), min_size=168, max_size=336,
).filter(lambda values: sum(values) > 0)

twelve_totals = st.lists(st.floats(min_value=0.0, max_value=5000.0), min_size=12, max_size=12)

slot_shares = st.lists(st.floats(min_value=0.01, max_value=10.0), min_size=168, max_size=168).map(
    lambda weights: WeeklyDistribution(np.array(weights) / np.sum(weights))
)


def complete_months(total: float = 672.0) -> MonthlyTotals:
    return MonthlyTotals.from_observed({m: total for m in range(1, 13)})


def observed_pool(weeks: int = 2) -> SlotSamplePool:
    series = HourlySeries(MONDAY_2020_UTC, hourly_profile(weeks * 168), "UTC")
    return weekly_distribution(series)[1]


class TestAdjustmentFactor:

    def test_ratio(self, flat_reference):
        f = adjustment_factor(MonthlyTotals.from_observed({1: 300.0, 2: 320.0}), flat_reference)
        assert f.value == pytest.approx(0.775)
        assert f.k == 2

    def test_paper_literal(self, flat_reference):
        observed = MonthlyTotals.from_observed({1: 300.0, 2: 320.0})
        f = adjustment_factor(observed, flat_reference, FactorMode.PAPER_LITERAL)
        assert f.value == pytest.approx(0.225)

    def test_no_observed_months(self, flat_reference):
        with pytest.raises(InsufficientDataError, match="found 0"):
            adjustment_factor(MonthlyTotals.from_observed({}), flat_reference)

    def test_serialisation(self):
        f = AdjustmentFactor(0.775, FactorMode.RATIO, 2)
        assert AdjustmentFactor.from_dict(f.to_dict()) == f

    def test_literal_factor_above_one_rejected(self):
        with pytest.raises(ValidationError):
            AdjustmentFactor(1.5, FactorMode.PAPER_LITERAL, 1)

    @pytest.mark.property
    @given(st.dictionaries(
        st.integers(min_value=1, max_value=12),
        st.floats(min_value=1.0, max_value=2000.0),
        min_size=1,
    ), st.lists(st.floats(min_value=50.0, max_value=2000.0), min_size=12, max_size=12))
    def test_modes_sum_to_one(self, observed, reference):
        ref = ReferenceProfile("EL", tuple(reference))
        totals = MonthlyTotals.from_observed(observed)
        ratio = adjustment_factor(totals, ref, FactorMode.RATIO).value
        literal = adjustment_factor(totals, ref, FactorMode.PAPER_LITERAL).value
        assert ratio + literal == pytest.approx(1.0, abs=1e-12)


class TestFillMonthly:

    def test_absent_month_filled_from_reference(self, flat_reference):
        observed = MonthlyTotals.from_observed({1: 300.0, 2: 320.0})
        filled = fill_monthly(observed, flat_reference, AdjustmentFactor(0.775, FactorMode.RATIO, 2))
        assert filled[3].provenance is Provenance.FILLED
        assert filled[3].total_kwh == pytest.approx(310.0)
        assert filled[1] == observed[1]
        assert not filled.with_provenance(Provenance.ABSENT)

    def test_nothing_to_fill(self, flat_reference):
        observed = complete_months(500.0)
        assert fill_monthly(observed, flat_reference, AdjustmentFactor(1.25, FactorMode.RATIO, 12)) == observed

    def test_negative_literal_factor(self, flat_reference):
        observed = MonthlyTotals.from_observed({1: 600.0})
        f = adjustment_factor(observed, flat_reference, FactorMode.PAPER_LITERAL)
        assert f.value == pytest.approx(-0.5)
        with pytest.raises(InvalidFactorError):
            fill_monthly(observed, flat_reference, f)

    def test_zero_ratio(self, flat_reference):
        with pytest.raises(InvalidFactorError):
            fill_monthly(MonthlyTotals.from_observed({1: 0.0}), flat_reference,
                         AdjustmentFactor(0.0, FactorMode.RATIO, 1))

    def test_factor_from_other_months(self, flat_reference):
        with pytest.raises(PreconditionError):
            fill_monthly(MonthlyTotals.from_observed({1: 300.0}), flat_reference,
                         AdjustmentFactor(0.775, FactorMode.RATIO, 2))

    def test_ratio_fill_preserves_observed_proportion(self, flat_reference):
        observed = MonthlyTotals.from_observed({6: 200.0, 7: 240.0})
        f = adjustment_factor(observed, flat_reference)
        filled = fill_monthly(observed, flat_reference, f)
        for m in filled.with_provenance(Provenance.FILLED):
            assert m.total_kwh / flat_reference[m.month] == pytest.approx(f.value)

    @pytest.mark.property
    @given(st.lists(st.floats(min_value=50.0, max_value=2000.0), min_size=12, max_size=12),
           st.sets(st.integers(min_value=1, max_value=12), min_size=1, max_size=11))
    def test_observed_equal_to_reference_fills_reference(self, reference, months):
        ref = ReferenceProfile("EL", tuple(reference))
        observed = MonthlyTotals.from_observed({m: ref[m] for m in months})
        filled = fill_monthly(observed, ref, adjustment_factor(observed, ref, FactorMode.RATIO))
        for m in filled.with_provenance(Provenance.FILLED):
            assert m.total_kwh == pytest.approx(ref[m.month], rel=1e-12)

    @pytest.mark.property
    @given(st.lists(st.floats(min_value=50.0, max_value=2000.0), min_size=12, max_size=12),
           st.sets(st.integers(min_value=1, max_value=12), min_size=1, max_size=11))
    def test_zero_observed_literal_fill_is_reference(self, reference, months):
        ref = ReferenceProfile("EL", tuple(reference))
        observed = MonthlyTotals.from_observed({m: 0.0 for m in months})
        filled = fill_monthly(observed, ref, adjustment_factor(observed, ref, FactorMode.PAPER_LITERAL))
        for m in filled.with_provenance(Provenance.FILLED):
            assert m.total_kwh == ref[m.month]


class TestWeeklyDistribution:

    def test_constant_series_is_uniform(self):
        dist, _ = weekly_distribution(HourlySeries(MONDAY_2020_UTC, np.ones(168), "UTC"))
        np.testing.assert_allclose(dist.shares, 1 / 168)

    def test_single_nonzero_hour(self):
        values = np.zeros(168)
        values[67] = 2.5
        dist, _ = weekly_distribution(HourlySeries(MONDAY_2020_UTC, values, "UTC"))
        assert dist.share(Slot(Weekday.WED, 19)) == pytest.approx(1.0)
        assert dist.shares.sum() == pytest.approx(1.0)

    def test_two_weeks_match_slot_means(self):
        values = hourly_profile(336) * np.repeat([1.0, 3.0], 168)
        dist, pool = weekly_distribution(HourlySeries(MONDAY_2020_UTC, values, "UTC"))
        means = np.array([(values[i] + values[i + 168]) / 2 for i in range(168)])
        np.testing.assert_allclose(dist.shares, means / means.sum(), rtol=1e-12)
        assert list(pool.sizes) == [2] * 168
        assert list(pool[5]) == [values[5], values[173]]

    def test_all_zero_is_degenerate(self):
        with pytest.raises(DegenerateDistributionError):
            weekly_distribution(HourlySeries(MONDAY_2020_UTC, np.zeros(168), "UTC"))

    def test_all_missing(self):
        with pytest.raises(InsufficientDataError):
            weekly_distribution(HourlySeries(MONDAY_2020_UTC, np.full(168, np.nan), "UTC"))

    def test_monday_only_imputes_other_days(self):
        monday = hourly_profile(24)
        dist, pool = weekly_distribution(HourlySeries(MONDAY_2020_UTC, monday, "UTC"))
        np.testing.assert_allclose(dist.as_matrix(), np.tile(monday / monday.sum() / 7, (7, 1)))
        assert pool.sizes.sum() == 24
        np.testing.assert_array_equal(pool.candidates(24 + 3), [monday[3]])

    def test_partial_day_coverage_imputes_by_hour(self):
        values = np.concatenate([np.full(24, 1.0), np.full(24, 3.0)])
        dist, _ = weekly_distribution(HourlySeries(MONDAY_2020_UTC, values, "UTC"))
        matrix = dist.as_matrix()
        assert matrix[0, 0] * 3 == pytest.approx(matrix[1, 0])
        np.testing.assert_allclose(matrix[2:], matrix[2, 0])
        # unobserved days take the mean of Monday and Tuesday
        assert matrix[4, 10] == pytest.approx(2 * matrix[0, 10])

    def test_scale_invariance(self):
        values = hourly_profile(336)
        a, _ = weekly_distribution(HourlySeries(MONDAY_2020_UTC, values, "UTC"))
        b, _ = weekly_distribution(HourlySeries(MONDAY_2020_UTC, values * 7.5, "UTC"))
        np.testing.assert_allclose(a.shares, b.shares, rtol=1e-12)

    @pytest.mark.property
    @given(week_values, st.floats(min_value=0.01, max_value=1000.0))
    def test_generated_shares_sum_to_one_and_ignore_scale(self, values, scale):
        values = np.array(values)
        a, _ = weekly_distribution(HourlySeries(MONDAY_2020_UTC, values, "UTC"))
        b, _ = weekly_distribution(HourlySeries(MONDAY_2020_UTC, values * scale, "UTC"))
        assert a.shares.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(a.shares >= 0)
        np.testing.assert_allclose(b.shares, a.shares, rtol=1e-9, atol=1e-15)

    def test_serialisation(self):
        dist, _ = weekly_distribution(HourlySeries(MONDAY_2020_UTC, hourly_profile(168), "UTC"))
        data = dist.to_dict()
        assert list(data["shares"]) == ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]
        assert WeeklyDistribution.from_dict(data) == dist

    def test_shares_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            WeeklyDistribution(np.full(168, 1 / 100))


class TestSynthesizeBaseline:

    def test_uniform_month_of_672_is_one_per_hour(self):
        baseline = synthesize_baseline(UNIFORM, complete_months())
        assert len(baseline.months[0]) == FOUR_WEEK_MONTH_HOURS
        np.testing.assert_allclose(baseline.months[0], 1.0)
        assert annual_total(baseline) == pytest.approx(8064.0)
        assert baseline.generation is Generation.DETERMINISTIC

    def test_blocks_sum_to_month_totals(self, flat_reference):
        dist, _ = weekly_distribution(HourlySeries(MONDAY_2020_UTC, hourly_profile(336), "UTC"))
        observed = MonthlyTotals.from_observed({1: 300.0, 2: 320.0})
        months = fill_monthly(observed, flat_reference, adjustment_factor(observed, flat_reference))
        baseline = synthesize_baseline(dist, months)
        for m in months:
            assert baseline.month_total(m.month) == pytest.approx(m.total_kwh, rel=1e-9)
        assert annual_total(baseline) == pytest.approx(months.totals.sum(), rel=1e-9)

    def test_weeks_repeat_within_month(self):
        dist, _ = weekly_distribution(HourlySeries(MONDAY_2020_UTC, hourly_profile(168), "UTC"))
        block = synthesize_baseline(dist, complete_months(100.0)).months[4]
        weeks = block.reshape(4, 168)
        np.testing.assert_array_equal(weeks[0], weeks[3])

    def test_zero_month_is_all_zero(self):
        months = MonthlyTotals.from_observed({m: (0.0 if m == 8 else 500.0) for m in range(1, 13)})
        baseline = synthesize_baseline(UNIFORM, months)
        assert not baseline.months[7].any()

    def test_absent_month_rejected(self):
        with pytest.raises(PreconditionError):
            synthesize_baseline(UNIFORM, MonthlyTotals.from_observed({1: 300.0}))

    def test_calendar_layout_follows_month_lengths(self):
        baseline = synthesize_baseline(UNIFORM, complete_months(), LayoutMode.CALENDAR, year=2021)
        assert [len(b) for b in baseline.months[:3]] == [744, 672, 744]
        for month in range(1, 13):
            assert baseline.month_total(month) == pytest.approx(672.0)
        assert baseline.labels(2)[0].day == 1

    def test_calendar_layout_needs_year(self):
        with pytest.raises(PreconditionError):
            synthesize_baseline(UNIFORM, complete_months(), LayoutMode.CALENDAR)

    @pytest.mark.property
    @given(st.floats(min_value=0.0, max_value=5000.0), st.floats(min_value=0.0, max_value=5000.0))
    def test_larger_month_total_never_lowers_an_hour(self, low, extra):
        small = synthesize_baseline(UNIFORM, complete_months(low))
        large = synthesize_baseline(UNIFORM, complete_months(low + extra))
        assert np.all(large.months[0] >= small.months[0])

    @pytest.mark.property
    @given(slot_shares, twelve_totals, st.sampled_from([LayoutMode.PAPER_LITERAL, LayoutMode.CALENDAR]))
    def test_generated_blocks_conserve_month_totals(self, dist, totals, layout):
        months = MonthlyTotals.from_observed(dict(enumerate(totals, start=1)))
        year = 2021 if layout is LayoutMode.CALENDAR else None
        baseline = synthesize_baseline(dist, months, layout, year=year)
        for m in months:
            assert baseline.month_total(m.month) == pytest.approx(m.total_kwh, rel=1e-9, abs=1e-9)
        assert annual_total(baseline) == pytest.approx(sum(totals), rel=1e-9, abs=1e-9)

    @pytest.mark.property
    @given(slot_shares, twelve_totals, st.integers(min_value=1, max_value=12),
           st.floats(min_value=0.01, max_value=5000.0))
    def test_raising_one_month_changes_only_its_block(self, dist, totals, month, extra):
        before = dict(enumerate(totals, start=1))
        after = {**before, month: before[month] + extra}
        a = synthesize_baseline(dist, MonthlyTotals.from_observed(before))
        b = synthesize_baseline(dist, MonthlyTotals.from_observed(after))
        for m in range(1, 13):
            if m == month:
                assert np.all(b.months[m - 1] >= a.months[m - 1])
            else:
                np.testing.assert_array_equal(b.months[m - 1], a.months[m - 1])
        assert annual_total(b) > annual_total(a)


class TestSampleStochastic:

    def test_same_seed_same_baseline(self):
        pool = observed_pool()
        a = sample_stochastic(pool, complete_months(), seed=7)
        b = sample_stochastic(pool, complete_months(), seed=7)
        assert a == b
        assert all(np.array_equal(x, y) for x, y in zip(a.draws, b.draws))
        assert a.generation is Generation.STOCHASTIC
        assert a.seed == 7

    def test_different_seeds_differ(self):
        pool = observed_pool()
        assert sample_stochastic(pool, complete_months(), seed=1) != sample_stochastic(pool, complete_months(), seed=2)

    def test_draws_come_from_slot_pools(self):
        pool = observed_pool()
        baseline = sample_stochastic(pool, complete_months(), seed=11)
        for block in baseline.draws:
            for position, value in enumerate(block):
                assert value in pool.candidates(position % 168)

    def test_blocks_rescaled_to_month_totals(self):
        months = MonthlyTotals.from_observed({m: 100.0 * m for m in range(1, 13)})
        baseline = sample_stochastic(observed_pool(), months, seed=3)
        for m in months:
            assert baseline.month_total(m.month) == pytest.approx(m.total_kwh, rel=1e-9)

    def test_empty_pool(self):
        empty = SlotSamplePool(tuple(np.empty(0) for _ in range(168)))
        with pytest.raises(InsufficientDataError):
            sample_stochastic(empty, complete_months(), seed=1)

    def test_seed_must_be_unsigned(self):
        with pytest.raises(ValidationError):
            sample_stochastic(observed_pool(), complete_months(), seed=-1)

    def test_calendar_layout(self):
        baseline = sample_stochastic(observed_pool(), complete_months(), seed=5,
                                     layout=LayoutMode.CALENDAR, year=2020)
        assert len(baseline.months[1]) == 29 * 24
        assert baseline.month_total(2) == pytest.approx(672.0)


class TestBaselinePersistence:

    def test_paper_literal_round_trip(self, tmp_path):
        dist, _ = weekly_distribution(HourlySeries(MONDAY_2020_UTC, hourly_profile(168), "UTC"))
        baseline = synthesize_baseline(dist, complete_months(433.3))
        path = tmp_path / "baseline.csv"
        write_baseline_csv(baseline, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "month,week,day,hour,kwh"
        assert lines[1].startswith("1,1,Mon,0,")
        assert len(lines) == 1 + 12 * FOUR_WEEK_MONTH_HOURS
        assert read_baseline_csv(path) == baseline

    def test_calendar_round_trip(self, tmp_path):
        baseline = synthesize_baseline(UNIFORM, complete_months(), LayoutMode.CALENDAR,
                                       year=2020, timezone="Europe/Athens")
        path = tmp_path / "baseline.csv"
        write_baseline_csv(baseline, path)
        assert read_baseline_csv(path, "Europe/Athens") == baseline

    def test_unparsable_calendar_value(self, tmp_path):
        path = tmp_path / "baseline.csv"
        path.write_text("timestamp,kwh\n0,abc\n")
        with pytest.raises(ParseError) as exc:
            read_baseline_csv(path)
        assert (exc.value.line, exc.value.field) == (2, "kwh")

    def test_unparsable_four_week_value(self, tmp_path):
        baseline = synthesize_baseline(UNIFORM, complete_months())
        path = tmp_path / "baseline.csv"
        write_baseline_csv(baseline, path)
        lines = path.read_text().splitlines()
        lines[5] = lines[5].rsplit(",", 1)[0] + ",n/a"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError) as exc:
            read_baseline_csv(path)
        assert (exc.value.line, exc.value.field) == (6, "kwh")

    def test_rows_out_of_order(self, tmp_path):
        baseline = synthesize_baseline(UNIFORM, complete_months())
        path = tmp_path / "baseline.csv"
        write_baseline_csv(baseline, path)
        lines = path.read_text().splitlines()
        lines[1], lines[2] = lines[2], lines[1]
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError) as exc:
            read_baseline_csv(path)
        assert (exc.value.line, exc.value.field) == (2, "hour")

    def test_unknown_header(self, tmp_path):
        path = tmp_path / "baseline.csv"
        path.write_text("when,kwh\n0,1.0\n")
        with pytest.raises(ParseError) as exc:
            read_baseline_csv(path)
        assert exc.value.field == "header"

    def test_same_seed_writes_identical_bytes(self, tmp_path):
        pool = observed_pool()
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path in paths:
            write_baseline_csv(sample_stochastic(pool, complete_months(), seed=42), path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_block_length_checked(self):
        with pytest.raises(ValidationError):
            BaselineYear(tuple(np.ones(100) for _ in range(12)))
