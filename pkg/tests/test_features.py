from datetime import date, datetime, timedelta, timezone

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from velotrace.covariates import CalendarEntry, WeatherRecord
from velotrace.errors import ParameterError, StateError
from velotrace.features import (
    FeatureMatrix,
    MinMaxScaler,
    SlotSeries,
    aggregate_slots,
    build_features,
    chronological_split,
    drop_group,
    feature_target_correlation,
    group_columns,
    read_features_csv,
    write_features_csv,
)

from conftest import make_trip

UTC = timezone.utc
START = datetime(2017, 5, 1, 10, 0, tzinfo=UTC)


def make_slots(counts, width=30, start=START):
    return SlotSeries(width, start, np.asarray(counts, dtype=np.int64))


def weather_for(slots: SlotSeries, temp=15.0, precip=0.0, missing_hours=()):
    first = slots.start.replace(minute=0)
    last = slots.slot_start(len(slots) - 1)
    out = []
    h = first
    while h <= last:
        if h not in missing_hours:
            out.append(WeatherRecord(h, temp, precip, 2.0))
        h += timedelta(hours=1)
    return out


class TestAggregateSlots:
    def test_binning_by_start_time(self):
        trips = [make_trip(start=START + timedelta(minutes=m)) for m in (5, 20, 45)]
        series, oos = aggregate_slots(trips, 30, (START, START + timedelta(minutes=60)))
        assert series.counts.tolist() == [2, 1]
        assert oos == 0

    def test_zero_fill(self):
        series, _ = aggregate_slots([], 60, (START, START + timedelta(hours=1)))
        assert series.counts.tolist() == [0]

    def test_width_60_equals_paired_30(self):
        trips = [make_trip(start=START + timedelta(minutes=m)) for m in (1, 31, 61, 95, 119)]
        span = (START, START + timedelta(hours=2))
        s60, _ = aggregate_slots(trips, 60, span)
        s30, _ = aggregate_slots(trips, 30, span)
        paired = s30.counts.reshape(-1, 2).sum(axis=1)
        assert np.array_equal(s60.counts, paired)

    def test_out_of_span_tallied(self):
        trips = [make_trip(start=START - timedelta(minutes=31)),
                 make_trip(start=START + timedelta(minutes=5))]
        series, oos = aggregate_slots(trips, 30, (START, START + timedelta(minutes=30)))
        assert series.counts.tolist() == [1]
        assert oos == 1

    def test_alignment_validation(self):
        with pytest.raises(ParameterError, match="aligned"):
            aggregate_slots([], 30, (START + timedelta(minutes=5), START + timedelta(minutes=65)))
        with pytest.raises(ParameterError, match="whole number"):
            aggregate_slots([], 60, (START, START + timedelta(minutes=90)))
        with pytest.raises(ParameterError):
            aggregate_slots([], 45, (START, START + timedelta(minutes=90)))


def build(counts, width=30, **kw):
    slots = make_slots(counts, width=width)
    weather = kw.pop("weather", None) or weather_for(slots)
    calendar = kw.pop("calendar", [])
    return build_features(slots, weather, calendar, kw.pop("offset", 120), **kw)


class TestBuildFeatures:
    def test_constant_series_lags(self):
        n = 7 * 48 + 10
        matrix, dropped = build([5] * n)
        assert not dropped
        assert matrix.n_rows == 10
        assert np.all(matrix.column("hour_history") == 5.0)
        assert np.all(matrix.column("week_history") == 5.0)
        assert np.all(matrix.y == 5.0)

    def test_hour_history_is_two_slots_back_at_width_30(self):
        n = 7 * 48 + 3
        counts = list(range(n))
        matrix, _ = build(counts)
        lag_week = 7 * 48
        # row i (slot index lag_week + i) looks 60 minutes = 2 slots back
        assert matrix.column("hour_history")[0] == counts[lag_week - 2]
        assert matrix.column("hour_history")[2] == counts[lag_week]

    def test_hour_history_one_slot_back_at_width_60(self):
        n = 7 * 24 + 3
        counts = list(range(n))
        matrix, _ = build(counts, width=60)
        lag_week = 7 * 24
        assert matrix.column("hour_history")[0] == counts[lag_week - 1]

    def test_weekly_periodic_week_history_equals_target(self):
        rng = np.random.default_rng(1)
        pattern = rng.integers(0, 50, size=336)
        counts = np.tile(pattern, 3)
        matrix, _ = build(counts.tolist())
        assert np.array_equal(matrix.column("week_history"), matrix.y)
        shifted = np.concatenate([counts[7 * 48 - 2: -2]])
        assert np.array_equal(matrix.column("hour_history"), shifted.astype(float))

    def test_one_hot_groups_sum_to_one(self):
        matrix, _ = build(list(range(7 * 48 + 48)))
        for group in ("hour_of_the_day", "month", "season", "day_of_week"):
            cols = group_columns(matrix, group)
            assert np.all(matrix.X[:, cols].sum(axis=1) == 1.0)

    def test_holiday_flag_local_date(self):
        cal = [CalendarEntry(date(2017, 5, 8), "holiday", "x")]
        matrix, _ = build([1] * (7 * 48 + 48), calendar=cal)
        from velotrace.util import local_date
        expected = [1.0 if local_date(s, 120) == date(2017, 5, 8) else 0.0
                    for s in matrix.slot_starts]
        assert matrix.column("holiday").tolist() == expected
        assert sum(expected) > 0

    def test_weather_gap_drops_row(self):
        n = 7 * 48 + 4
        slots = make_slots([1] * n)
        gap = slots.slot_start(7 * 48 + 2).replace(minute=0)
        weather = weather_for(slots, missing_hours={gap})
        matrix, dropped = build_features(slots, weather, [], 120)
        assert len(dropped) == 2  # both half-hour slots of the gap hour
        assert all(reason == "missing-weather" for _, reason in dropped)
        assert matrix.n_rows == n - 7 * 48 - 2

    def test_numeric_hour_variant(self):
        matrix, _ = build([1] * (7 * 48 + 4), hour_as_numeric=True)
        assert "hour_of_the_day" in matrix.column_names
        assert not any(c.startswith("hour_of_the_day=") for c in matrix.column_names)

    def test_hour_history_sum_variant(self):
        n = 7 * 48 + 3
        counts = list(range(n))
        matrix, _ = build(counts, hour_history_sum=True)
        lag_week = 7 * 48
        assert matrix.column("hour_history")[0] == counts[lag_week - 1] + counts[lag_week - 2]

    def test_season_columns(self):
        matrix, _ = build([1] * (7 * 48 + 4))
        assert matrix.column("season=spring").sum() == matrix.n_rows
        assert matrix.column("season=summer").sum() == 0.0

    def test_row_timestamps_strictly_increasing(self):
        matrix, _ = build([1] * (7 * 48 + 20))
        assert all(a < b for a, b in zip(matrix.slot_starts, matrix.slot_starts[1:]))


def toy_matrix(n=200, p_noise=3, seed=0):
    rng = np.random.default_rng(seed)
    y = rng.normal(0, 1, n)
    cols = {"target_copy": y.copy(), "temperature": 0.7 * y + rng.normal(0, 0.5, n)}
    for k in range(p_noise):
        cols[f"noise{k}"] = rng.normal(0, 1, n)
    names = list(cols)
    X = np.column_stack([cols[c] for c in names])
    starts = [START + timedelta(minutes=30 * i) for i in range(n)]
    return FeatureMatrix(X, y, names, starts, 30)


class TestFeatureTargetCorrelation:
    def test_duplicate_target_ranks_first(self):
        ranked = feature_target_correlation(toy_matrix())
        assert ranked[0][0] == "target_copy"
        assert ranked[0][1] == pytest.approx(1.0)

    def test_noise_column_near_zero(self):
        ranked = dict(feature_target_correlation(toy_matrix(n=10_000)))
        for k in range(3):
            assert abs(ranked[f"noise{k}"]) < 0.05

    def test_planted_signal_ranks_above_noise(self):
        ranked = [c for c, _ in feature_target_correlation(toy_matrix(n=2000))]
        assert ranked.index("temperature") < min(ranked.index(f"noise{k}") for k in range(3))

    def test_zero_variance_reported_undefined(self):
        m = toy_matrix(n=50)
        m.X[:, m.column_names.index("noise0")] = 7.0
        ranked = feature_target_correlation(m)
        assert ("noise0", None) in ranked
        assert ranked[-1] == ("noise0", None)


class TestChronologicalSplit:
    def test_eighty_twenty_arithmetic(self):
        plan = chronological_split(toy_matrix(n=20), "80/20")
        assert plan.train_rows == range(0, 16)
        assert plan.test_rows == range(16, 20)
        assert [len(f) for f in plan.cv_folds] == [2, 2, 2, 2, 2, 2, 1, 1, 1, 1]

    def test_hundred_rows_ninety_ten(self):
        plan = chronological_split(toy_matrix(n=100), "90/10")
        assert plan.train_rows == range(0, 90)
        assert all(len(f) == 9 for f in plan.cv_folds)

    def test_folds_partition_training_range(self):
        plan = chronological_split(toy_matrix(n=97), "70/30")
        covered = [i for f in plan.cv_folds for i in f]
        assert covered == list(plan.train_rows)

    def test_no_leakage(self):
        m = toy_matrix(n=60)
        for ratio in ("90/10", "80/20", "70/30", "60/40"):
            plan = chronological_split(m, ratio)
            assert max(m.slot_starts[i] for i in plan.train_rows) < \
                min(m.slot_starts[i] for i in plan.test_rows)

    def test_too_few_rows_rejected(self):
        with pytest.raises(ParameterError):
            chronological_split(toy_matrix(n=19), "90/10")

    def test_unknown_ratio_rejected(self):
        with pytest.raises(ParameterError):
            chronological_split(toy_matrix(n=100), "50/50")

    @given(n=st.integers(25, 400), ratio=st.sampled_from(["90/10", "80/20", "70/30", "60/40"]))
    @settings(max_examples=50, deadline=None)
    def test_split_sizes(self, n, ratio):
        m = toy_matrix(n=n)
        plan = chronological_split(m, ratio)
        frac = int(ratio.split("/")[1]) / 100
        assert len(plan.test_rows) == int(np.floor(n * frac))
        assert len(plan.train_rows) + len(plan.test_rows) == n


class TestMinMaxScaler:
    def test_basic_scaling(self):
        m = toy_matrix(n=30)
        m.X[:, m.column_names.index("temperature")][:3] = [0.0, 5.0, 10.0]
        s = MinMaxScaler().fit(m, range(3))
        out = s.transform(m)
        assert out.column("temperature")[:3].tolist() == [0.0, 0.5, 1.0]

    def test_constant_column_maps_to_zero(self):
        m = toy_matrix(n=10)
        j = m.column_names.index("temperature")
        m.X[:, j] = 7.0
        s = MinMaxScaler().fit(m, range(10))
        assert np.all(s.transform(m).column("temperature") == 0.0)

    def test_target_round_trip(self):
        m = toy_matrix(n=50)
        s = MinMaxScaler().fit(m, range(40))
        back = s.inverse_target(s.scale_target(m.y[:40]))
        assert np.allclose(back, m.y[:40], atol=1e-9)

    def test_unfitted_raises(self):
        with pytest.raises(StateError):
            MinMaxScaler().transform(toy_matrix(n=10))


class TestGroups:
    def test_drop_group_removes_columns(self):
        m, _ = build([1] * (7 * 48 + 4))
        reduced = drop_group(m, "hour_of_the_day")
        assert not any(c.startswith("hour_of_the_day") for c in reduced.column_names)
        assert reduced.X.shape[1] == m.X.shape[1] - 24

    def test_unknown_group_rejected(self):
        m, _ = build([1] * (7 * 48 + 4))
        with pytest.raises(ParameterError):
            group_columns(m, "bogus")


class TestCsvRoundTrip:
    def test_exact_round_trip(self, tmp_path):
        m, _ = build(list(range(7 * 48 + 30)))
        path = tmp_path / "features.csv"
        write_features_csv(m, path)
        back = read_features_csv(path)
        assert back.column_names == m.column_names
        assert np.array_equal(back.X, m.X)
        assert np.array_equal(back.y, m.y)
        assert back.slot_starts == m.slot_starts
        assert back.width_minutes == 30
