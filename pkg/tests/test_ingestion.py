#!/usr/bin/env python3
"""
Tests for meter and weather file parsing and reading cleaning.
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from household_baseline.errors import ParseError
from household_baseline.ingestion import (
    MAX_TIMESTAMP,
    ReadingBatch,
    ReadingFormat,
    RawReading,
    clean_readings,
    parse_readings_file,
    parse_weather_file,
    write_readings_file,
)
from household_baseline.timeseries import MeterKind


@pytest.fixture
def write_text(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write


class TestParseReadingsFile:

    def test_single_row(self, write_text):
        path = write_text("energy.csv", "timestamp,energy_kwh\n1591804800,0.42\n")
        batch = parse_readings_file(path)
        assert len(batch) == 1
        assert batch[0] == RawReading(1591804800, 0.42)

    def test_header_only(self, write_text):
        path = write_text("energy.csv", "timestamp,energy_kwh\n")
        assert len(parse_readings_file(path)) == 0

    def test_bad_timestamp_names_line_and_field(self, write_text):
        path = write_text("energy.csv", "timestamp,energy_kwh\nabc,0.42\n")
        with pytest.raises(ParseError) as exc:
            parse_readings_file(path)
        assert exc.value.line == 2
        assert exc.value.field == "timestamp"
        assert "line 2" in str(exc.value)

    def test_bad_value_on_later_line(self, write_text):
        path = write_text("energy.csv", "timestamp,energy_kwh\n1,0.1\n2,0.2\n3,zero\n")
        with pytest.raises(ParseError) as exc:
            parse_readings_file(path)
        assert exc.value.line == 4
        assert exc.value.field == "energy_kwh"

    def test_wrong_header(self, write_text):
        path = write_text("energy.csv", "time,kwh\n1,0.1\n")
        with pytest.raises(ParseError) as exc:
            parse_readings_file(path)
        assert exc.value.line == 1

    def test_json_lines(self, write_text):
        path = write_text("energy.jsonl", '{"t": 1591804800, "v": 0.42}\n{"t": 1591805700, "v": 1}\n')
        batch = parse_readings_file(path, ReadingFormat.JSON_LINES)
        assert list(batch) == [RawReading(1591804800, 0.42), RawReading(1591805700, 1.0)]

    def test_json_lines_bad_value(self, write_text):
        path = write_text("energy.jsonl", '{"t": 1, "v": 0.1}\n{"t": 2, "v": "x"}\n')
        with pytest.raises(ParseError) as exc:
            parse_readings_file(path, ReadingFormat.JSON_LINES)
        assert (exc.value.line, exc.value.field) == (2, "v")

    def test_oversized_timestamp(self, write_text):
        path = write_text("energy.csv", "timestamp,energy_kwh\n1,0.1\n99999999999999999999,1.0\n")
        with pytest.raises(ParseError) as exc:
            parse_readings_file(path)
        assert (exc.value.line, exc.value.field) == (3, "timestamp")

    def test_timestamp_bound(self, write_text):
        path = write_text("energy.csv", f"timestamp,energy_kwh\n{MAX_TIMESTAMP},0.1\n{MAX_TIMESTAMP + 1},0.1\n")
        with pytest.raises(ParseError) as exc:
            parse_readings_file(path)
        assert exc.value.line == 3

    def test_json_lines_oversized_timestamp(self, write_text):
        path = write_text("energy.jsonl", '{"t": 1, "v": 0.1}\n{"t": 99999999999999999999, "v": 1}\n')
        with pytest.raises(ParseError) as exc:
            parse_readings_file(path, ReadingFormat.JSON_LINES)
        assert (exc.value.line, exc.value.field) == (2, "t")

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            parse_readings_file(tmp_path / "absent.csv")

    @pytest.mark.property
    @given(st.lists(
        st.tuples(st.integers(min_value=0, max_value=MAX_TIMESTAMP),
                  st.floats(allow_nan=False, allow_infinity=False)),
        max_size=40,
    ), st.sampled_from([ReadingFormat.CSV, ReadingFormat.JSON_LINES]))
    def test_write_then_parse_returns_same_readings(self, tmp_path_factory, rows, fmt):
        readings = ReadingBatch.from_readings(rows)
        path = write_readings_file(tmp_path_factory.mktemp("readings") / f"r.{fmt.value}", readings, fmt)
        assert parse_readings_file(path, fmt) == readings


class TestParseWeatherFile:

    def test_point_reading(self, write_text):
        path = write_text("weather.csv", "timestamp,temp_c\n1591804800,24.1\n")
        batch = parse_weather_file(path)
        assert batch[0] == RawReading(1591804800, 24.1)
        assert batch.rejected == 0

    def test_empty_data_section(self, write_text):
        path = write_text("weather.csv", "timestamp,temp_c\n")
        assert len(parse_weather_file(path)) == 0

    def test_out_of_range_rejected(self, write_text):
        path = write_text("weather.csv", "timestamp,temp_c\n1,20.0\n2,99.0\n3,-10.0\n")
        batch = parse_weather_file(path)
        assert batch.rejected == 1
        assert list(batch.v) == [20.0, -10.0]


class TestCleanReadings:

    def test_drops_negative_interval_values(self):
        cleaned, report = clean_readings([(1, 0.3), (2, -0.1), (3, 0.2)], MeterKind.INTERVAL_KWH)
        assert list(cleaned.v) == [0.3, 0.2]
        assert report.dropped_negative == 1
        assert report.kept == 2

    def test_drops_spikes(self):
        _, report = clean_readings([(1, 500.0), (2, 0.5)], MeterKind.INTERVAL_KWH, spike_threshold=100.0)
        assert report.dropped_spike == 1

    def test_counts_counter_resets(self):
        cleaned, report = clean_readings(
            [(0, 100.0), (3600, 101.0), (7200, 3.0), (10800, 4.2)], MeterKind.CUMULATIVE_KWH
        )
        assert report.counter_resets == 1
        assert report.dropped_spike == 0
        assert list(cleaned.v) == [100.0, 101.0, 3.0, 4.2]

    def test_sorts_and_keeps_last_duplicate(self):
        cleaned, report = clean_readings([(5, 0.5), (1, 0.1), (5, 0.7)], MeterKind.INTERVAL_KWH)
        assert list(cleaned.t) == [1, 5]
        assert list(cleaned.v) == [0.1, 0.7]
        assert report.duplicates == 1
        assert report.input_count == 3

    @pytest.mark.property
    @given(st.lists(
        st.tuples(st.integers(min_value=0, max_value=10_000),
                  st.floats(min_value=-50, max_value=500, allow_nan=False)),
        max_size=80,
    ))
    def test_idempotent_and_counts_partition(self, rows):
        once, report = clean_readings(rows, MeterKind.INTERVAL_KWH)
        twice, second = clean_readings(once, MeterKind.INTERVAL_KWH)
        assert twice == once
        assert second.kept == report.kept
        assert (report.kept + report.dropped_negative + report.dropped_spike
                == report.input_count - report.duplicates)
        assert np.all(np.diff(once.t) > 0)
