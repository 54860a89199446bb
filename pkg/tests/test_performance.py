#!/usr/bin/env python3
"""
Throughput check for a year of one-minute meter readings.

Run with: pytest -m performance
"""

import time

import numpy as np
import pytest

from household_baseline.ingestion import ReadingBatch, clean_readings, parse_readings_file, write_readings_file
from household_baseline.timeseries import MeterKind, aggregate_to_hourly

from conftest import YEAR_2020_UTC

MINUTES_PER_YEAR = 365 * 24 * 60


@pytest.mark.performance
class TestIngestThroughput:

    def test_minute_year_under_five_seconds(self, tmp_path):
        t = YEAR_2020_UTC + 60 * np.arange(MINUTES_PER_YEAR, dtype=np.int64)
        v = np.full(MINUTES_PER_YEAR, 0.01)
        path = tmp_path / "minutes.csv"
        write_readings_file(path, ReadingBatch(t, v))

        started = time.perf_counter()
        readings = parse_readings_file(path)
        cleaned, report = clean_readings(readings, MeterKind.INTERVAL_KWH)
        series = aggregate_to_hourly(cleaned, MeterKind.INTERVAL_KWH, "Europe/Athens")
        elapsed = time.perf_counter() - started

        assert report.kept == MINUTES_PER_YEAR
        assert series.missing_count == 0
        assert np.nansum(series.values) == pytest.approx(0.01 * MINUTES_PER_YEAR, rel=1e-9)
        assert elapsed < 5.0, f"ingest took {elapsed:.2f}s"
