#!/usr/bin/env python3
"""
Pytest configuration and shared fixtures for the household baseline tests.
"""

import json
import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# Add src directory to Python path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from household_baseline.household import HouseholdConfig, save_household_config  # noqa: E402
from household_baseline.reference import ReferenceProfile, save_reference_profile  # noqa: E402
from household_baseline.timeseries import HourlySeries  # noqa: E402

settings.register_profile("default", max_examples=50, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

ATHENS = "Europe/Athens"

# Wed 2020-06-10 19:00 and Mon 2020-06-15 10:00, Athens local time
ATHENS_WINDOW_START = 1591804800
ATHENS_WINDOW_END = 1592204400

# 2020-01-01 00:00 UTC
YEAR_2020_UTC = 1577836800


def hourly_profile(hours: int, start_hour: int = 0) -> np.ndarray:
    """Deterministic daily-shaped consumption: low at night, evening peak."""
    hour_of_day = (np.arange(hours) + start_hour) % 24
    return 0.3 + 0.2 * np.sin(np.pi * hour_of_day / 24.0) + 0.5 * (hour_of_day >= 18)


@pytest.fixture(scope="session")
def athens_window():
    return ATHENS_WINDOW_START, ATHENS_WINDOW_END


@pytest.fixture
def flat_reference():
    """Reference of 400 kWh for every month."""
    return ReferenceProfile("EL", tuple([400.0] * 12), "test fixture")


@pytest.fixture
def reference_file(tmp_path, flat_reference):
    path = tmp_path / "reference.json"
    save_reference_profile(flat_reference, path)
    return path


@pytest.fixture
def utc_config_file(tmp_path):
    path = tmp_path / "household.json"
    save_household_config(HouseholdConfig(user_id="u-utc", timezone="UTC", seed=7), path)
    return path


@pytest.fixture
def athens_config_file(tmp_path):
    path = tmp_path / "household_athens.json"
    save_household_config(HouseholdConfig(user_id="u-athens", timezone=ATHENS, seed=7), path)
    return path


@pytest.fixture(scope="session")
def ground_truth_year():
    """A fully present 2020 hourly year in UTC with a daily pattern."""
    hours = 366 * 24
    return HourlySeries(YEAR_2020_UTC, hourly_profile(hours), "UTC")


@pytest.fixture
def write_json_file(tmp_path):
    """Write a JSON document into tmp_path and return its path."""
    def _write(name, document):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path
    return _write


def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line(
        "markers",
        "performance: throughput checks (may be slow)"
    )
    config.addinivalue_line(
        "markers",
        "property: hypothesis-driven property suites"
    )
