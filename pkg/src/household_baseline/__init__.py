"""
Household Baseline

Year-long hourly electricity baselines for individual households, built from
a few months of smart-meter recordings plus country reference statistics, and
temperature-adjusted energy savings measured against them.
"""

__version__ = "0.1.0"

from .baseline import (
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
    sample_stochastic,
    synthesize_baseline,
    weekly_distribution,
)
from .errors import BaselineError
from .faultsim import FaultPlan, apply_plan, inject_corruption, inject_dropouts, inject_unplug
from .household import HouseholdConfig
from .ingestion import CleanReport, ReadingBatch, clean_readings, parse_readings_file
from .reference import ReferenceProfile, load_reference_profile
from .savings import (
    ComparisonWindow,
    SavingsReport,
    adjust_observed,
    baseline_slice,
    compute_savings,
    temperature_ratio,
)
from .timeseries import (
    HourlySeries,
    MeterKind,
    MonthlyTotals,
    Slot,
    aggregate_to_hourly,
    aggregate_to_monthly,
    detect_gaps,
    slot_of,
)

__all__ = [
    "__version__",
    "AdjustmentFactor",
    "BaselineError",
    "BaselineYear",
    "CleanReport",
    "ComparisonWindow",
    "FactorMode",
    "FaultPlan",
    "Generation",
    "HourlySeries",
    "HouseholdConfig",
    "LayoutMode",
    "MeterKind",
    "MonthlyTotals",
    "ReadingBatch",
    "ReferenceProfile",
    "SavingsReport",
    "Slot",
    "SlotSamplePool",
    "WeeklyDistribution",
    "adjust_observed",
    "adjustment_factor",
    "aggregate_to_hourly",
    "aggregate_to_monthly",
    "annual_total",
    "apply_plan",
    "baseline_slice",
    "clean_readings",
    "compute_savings",
    "detect_gaps",
    "fill_monthly",
    "inject_corruption",
    "inject_dropouts",
    "inject_unplug",
    "load_reference_profile",
    "parse_readings_file",
    "sample_stochastic",
    "slot_of",
    "synthesize_baseline",
    "temperature_ratio",
    "weekly_distribution",
]
