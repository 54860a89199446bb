import os
from dataclasses import dataclass

# =============================================================================
# Cleaning and Aggregation Defaults
# =============================================================================

# Interval energies above this are treated as spikes (far above any residential hourly draw)
DEFAULT_SPIKE_THRESHOLD_KWH = 100.0

# Months at or above this fraction of present hours count as observed
DEFAULT_COMPLETENESS_THRESHOLD = 0.95

# Cumulative counters: a reading within this many seconds of an hour boundary qualifies
BOUNDARY_TOLERANCE_SECONDS = 300

# Plausible weather readings, in degrees Celsius
MIN_TEMPERATURE_C = -60.0
MAX_TEMPERATURE_C = 60.0

# =============================================================================
# Savings Defaults
# =============================================================================

# Baseline mean temperatures at or below this make the Celsius ratio meaningless
MIN_BASE_TEMPERATURE_C = 0.5

# =============================================================================
# Artifact File Names
# =============================================================================

SERIES_FILE = "series.csv"
CLEAN_REPORT_FILE = "clean_report.json"
GAPS_FILE = "gaps.json"
MONTHLY_TOTALS_FILE = "monthly_totals.json"
WEEKLY_DISTRIBUTION_FILE = "weekly_distribution.json"
ADJUSTMENT_FACTOR_FILE = "adjustment_factor.json"
BASELINE_FILE = "baseline.csv"
SAVINGS_REPORT_FILE = "savings_report.json"

# =============================================================================
# Runtime Settings
# =============================================================================


@dataclass(frozen=True)
class RuntimeSettings:
    """Process-level settings read from the environment."""
    environment: str
    log_level: str


def get_runtime_settings() -> RuntimeSettings:
    """Get runtime settings from environment variables."""
    return RuntimeSettings(
        environment=os.getenv("ENVIRONMENT", "production"),
        log_level=os.getenv("LOG_LEVEL", "INFO").upper(),
    )
