import logging
from contextlib import asynccontextmanager
from dataclasses import dataclass
from typing import AsyncIterator, Optional

import pandas as pd
from mcp.server.fastmcp import FastMCP

from .baseline import Generation
from .config import SAVINGS_REPORT_FILE, get_runtime_settings
from .errors import BaselineError
from .household import load_household_config
from .pipeline import run_build_baseline, run_savings
from .timeseries import (
    aggregate_to_monthly,
    detect_gaps,
    read_series_csv,
    slot_of,
    summarize_gaps,
)
from .utils import configure_logging, format_kwh

# =============================================================================
# Logging Setup
# =============================================================================

logger = logging.getLogger(__name__)

# =============================================================================
# Configuration and Context
# =============================================================================


@dataclass
class AppContext:
    """Application context for the server's lifetime."""
    environment: str
    log_level: str


@asynccontextmanager
async def app_lifespan(mcp_server: FastMCP) -> AsyncIterator[AppContext]:  # noqa: ARG001
    """
    Configure logging on startup and log shutdown.

    Logs go to stderr; stdout carries the MCP stdio protocol.
    """
    settings = get_runtime_settings()
    configure_logging(settings.log_level)
    logger.info(f"Starting Household Baseline MCP Server (env: {settings.environment})")
    try:
        yield AppContext(environment=settings.environment, log_level=settings.log_level)
    except Exception as e:
        logger.error(f"Error during server execution: {e}")
        raise
    finally:
        logger.info("Shutting down Household Baseline MCP Server")


# =============================================================================
# FastMCP Server Initialization
# =============================================================================

mcp = FastMCP("Household Baseline MCP", lifespan=app_lifespan)

# =============================================================================
# Response Helpers
# =============================================================================


# Errors a tool reports as text; anything else is a bug and propagates
TOOL_ERRORS = (
    BaselineError,
    OSError,
    OverflowError,
    ValueError,
    pd.errors.ParserError,
    pd.errors.EmptyDataError,
)


def failure(action: str, error: Exception) -> str:
    """Render an error as the short text tools return instead of raising."""
    if isinstance(error, BaselineError):
        return f"❌ {action} failed (exit {error.exit_code}): {error}"
    return f"❌ {action} failed: {error}"


# =============================================================================
# Tools
# =============================================================================


@mcp.tool()
async def locate_slot(timestamp: int, timezone: str = "UTC") -> str:
    """
    Weekday/hour slot of an instant in a household's local time.

    Args:
        timestamp: UTC epoch seconds
        timezone: IANA zone name (e.g. "Europe/Athens")

    Returns:
        Local weekday and hour, plus the 0-167 slot index
    """
    try:
        slot = slot_of(timestamp, timezone)
        local = pd.Timestamp(timestamp, unit="s", tz="UTC").tz_convert(timezone)
    except TOOL_ERRORS as e:
        return failure("Slot lookup", e)
    return f"🕒 {timestamp} → {slot} local ({local:%Y-%m-%d %H:%M %Z}), slot {slot.index}"


@mcp.tool()
async def inspect_series(series_path: str, timezone: str = "UTC") -> str:
    """
    Data-quality summary of an hourly series CSV: gaps and monthly coverage.

    Args:
        series_path: Series CSV written by the ingest stage
        timezone: Zone the series was aggregated in

    Returns:
        Hours, missing hours, longest gap and per-month coverage/provenance
    """
    try:
        series = read_series_csv(series_path, timezone)
        summary = summarize_gaps(detect_gaps(series), len(series))
        monthly = aggregate_to_monthly(series)
    except TOOL_ERRORS as e:
        return failure("Series inspection", e)

    lines = [
        f"📈 {series_path} ({timezone})",
        f"Hours: {summary['hours']} | missing: {summary['missing_hours']} "
        f"in {summary['gap_count']} gap(s), longest {summary['longest_gap_hours']} h "
        f"| completeness {summary['completeness']:.1%}",
    ]
    for m in monthly:
        if m.coverage > 0:
            lines.append(f"  month {m.month:2d}: {m.total_kwh:10.3f} kWh, "
                         f"coverage {m.coverage:.1%}, {m.provenance.value}")
    return "\n".join(lines)


@mcp.tool()
async def build_household_baseline(
    series_path: str,
    config_path: str,
    out_dir: str,
    reference_path: Optional[str] = None,
    stochastic: bool = False,
    seed: Optional[int] = None,
) -> str:
    """
    Build a year-long hourly baseline from an ingested series.

    Writes monthly totals, weekly distribution, adjustment factor and the
    baseline CSV into ``out_dir``.

    Args:
        series_path: Series CSV written by the ingest stage
        config_path: Household config JSON
        out_dir: Output directory
        reference_path: Reference profile JSON; the bundled profile for the
            config country when omitted
        stochastic: Resample observed slot values instead of scaling shares
        seed: Seed for stochastic generation (falls back to the config seed)

    Returns:
        Annual total, factor and per-month totals with provenance
    """
    try:
        config = load_household_config(config_path)
        result = run_build_baseline(series_path, reference_path, config, out_dir,
                                    stochastic=stochastic, seed=seed)
    except TOOL_ERRORS as e:
        return failure("Baseline build", e)

    baseline = result.baseline
    mode = baseline.generation.value
    if baseline.generation is Generation.STOCHASTIC:
        mode += f", seed {baseline.seed}"
    lines = [
        f"✅ Baseline for {config.user_id}: {format_kwh(result.annual_kwh)} kWh/year "
        f"({baseline.layout.value}, {mode})",
        f"Factor ({result.factor.mode.value}, k={result.factor.k}): {result.factor.value:.6f}",
    ]
    for m in result.filled:
        lines.append(f"  month {m.month:2d}: {m.total_kwh:10.3f} kWh {m.provenance.value}")
    lines.append(f"Written to {result.baseline_path}")
    return "\n".join(lines)


@mcp.tool()
async def calculate_savings(
    baseline_path: str,
    observed_path: str,
    weather_obs_path: str,
    weather_base_path: str,
    start: int,
    end: int,
    config_path: str,
    out_path: str = SAVINGS_REPORT_FILE,
    temperature_adjust: bool = True,
) -> str:
    """
    Savings of observed consumption against a baseline over ``[start, end)``.

    Args:
        baseline_path: Baseline CSV
        observed_path: Observed hourly series CSV
        weather_obs_path: Temperatures during the window
        weather_base_path: Baseline-equivalent temperatures
        start: Window start, UTC epoch seconds (local hour aligned)
        end: Window end, UTC epoch seconds (exclusive)
        config_path: Household config JSON
        out_path: Savings report JSON path
        temperature_adjust: Scale observed consumption by the temperature ratio

    Returns:
        E_b, E_pr_raw, E_pr, A, S and the temperature ratio
    """
    try:
        config = load_household_config(config_path)
        report = run_savings(baseline_path, observed_path, weather_obs_path, weather_base_path,
                             start, end, config, out_path, adjust=temperature_adjust)
    except TOOL_ERRORS as e:
        return failure("Savings calculation", e)

    return (
        f"💡 Savings S = {format_kwh(report.S)} kWh over {report.paired_hours} h\n"
        f"E_b {format_kwh(report.E_b)} | E_pr_raw {format_kwh(report.E_pr_raw)} | "
        f"E_pr {format_kwh(report.E_pr)} | A {format_kwh(report.A)}\n"
        f"Temperature ratio {report.temp_ratio:.5f}"
        + ("" if report.temperature_adjusted else " (adjustment disabled)")
        + f"\nReport: {out_path}"
    )
