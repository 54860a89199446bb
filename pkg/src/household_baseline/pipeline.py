"""
File-to-file pipeline stages shared by the CLI and the MCP server.

Each stage reads its inputs from disk, runs the library operations and writes
its artifacts, returning the in-memory results so callers can report on them.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from .baseline import (
    AdjustmentFactor,
    BaselineYear,
    LayoutMode,
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
from .config import (
    ADJUSTMENT_FACTOR_FILE,
    BASELINE_FILE,
    CLEAN_REPORT_FILE,
    GAPS_FILE,
    MONTHLY_TOTALS_FILE,
    SERIES_FILE,
    WEEKLY_DISTRIBUTION_FILE,
)
from .errors import PreconditionError, SchemaError
from .faultsim import FaultResult, apply_plan, load_fault_plan
from .household import HouseholdConfig, load_household_config
from .ingestion import (
    CleanReport,
    ReadingFormat,
    clean_readings,
    parse_readings_file,
    parse_weather_file,
    write_readings_file,
)
from .reference import ReferenceProfile, load_bundled_reference, load_reference_profile
from .savings import (
    ComparisonWindow,
    SavingsReport,
    baseline_slice,
    compute_savings,
    plot_rows,
    temperatures_in_window,
    write_plot_data,
)
from .timeseries import (
    GapMap,
    HourlySeries,
    MeterKind,
    MonthlyTotals,
    aggregate_to_hourly,
    aggregate_to_monthly,
    detect_gaps,
    read_series_csv,
    summarize_gaps,
    write_series_csv,
)
from .utils import PathLike, read_json, write_json

logger = logging.getLogger(__name__)


def format_for(path: PathLike) -> ReadingFormat:
    """Reading format implied by a file suffix (``.jsonl`` / ``.ndjson``, else CSV)."""
    suffix = Path(path).suffix.lower()
    return ReadingFormat.JSON_LINES if suffix in (".jsonl", ".ndjson") else ReadingFormat.CSV


# =============================================================================
# Ingest
# =============================================================================


@dataclass(frozen=True)
class IngestResult:
    series: HourlySeries
    report: CleanReport
    gaps: GapMap
    series_path: Path


def run_ingest(
    readings_path: PathLike,
    kind: MeterKind,
    config: HouseholdConfig,
    out_dir: PathLike,
) -> IngestResult:
    """Parse, clean and aggregate a meter file; writes series, clean report and gap map."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    readings = parse_readings_file(readings_path, format_for(readings_path))
    cleaned, report = clean_readings(readings, kind, config.spike_threshold)
    series = aggregate_to_hourly(cleaned, kind, config.timezone)
    gaps = detect_gaps(series)

    series_path = out_dir / SERIES_FILE
    write_series_csv(series, series_path)
    write_json(out_dir / CLEAN_REPORT_FILE, report.to_dict())
    write_json(out_dir / GAPS_FILE, {**gaps.to_dict(), "summary": summarize_gaps(gaps, len(series))})
    logger.info(f"Ingested {readings_path} for {config.user_id}: {len(series)} hours, "
                f"{gaps.missing_hours} missing")
    return IngestResult(series, report, gaps, series_path)


# =============================================================================
# Baseline
# =============================================================================


@dataclass(frozen=True)
class BuildResult:
    observed: MonthlyTotals
    filled: MonthlyTotals
    factor: AdjustmentFactor
    distribution: WeeklyDistribution
    baseline: BaselineYear
    baseline_path: Path

    @property
    def annual_kwh(self) -> float:
        return annual_total(self.baseline)


def resolve_reference(reference_path: Optional[PathLike], config: HouseholdConfig) -> ReferenceProfile:
    if reference_path is None:
        return load_bundled_reference(config.country)
    return load_reference_profile(reference_path)


def build_baseline(
    series: HourlySeries,
    ref: ReferenceProfile,
    config: HouseholdConfig,
    *,
    stochastic: bool = False,
    seed: Optional[int] = None,
):
    """In-memory baseline build: monthly totals, factor, fill, distribution, synthesis."""
    observed = aggregate_to_monthly(series, config.completeness_threshold)
    factor = adjustment_factor(observed, ref, config.factor_mode)
    filled = fill_monthly(observed, ref, factor)
    distribution, pool = weekly_distribution(series)

    year = None
    if config.layout_mode is LayoutMode.CALENDAR:
        year = config.baseline_year
        if year is None:
            if not len(series):
                raise PreconditionError("calendar layout needs baseline_year or a non-empty series")
            year = int(series.labels[0].year)

    if stochastic:
        seed = config.seed if seed is None else seed
        if seed is None:
            raise PreconditionError("stochastic generation needs a seed (--seed or config 'seed')")
        baseline = sample_stochastic(pool, filled, seed, config.layout_mode,
                                     year=year, timezone=config.timezone)
    else:
        baseline = synthesize_baseline(distribution, filled, config.layout_mode,
                                       year=year, timezone=config.timezone)
    return observed, filled, factor, distribution, baseline


def run_build_baseline(
    series_path: PathLike,
    reference_path: Optional[PathLike],
    config: HouseholdConfig,
    out_dir: PathLike,
    *,
    stochastic: bool = False,
    seed: Optional[int] = None,
) -> BuildResult:
    """Build a year-long baseline from an ingested series; writes the baseline artifacts."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    series = read_series_csv(series_path, config.timezone)
    ref = resolve_reference(reference_path, config)
    observed, filled, factor, distribution, baseline = build_baseline(
        series, ref, config, stochastic=stochastic, seed=seed
    )

    write_json(out_dir / MONTHLY_TOTALS_FILE, filled.to_dict())
    write_json(out_dir / WEEKLY_DISTRIBUTION_FILE, distribution.to_dict())
    write_json(out_dir / ADJUSTMENT_FACTOR_FILE, factor.to_dict())
    baseline_path = out_dir / BASELINE_FILE
    write_baseline_csv(baseline, baseline_path)
    return BuildResult(observed, filled, factor, distribution, baseline, baseline_path)


# =============================================================================
# Savings
# =============================================================================


def run_savings(
    baseline_path: PathLike,
    observed_path: PathLike,
    weather_obs_path: PathLike,
    weather_base_path: PathLike,
    start: int,
    end: int,
    config: HouseholdConfig,
    out_path: PathLike,
    *,
    adjust: bool = True,
    plot_path: Optional[PathLike] = None,
) -> SavingsReport:
    """Savings of an observed series against a baseline over ``[start, end)``."""
    window = ComparisonWindow(start, end, config.timezone)
    baseline = read_baseline_csv(baseline_path, config.timezone)
    observed = read_series_csv(observed_path, config.timezone)
    obs_weather = parse_weather_file(weather_obs_path, format_for(weather_obs_path))
    base_weather = parse_weather_file(weather_base_path, format_for(weather_base_path))

    if adjust:
        logger.info(f"Adjusting {config.user_id} with {config.temperature_source.value} temperatures "
                    f"({len(obs_weather)} observed, {len(base_weather)} baseline readings)")
    aligned = baseline_slice(baseline, window)
    report = compute_savings(
        aligned,
        observed,
        temperatures_in_window(obs_weather.t, obs_weather.v, window),
        temperatures_in_window(base_weather.t, base_weather.v, None),
        window,
        adjust=adjust,
    )
    write_json(out_path, report.to_dict())
    if plot_path is not None:
        write_plot_data(plot_rows(aligned, observed, window, report.temp_ratio), plot_path)
    return report


# =============================================================================
# Fault Simulation
# =============================================================================


def run_faultsim(
    series_path: PathLike,
    plan_path: PathLike,
    out_path: PathLike,
    config: HouseholdConfig,
) -> FaultResult:
    """Apply a fault plan to a series; writes the gateway readings as an interval CSV."""
    series = read_series_csv(series_path, config.timezone)
    plan = load_fault_plan(plan_path)
    result = apply_plan(series, plan, config.spike_threshold)
    write_readings_file(out_path, result.readings)
    return result


# =============================================================================
# Batch
# =============================================================================


@dataclass(frozen=True)
class BatchJob:
    config: HouseholdConfig
    series: Path
    out: Path
    reference: Optional[Path] = None
    stochastic: bool = False
    seed: Optional[int] = None


@dataclass
class BatchResult:
    annual_kwh: Dict[str, float] = field(default_factory=dict)


def load_manifest(path: PathLike) -> List[BatchJob]:
    """
    Read a batch manifest.

    The manifest is a JSON object with a ``households`` list; each entry has
    ``config``, ``series`` and ``out`` paths and optional ``reference``,
    ``stochastic`` and ``seed``. Relative paths resolve against the
    manifest's directory.
    """
    path = Path(path)
    document = read_json(path)
    if not isinstance(document, dict) or not isinstance(document.get("households"), list):
        raise SchemaError("batch manifest must be an object with a 'households' list")
    root = path.parent

    def resolve(value: Any) -> Path:
        p = Path(value)
        return p if p.is_absolute() else root / p

    jobs = []
    for i, entry in enumerate(document["households"]):
        try:
            jobs.append(BatchJob(
                config=load_household_config(resolve(entry["config"])),
                series=resolve(entry["series"]),
                out=resolve(entry["out"]),
                reference=resolve(entry["reference"]) if entry.get("reference") else None,
                stochastic=bool(entry.get("stochastic", False)),
                seed=entry.get("seed"),
            ))
        except (KeyError, TypeError) as e:
            raise SchemaError(f"household entry {i}: needs 'config', 'series' and 'out' ({e})") from e
    user_ids = [job.config.user_id for job in jobs]
    if len(set(user_ids)) != len(user_ids):
        raise SchemaError("batch manifest lists a user_id more than once")
    return jobs


def _run_job(job: BatchJob) -> float:
    result = run_build_baseline(job.series, job.reference, job.config, job.out,
                                stochastic=job.stochastic, seed=job.seed)
    return result.annual_kwh


def run_batch(manifest_path: PathLike, jobs: int = 1) -> BatchResult:
    """
    Build baselines for every household of a manifest.

    With ``jobs > 1`` households run on a thread pool; every household writes
    to its own directory and results keep manifest order, so the output
    matches a sequential run.
    """
    if jobs < 1:
        raise PreconditionError(f"--jobs must be at least 1, got {jobs}")
    batch = load_manifest(manifest_path)
    logger.info(f"Running batch of {len(batch)} household(s) with {jobs} worker(s)")
    if jobs == 1:
        totals = [_run_job(job) for job in batch]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            totals = list(executor.map(_run_job, batch))
    return BatchResult({job.config.user_id: total for job, total in zip(batch, totals)})


def load_config_or_default(path: Optional[PathLike], timezone: Optional[str] = None) -> HouseholdConfig:
    """Household config from a file, or a default one in ``timezone`` (UTC when unset)."""
    if path is not None:
        config = load_household_config(path)
        if timezone and timezone != config.timezone:
            raise PreconditionError(
                f"--timezone {timezone} conflicts with config timezone {config.timezone}"
            )
        return config
    return HouseholdConfig(user_id="anonymous", timezone=timezone or "UTC")
