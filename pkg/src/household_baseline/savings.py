"""
Savings by comparison: baseline energy against temperature-adjusted observed
energy over a comparison window.

Savings are ``S = E_b - E_pr`` where ``E_pr`` is the observed consumption
scaled by the ratio of observed to baseline mean temperature. The adjustment
term is reported as the signed kWh difference it makes, ``A = E_pr - E_pr_raw``.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np
import pandas as pd

from .baseline import WEEKS_PER_MONTH, BaselineYear, LayoutMode
from .config import MIN_BASE_TEMPERATURE_C
from .errors import (
    AdjustmentUndefinedError,
    InsufficientDataError,
    PreconditionError,
    SchemaError,
    ValidationError,
)
from .timeseries import (
    SLOTS_PER_WEEK,
    HourlySeries,
    label_instants,
    local_hour_labels,
    slot_indices,
    wall_hours_between,
)
from .utils import PathLike, json_number, resolve_zone

logger = logging.getLogger(__name__)


# =============================================================================
# Comparison Window
# =============================================================================


@dataclass(frozen=True)
class ComparisonWindow:
    """Half-open span ``[start, end)`` of local wall hours in ``zone``."""

    start: int
    end: int
    zone: str = "UTC"

    def __post_init__(self):
        resolve_zone(self.zone)
        start, end = int(self.start), int(self.end)
        if start < 0 or end < 0:
            raise ValidationError("window bounds must be non-negative epoch seconds")
        if start >= end:
            raise ValidationError(f"window start {start} must be before end {end}")
        for name, t in (("start", start), ("end", end)):
            label = local_hour_labels([t], self.zone)
            if label_instants(label, self.zone)[0] != t:
                raise ValidationError(f"window {name} {t} is not aligned to a local hour in {self.zone}")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "end", end)

    @property
    def labels(self) -> pd.DatetimeIndex:
        """Local wall hours covered by the window."""
        first, stop = local_hour_labels([self.start, self.end], self.zone)
        return wall_hours_between(first, stop - pd.Timedelta(hours=1), self.zone)

    @property
    def instants(self) -> np.ndarray:
        return label_instants(self.labels, self.zone)

    @property
    def hours(self) -> int:
        return len(self.labels)

    def contains(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.int64)
        return (t >= self.start) & (t < self.end)


def window_values(series: HourlySeries, window: ComparisonWindow) -> np.ndarray:
    """
    Values of a series on the window's hours.

    Window hours the series does not cover are MISSING.
    """
    if series.timezone != window.zone:
        raise PreconditionError(
            f"series zone {series.timezone} differs from window zone {window.zone}"
        )
    positions = pd.Index(series.instants).get_indexer(window.instants)
    values = np.full(len(positions), np.nan)
    found = positions >= 0
    values[found] = series.values[positions[found]]
    return values


def baseline_slice(baseline: BaselineYear, window: ComparisonWindow) -> np.ndarray:
    """
    Baseline hourly values aligned to a comparison window.

    Paper-literal baselines are looked up by month, week of month (days 1-7
    are week 1, days from the 22nd on are week 4), weekday and hour. Calendar
    baselines are matched on local month, day and hour; 29 February reads
    28 February, and window hours with no counterpart are NaN.
    """
    labels = window.labels
    months = np.asarray(labels.month, dtype=np.int64)
    if baseline.layout is LayoutMode.PAPER_LITERAL:
        weeks = np.minimum((np.asarray(labels.day, dtype=np.int64) - 1) // 7, WEEKS_PER_MONTH - 1)
        positions = weeks * SLOTS_PER_WEEK + slot_indices(labels)
        values = np.concatenate(baseline.months)
        return values[(months - 1) * WEEKS_PER_MONTH * SLOTS_PER_WEEK + positions]

    keys = []
    values = []
    for month in range(1, 13):
        block_labels = baseline.labels(month)
        keys.append(_calendar_key(block_labels))
        values.append(baseline.months[month - 1])
    lookup = pd.Series(np.concatenate(values), index=np.concatenate(keys))
    lookup = lookup[~lookup.index.duplicated(keep="first")]
    wanted = _calendar_key(labels)
    leap_day = (months == 2) & (np.asarray(labels.day) == 29)
    wanted = np.where(leap_day, wanted - 100, wanted)
    return lookup.reindex(wanted).to_numpy(dtype=np.float64)


def _calendar_key(labels: pd.DatetimeIndex) -> np.ndarray:
    return (
        np.asarray(labels.month, dtype=np.int64) * 10_000
        + np.asarray(labels.day, dtype=np.int64) * 100
        + np.asarray(labels.hour, dtype=np.int64)
    )


# =============================================================================
# Temperature Adjustment
# =============================================================================


def temperature_ratio(obs_temps: Sequence[float], base_temps: Sequence[float]) -> float:
    """
    Ratio of the mean observed temperature to the mean baseline temperature.

    Args:
        obs_temps: Temperatures (°C) during the comparison window
        base_temps: Baseline-equivalent temperatures (°C)

    Returns:
        mean(obs_temps) / mean(base_temps)

    Raises:
        InsufficientDataError: Either list is empty
        AdjustmentUndefinedError: Baseline mean at or below 0.5 °C
    """
    obs = np.asarray(obs_temps, dtype=np.float64)
    base = np.asarray(base_temps, dtype=np.float64)
    if obs.size == 0 or base.size == 0:
        raise InsufficientDataError(
            f"temperature ratio needs readings for both periods "
            f"(observed: {obs.size}, baseline: {base.size})"
        )
    if not (np.all(np.isfinite(obs)) and np.all(np.isfinite(base))):
        raise ValidationError("temperatures must be finite")
    base_mean = math.fsum(base) / base.size
    if base_mean <= MIN_BASE_TEMPERATURE_C:
        raise AdjustmentUndefinedError(
            f"baseline mean temperature {base_mean:.2f} °C is at or below "
            f"{MIN_BASE_TEMPERATURE_C} °C; disable temperature adjustment"
        )
    return (math.fsum(obs) / obs.size) / base_mean


def adjust_observed(observed: HourlySeries, ratio: float) -> HourlySeries:
    """Scale every present value by ``ratio``; MISSING hours stay MISSING."""
    if not math.isfinite(ratio) or ratio <= 0:
        raise ValidationError(f"adjustment ratio must be positive, got {ratio}")
    return observed.with_values(observed.values * ratio)


# =============================================================================
# Savings Report
# =============================================================================


@dataclass(frozen=True)
class SavingsReport:
    E_b: float
    E_pr_raw: float
    E_pr: float
    A: float
    S: float
    temp_ratio: float
    T_obs_mean: float
    T_base_mean: float
    window_start: int
    window_end: int
    paired_hours: int
    temperature_adjusted: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "E_b": self.E_b,
            "E_pr_raw": self.E_pr_raw,
            "E_pr": self.E_pr,
            "A": self.A,
            "S": self.S,
            "temp_ratio": self.temp_ratio,
            "T_obs_mean": json_number(self.T_obs_mean),
            "T_base_mean": json_number(self.T_base_mean),
            "window_start": self.window_start,
            "window_end": self.window_end,
            "paired_hours": self.paired_hours,
            "temperature_adjusted": self.temperature_adjusted,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SavingsReport":
        def number(key: str) -> float:
            value = data[key]
            return float("nan") if value is None else float(value)

        try:
            return cls(
                E_b=number("E_b"),
                E_pr_raw=number("E_pr_raw"),
                E_pr=number("E_pr"),
                A=number("A"),
                S=number("S"),
                temp_ratio=number("temp_ratio"),
                T_obs_mean=number("T_obs_mean"),
                T_base_mean=number("T_base_mean"),
                window_start=int(data["window_start"]),
                window_end=int(data["window_end"]),
                paired_hours=int(data["paired_hours"]),
                temperature_adjusted=bool(data.get("temperature_adjusted", True)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"malformed savings report: {e}") from e


def _mean(values: Sequence[float]) -> float:
    values = np.asarray(values, dtype=np.float64)
    return math.fsum(values) / values.size if values.size else float("nan")


def compute_savings(
    baseline_slice: np.ndarray,
    observed: HourlySeries,
    obs_temps: Sequence[float],
    base_temps: Sequence[float],
    window: ComparisonWindow,
    *,
    adjust: bool = True,
) -> SavingsReport:
    """
    Savings over a comparison window.

    An hour counts towards the sums only when both the baseline and the
    observed series have a value for it.

    Args:
        baseline_slice: Baseline kWh for each window hour
        observed: Observed hourly series covering the window
        obs_temps: Temperatures (°C) inside the window
        base_temps: Baseline-equivalent temperatures (°C)
        window: Comparison window
        adjust: Apply the temperature ratio; when False the ratio is 1

    Raises:
        PreconditionError: Baseline slice length differs from the window
        InsufficientDataError: No paired hour, or no temperatures when adjusting
        AdjustmentUndefinedError: Baseline mean temperature too low
    """
    base = np.asarray(baseline_slice, dtype=np.float64)
    if base.shape != (window.hours,):
        raise PreconditionError(
            f"baseline slice has {base.size} hours but the window has {window.hours}"
        )
    obs = window_values(observed, window)
    paired = np.isfinite(base) & np.isfinite(obs)
    paired_hours = int(paired.sum())
    if paired_hours == 0:
        raise InsufficientDataError("no hour in the window has both baseline and observed values")

    ratio = temperature_ratio(obs_temps, base_temps) if adjust else 1.0
    adjusted = obs * ratio

    e_b = math.fsum(base[paired])
    e_pr_raw = math.fsum(obs[paired])
    e_pr = math.fsum(adjusted[paired])
    report = SavingsReport(
        E_b=e_b,
        E_pr_raw=e_pr_raw,
        E_pr=e_pr,
        A=e_pr - e_pr_raw,
        S=e_b - e_pr,
        temp_ratio=ratio,
        T_obs_mean=_mean(obs_temps),
        T_base_mean=_mean(base_temps),
        window_start=window.start,
        window_end=window.end,
        paired_hours=paired_hours,
        temperature_adjusted=adjust,
    )
    skipped = window.hours - paired_hours
    if skipped:
        logger.warning(f"{skipped} window hour(s) excluded from both sums (unpaired)")
    logger.info(f"Savings over {paired_hours} hour(s): S = {report.S:.6f} kWh (ratio {ratio:.5f})")
    return report


# =============================================================================
# Plot Data
# =============================================================================


def plot_rows(
    baseline_slice: np.ndarray,
    observed: HourlySeries,
    window: ComparisonWindow,
    ratio: float = 1.0,
) -> pd.DataFrame:
    """Baseline, observed and adjusted kWh for every window hour."""
    obs = window_values(observed, window)
    return pd.DataFrame({
        "timestamp": window.instants,
        "baseline": np.asarray(baseline_slice, dtype=np.float64),
        "observed": obs,
        "adjusted": obs * ratio,
    })


def write_plot_data(rows: pd.DataFrame, path: PathLike) -> None:
    rows.to_csv(path, index=False, lineterminator="\n", na_rep="")


def temperatures_in_window(t: np.ndarray, v: np.ndarray, window: Optional[ComparisonWindow]) -> np.ndarray:
    """Temperature values whose timestamps fall inside the window (all when None)."""
    v = np.asarray(v, dtype=np.float64)
    if window is None:
        return v
    return v[window.contains(t)]
