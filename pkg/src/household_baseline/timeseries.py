"""
Calendar-aware hourly time series.

Storage is UTC epoch seconds; hour alignment, weekday/hour slots and month
boundaries are computed in the household's IANA zone. A series is indexed by
local wall-clock hours that exist in that zone: the skipped spring-forward
hour has no position, and the repeated fall-back hour is a single position
whose value covers both physical hours.
"""

import logging
import re
from dataclasses import dataclass
from datetime import datetime
from enum import Enum, IntEnum
from functools import cached_property
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd

from .config import BOUNDARY_TOLERANCE_SECONDS, DEFAULT_COMPLETENESS_THRESHOLD
from .errors import InputError, ParseError, SchemaError, ValidationError
from .utils import PathLike, resolve_zone

logger = logging.getLogger(__name__)

MISSING = float("nan")
HOURS_PER_DAY = 24
SLOTS_PER_WEEK = 7 * HOURS_PER_DAY

_EPOCH = pd.Timestamp("1970-01-01")
_ONE_SECOND = pd.Timedelta(seconds=1)

# =============================================================================
# Slots
# =============================================================================


class Weekday(IntEnum):
    MON = 0
    TUE = 1
    WED = 2
    THU = 3
    FRI = 4
    SAT = 5
    SUN = 6

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @classmethod
    def from_label(cls, label: str) -> "Weekday":
        try:
            return cls[label.strip().upper()]
        except KeyError:
            raise ValidationError(f"unknown weekday {label!r}") from None


class Slot(NamedTuple):
    """A (day-of-week, hour) cell of the 168-slot week."""

    day: Weekday
    hour: int

    @property
    def index(self) -> int:
        return int(self.day) * HOURS_PER_DAY + self.hour

    @classmethod
    def from_index(cls, index: int) -> "Slot":
        if not 0 <= index < SLOTS_PER_WEEK:
            raise ValidationError(f"slot index must be in [0, {SLOTS_PER_WEEK}), got {index}")
        return cls(Weekday(index // HOURS_PER_DAY), index % HOURS_PER_DAY)

    def __str__(self) -> str:
        return f"{self.day.label} {self.hour:02d}:00"


class MeterKind(str, Enum):
    """How a meter reports energy."""

    INTERVAL_KWH = "interval"
    CUMULATIVE_KWH = "cumulative"


def slot_of(t: int, zone: str) -> Slot:
    """
    Local weekday and hour of an instant, DST-aware.

    Args:
        t: Epoch seconds, UTC
        zone: IANA zone name

    Returns:
        The Slot holding that instant in local time

    Raises:
        ConfigurationError: If the zone is unknown
        ValidationError: If the instant is negative or past MAX_TIMESTAMP
    """
    tz = resolve_zone(zone)
    if not 0 <= int(t) <= MAX_TIMESTAMP:
        raise ValidationError(f"timestamp must be in [0, {MAX_TIMESTAMP}], got {t}")
    local = datetime.fromtimestamp(int(t), tz)
    return Slot(Weekday(local.weekday()), local.hour)


# =============================================================================
# Local Time Axis
# =============================================================================


def local_hour_labels(epochs: Iterable[int], zone: str) -> pd.DatetimeIndex:
    """Naive local wall-clock hour containing each instant."""
    resolve_zone(zone)
    utc = pd.to_datetime(np.asarray(epochs, dtype=np.int64), unit="s", utc=True)
    return pd.DatetimeIndex(utc.tz_convert(zone).tz_localize(None)).floor("h")


def _localize(labels: pd.DatetimeIndex, zone: str, nonexistent: str) -> pd.DatetimeIndex:
    # ambiguous=True picks the first (DST) occurrence of a repeated hour
    return labels.tz_localize(
        zone, ambiguous=np.ones(len(labels), dtype=bool), nonexistent=nonexistent
    )


def _existing(labels: pd.DatetimeIndex, zone: str) -> np.ndarray:
    return ~np.asarray(_localize(labels, zone, "NaT").isna())


def wall_hours(first: pd.Timestamp, count: int, zone: str) -> pd.DatetimeIndex:
    """The first ``count`` existing local wall hours starting at ``first``."""
    if count <= 0:
        return pd.DatetimeIndex([])
    extra = 4
    while True:
        candidates = pd.date_range(first, periods=count + extra, freq="h")
        kept = candidates[_existing(candidates, zone)]
        if len(kept) >= count:
            return kept[:count]
        extra *= 2


def wall_hours_between(first: pd.Timestamp, last: pd.Timestamp, zone: str) -> pd.DatetimeIndex:
    """Existing local wall hours from ``first`` to ``last``, both inclusive."""
    if last < first:
        return pd.DatetimeIndex([])
    candidates = pd.date_range(first, last, freq="h")
    return candidates[_existing(candidates, zone)]


def label_instants(labels: pd.DatetimeIndex, zone: str) -> np.ndarray:
    """UTC epoch seconds at which each local wall hour starts."""
    if len(labels) == 0:
        return np.empty(0, dtype=np.int64)
    utc = _localize(labels, zone, "raise").tz_convert("UTC").tz_localize(None)
    return ((utc - _EPOCH) // _ONE_SECOND).to_numpy(dtype=np.int64)


def month_hours(year: int, month: int, zone: str) -> pd.DatetimeIndex:
    """All existing local wall hours of a calendar month."""
    first = pd.Timestamp(year=year, month=month, day=1)
    last = first + pd.offsets.MonthBegin(1) - pd.Timedelta(hours=1)
    return wall_hours_between(first, last, zone)


def slot_indices(labels: pd.DatetimeIndex) -> np.ndarray:
    """Slot index (day * 24 + hour) of each local wall hour."""
    return (
        np.asarray(labels.dayofweek, dtype=np.int64) * HOURS_PER_DAY
        + np.asarray(labels.hour, dtype=np.int64)
    )


# =============================================================================
# HourlySeries
# =============================================================================


@dataclass(frozen=True, eq=False)
class HourlySeries:
    """
    Hourly kWh values on the local wall-hour grid of a zone.

    ``values`` holds NaN for MISSING hours; present values are finite and
    non-negative. The array is copied and made read-only on construction.
    A start at the second occurrence of a repeated fall-back hour is moved to
    the first, since both share one position.
    """

    start: int
    values: np.ndarray
    timezone: str = "UTC"

    def __post_init__(self):
        resolve_zone(self.timezone)
        start = int(self.start)
        if start < 0:
            raise ValidationError(f"series start must be non-negative, got {start}")
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValidationError("series values must be one-dimensional")
        present = values[~np.isnan(values)]
        if not np.all(np.isfinite(present)):
            raise ValidationError("present series values must be finite")
        if np.any(present < 0):
            raise ValidationError("present series values must be non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "values", values)

        first = local_hour_labels([start], self.timezone)[0]
        merged = int(label_instants(pd.DatetimeIndex([first]), self.timezone)[0])
        if merged != start:
            local = pd.Timestamp(start, unit="s", tz="UTC").tz_convert(self.timezone)
            if local.minute or local.second:
                raise ValidationError(
                    f"series start {start} is not aligned to a local hour in {self.timezone}"
                )
            # second pass through a repeated fall-back hour
            object.__setattr__(self, "start", merged)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, HourlySeries):
            return NotImplemented
        return (
            self.start == other.start
            and self.timezone == other.timezone
            and np.array_equal(self.values, other.values, equal_nan=True)
        )

    __hash__ = None

    @cached_property
    def labels(self) -> pd.DatetimeIndex:
        """Naive local wall-clock start of each position."""
        first = local_hour_labels([self.start], self.timezone)[0]
        return wall_hours(first, len(self.values), self.timezone)

    @cached_property
    def instants(self) -> np.ndarray:
        """UTC epoch seconds at which each position starts."""
        return label_instants(self.labels, self.timezone)

    @cached_property
    def slots(self) -> np.ndarray:
        return slot_indices(self.labels)

    @property
    def present(self) -> np.ndarray:
        return ~np.isnan(self.values)

    @property
    def missing_count(self) -> int:
        return int(np.isnan(self.values).sum())

    def with_values(self, values: np.ndarray) -> "HourlySeries":
        """Same grid, new values."""
        return HourlySeries(self.start, values, self.timezone)

    def index_of(self, t: int) -> int:
        """Position whose hour starts exactly at ``t``."""
        pos = int(np.searchsorted(self.instants, t))
        if pos >= len(self) or self.instants[pos] != t:
            raise ValidationError(f"timestamp {t} is not an hour start within the series")
        return pos

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"timestamp": self.instants, "kwh": self.values})


# =============================================================================
# Aggregation to Hourly Resolution
# =============================================================================


def reading_columns(readings: Any) -> Tuple[np.ndarray, np.ndarray]:
    """Timestamp and value columns from a ReadingBatch or a sequence of pairs."""
    if hasattr(readings, "t") and hasattr(readings, "v"):
        return np.asarray(readings.t, dtype=np.int64), np.asarray(readings.v, dtype=np.float64)
    pairs = list(readings)
    t = np.fromiter((int(p[0]) for p in pairs), dtype=np.int64, count=len(pairs))
    v = np.fromiter((float(p[1]) for p in pairs), dtype=np.float64, count=len(pairs))
    return t, v


def _grid(
    first: Optional[pd.Timestamp],
    last: Optional[pd.Timestamp],
    start: Optional[int],
    hours: Optional[int],
    zone: str,
) -> pd.DatetimeIndex:
    if start is not None:
        HourlySeries(start, np.empty(0), zone)  # alignment check
        first = local_hour_labels([start], zone)[0]
    if first is None:
        raise InputError("no readings to aggregate and no explicit span given")
    if hours is not None:
        if hours < 0:
            raise InputError(f"span must be non-negative, got {hours} hours")
        return wall_hours(first, hours, zone)
    return wall_hours_between(first, last, zone)


def aggregate_to_hourly(
    readings: Any,
    kind: MeterKind,
    zone: str,
    *,
    start: Optional[int] = None,
    hours: Optional[int] = None,
    tolerance_seconds: int = BOUNDARY_TOLERANCE_SECONDS,
) -> HourlySeries:
    """
    Aggregate raw meter readings to the local hourly grid.

    Interval readings are summed into the local hour their timestamp falls in.
    Cumulative readings give an hour's energy as the counter difference between
    the readings nearest its two boundaries (each within ``tolerance_seconds``);
    an hour whose counter decreases (a reset) is MISSING. Hours with no
    qualifying readings are MISSING.

    Args:
        readings: ReadingBatch or sequence of (timestamp, value) pairs, sorted
        kind: INTERVAL_KWH or CUMULATIVE_KWH
        zone: Household IANA zone
        start: Optional first hour of the output grid (epoch seconds)
        hours: Optional length of the output grid

    Returns:
        HourlySeries on the requested or inferred grid

    Raises:
        InputError: Unsorted readings, or nothing to aggregate
        ValidationError: Negative interval energy
    """
    kind = MeterKind(kind)
    resolve_zone(zone)
    t, v = reading_columns(readings)
    if len(t) > 1 and np.any(np.diff(t) < 0):
        raise InputError("readings must be sorted by timestamp")
    if kind is MeterKind.INTERVAL_KWH:
        series = _aggregate_interval(t, v, zone, start, hours)
    else:
        series = _aggregate_cumulative(t, v, zone, start, hours, tolerance_seconds)
    logger.info(
        f"Aggregated {len(t)} {kind.value} readings into {len(series)} hours "
        f"({series.missing_count} missing) in {zone}"
    )
    return series


def _aggregate_interval(t, v, zone, start, hours) -> HourlySeries:
    negative = np.flatnonzero(v < 0)
    if len(negative):
        raise ValidationError(
            f"negative interval energy {v[negative[0]]} at t={t[negative[0]]}; clean readings first"
        )
    labels = local_hour_labels(t, zone)
    first = labels[0] if len(labels) else None
    last = labels[-1] if len(labels) else None
    grid = _grid(first, last, start, hours, zone)
    # fall-back repeated hours share a label, so their energies add up here
    sums = pd.Series(v, index=labels).groupby(level=0).sum()
    values = sums.reindex(grid).to_numpy(dtype=np.float64)
    if len(grid) == 0:
        return HourlySeries(start if start is not None else int(t[0]), values, zone)
    return HourlySeries(int(label_instants(grid[:1], zone)[0]), values, zone)


def _aggregate_cumulative(t, v, zone, start, hours, tolerance) -> HourlySeries:
    if len(t):
        first = local_hour_labels([t[0] + tolerance], zone)[0]
        last_boundary = local_hour_labels([t[-1] + tolerance], zone)[0]
        last = last_boundary - pd.Timedelta(hours=1)
    else:
        first = last = None
    grid = _grid(first, last, start, hours, zone)
    n = len(grid)
    if n == 0:
        anchor = start if start is not None else int(label_instants(pd.DatetimeIndex([first]), zone)[0])
        return HourlySeries(anchor, np.empty(0), zone)

    boundaries = label_instants(wall_hours(grid[0], n + 1, zone), zone)
    nearest = _nearest_within(t, boundaries, tolerance)

    resets = np.concatenate(([0], np.cumsum(np.diff(v) < 0))) if len(v) else np.zeros(0, np.int64)
    a, b = nearest[:-1], nearest[1:]
    ok = (a >= 0) & (b >= 0)
    values = np.full(n, np.nan)
    ai, bi = a[ok], b[ok]
    deltas = v[bi] - v[ai]
    clean = (resets[bi] - resets[ai] == 0) & (deltas >= 0)
    values[np.flatnonzero(ok)[clean]] = deltas[clean]
    return HourlySeries(int(boundaries[0]), values, zone)


def _nearest_within(t: np.ndarray, targets: np.ndarray, tolerance: int) -> np.ndarray:
    """Index of the reading nearest each target, or -1 when none is within tolerance."""
    if len(t) == 0:
        return np.full(len(targets), -1, dtype=np.int64)
    right = np.clip(np.searchsorted(t, targets), 0, len(t) - 1)
    left = np.clip(right - 1, 0, len(t) - 1)
    pick = np.where(np.abs(t[left] - targets) <= np.abs(t[right] - targets), left, right)
    return np.where(np.abs(t[pick] - targets) <= tolerance, pick, -1).astype(np.int64)


# =============================================================================
# Gaps
# =============================================================================


@dataclass(frozen=True)
class Gap:
    start_index: int
    length_hours: int


@dataclass(frozen=True)
class GapMap:
    """Maximal runs of MISSING positions, sorted and disjoint."""

    gaps: Tuple[Gap, ...] = ()

    @property
    def missing_hours(self) -> int:
        return sum(g.length_hours for g in self.gaps)

    @property
    def longest(self) -> int:
        return max((g.length_hours for g in self.gaps), default=0)

    def mask(self, length: int) -> np.ndarray:
        """Boolean MISSING mask of a series of the given length."""
        out = np.zeros(length, dtype=bool)
        for g in self.gaps:
            out[g.start_index:g.start_index + g.length_hours] = True
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gaps": [
                {"start_index": g.start_index, "length_hours": g.length_hours} for g in self.gaps
            ]
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GapMap":
        try:
            return cls(tuple(Gap(int(g["start_index"]), int(g["length_hours"])) for g in data["gaps"]))
        except (KeyError, TypeError) as e:
            raise SchemaError(f"malformed gap map: {e}") from e


def detect_gaps(s: HourlySeries) -> GapMap:
    """Maximal runs of MISSING hours in a series."""
    missing = np.isnan(s.values).astype(np.int8)
    edges = np.diff(np.concatenate(([0], missing, [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    return GapMap(tuple(Gap(int(a), int(b - a)) for a, b in zip(starts, ends)))


def summarize_gaps(gap_map: GapMap, length: int) -> Dict[str, Any]:
    """Data-quality summary of a gap map over a series of ``length`` hours."""
    return {
        "hours": length,
        "missing_hours": gap_map.missing_hours,
        "gap_count": len(gap_map.gaps),
        "longest_gap_hours": gap_map.longest,
        "completeness": (1.0 - gap_map.missing_hours / length) if length else 0.0,
    }


# =============================================================================
# Monthly Totals
# =============================================================================


class Provenance(str, Enum):
    OBSERVED = "OBSERVED"
    FILLED = "FILLED"
    ABSENT = "ABSENT"


@dataclass(frozen=True)
class MonthTotal:
    month: int
    total_kwh: float
    coverage: float
    provenance: Provenance

    def __post_init__(self):
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        if not 1 <= self.month <= 12:
            raise ValidationError(f"month must be in 1..12, got {self.month}")
        if not np.isfinite(self.total_kwh) or self.total_kwh < 0:
            raise ValidationError(
                f"month {self.month}: total must be finite and non-negative, got {self.total_kwh}"
            )
        if not 0.0 <= self.coverage <= 1.0:
            raise ValidationError(f"month {self.month}: coverage must be in [0, 1]")
        if self.coverage == 0.0 and self.provenance is Provenance.OBSERVED:
            raise ValidationError(f"month {self.month}: zero coverage cannot be OBSERVED")


@dataclass(frozen=True)
class MonthlyTotals:
    """Twelve month totals, January first, with provenance flags."""

    months: Tuple[MonthTotal, ...]

    def __post_init__(self):
        months = tuple(self.months)
        if len(months) != 12:
            raise SchemaError(f"expected 12 monthly totals, found {len(months)}")
        for i, m in enumerate(months, start=1):
            if m.month != i:
                raise SchemaError(f"monthly totals out of order: position {i} holds month {m.month}")
        object.__setattr__(self, "months", months)

    def __getitem__(self, month: int) -> MonthTotal:
        return self.months[month - 1]

    def __iter__(self):
        return iter(self.months)

    @property
    def totals(self) -> np.ndarray:
        return np.array([m.total_kwh for m in self.months], dtype=np.float64)

    def with_provenance(self, provenance: Provenance) -> List[MonthTotal]:
        return [m for m in self.months if m.provenance is Provenance(provenance)]

    @classmethod
    def from_observed(cls, observed: Dict[int, float]) -> "MonthlyTotals":
        """Fully covered OBSERVED months for the given totals, ABSENT elsewhere."""
        return cls(tuple(
            MonthTotal(m, float(observed[m]), 1.0, Provenance.OBSERVED)
            if m in observed
            else MonthTotal(m, 0.0, 0.0, Provenance.ABSENT)
            for m in range(1, 13)
        ))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "months": [
                {
                    "month": m.month,
                    "total_kwh": m.total_kwh,
                    "coverage": m.coverage,
                    "provenance": m.provenance.value,
                }
                for m in self.months
            ]
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MonthlyTotals":
        try:
            return cls(tuple(
                MonthTotal(int(m["month"]), float(m["total_kwh"]), float(m["coverage"]), m["provenance"])
                for m in data["months"]
            ))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ValidationError):
                raise
            raise SchemaError(f"malformed monthly totals: {e}") from e


def aggregate_to_monthly(
    s: HourlySeries,
    completeness_threshold: float = DEFAULT_COMPLETENESS_THRESHOLD,
) -> MonthlyTotals:
    """
    Per-calendar-month totals of a series.

    Coverage is present hours over the month's local calendar hours. Months at
    or above the completeness threshold are OBSERVED, and partially covered
    ones are scaled up by 1/coverage; the rest are ABSENT. When a series spans
    the same calendar month in several years, those months are pooled.
    """
    if not 0.0 < completeness_threshold <= 1.0:
        raise ValidationError(
            f"completeness threshold must be in (0, 1], got {completeness_threshold}"
        )
    totals = np.zeros(13)
    present_hours = np.zeros(13, dtype=np.int64)
    calendar_hours = np.zeros(13, dtype=np.int64)

    if len(s):
        frame = pd.DataFrame({
            "year": s.labels.year,
            "month": s.labels.month,
            "kwh": s.values,
            "present": s.present,
        })
        grouped = frame.groupby(["year", "month"]).agg(kwh=("kwh", "sum"), present=("present", "sum"))
        for (year, month), row in grouped.iterrows():
            totals[month] += row["kwh"]
            present_hours[month] += int(row["present"])
            calendar_hours[month] += len(month_hours(int(year), int(month), s.timezone))

    months = []
    for month in range(1, 13):
        coverage = present_hours[month] / calendar_hours[month] if calendar_hours[month] else 0.0
        coverage = min(float(coverage), 1.0)
        if coverage >= completeness_threshold:
            total = totals[month] if coverage == 1.0 else totals[month] / coverage
            months.append(MonthTotal(month, float(total), coverage, Provenance.OBSERVED))
        else:
            months.append(MonthTotal(month, float(totals[month]), coverage, Provenance.ABSENT))
        logger.debug(f"Month {month}: coverage {coverage:.3f}, total {months[-1].total_kwh:.3f} kWh")

    observed = sum(1 for m in months if m.provenance is Provenance.OBSERVED)
    logger.info(f"Monthly aggregation: {observed} observed month(s) at threshold {completeness_threshold}")
    return MonthlyTotals(tuple(months))


# =============================================================================
# CSV Columns
# =============================================================================

# Latest epoch second that stays a valid pandas timestamp under any UTC offset
MAX_TIMESTAMP = (pd.Timestamp.max - pd.Timedelta(days=2)).value // 1_000_000_000

_INTEGER = r"\d+"


def read_text_csv(path: PathLike) -> pd.DataFrame:
    """
    Read a CSV with every cell as text, so each column can be checked row by row.

    Raises:
        ParseError: Empty file or a row with the wrong number of fields
    """
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False,
                           encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise ParseError("file is empty; expected a header row", line=1, field="header",
                         path=str(path)) from None
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        line = int(match.group(1)) if match else None
        raise ParseError(f"wrong number of fields ({e})", line=line, path=str(path)) from e


def parse_timestamp_column(column: pd.Series, path: PathLike, field: str = "timestamp") -> np.ndarray:
    """
    Epoch seconds from a text column; data rows start at line 2.

    Raises:
        ParseError: A cell that is not an integer in [0, MAX_TIMESTAMP]
    """
    stamps = column.fillna("").str.strip()
    bad = np.flatnonzero(~stamps.str.fullmatch(_INTEGER).to_numpy(dtype=bool))
    if len(bad):
        raise ParseError(f"not a non-negative integer: {stamps.iloc[bad[0]]!r}",
                         line=int(bad[0]) + 2, field=field, path=str(path))
    digits = stamps.str.lstrip("0")
    limit = str(MAX_TIMESTAMP)
    too_big = (digits.str.len() > len(limit)) | ((digits.str.len() == len(limit)) & (digits > limit))
    big = np.flatnonzero(too_big.to_numpy(dtype=bool))
    if len(big):
        raise ParseError(f"timestamp out of range (max {MAX_TIMESTAMP}): {stamps.iloc[big[0]]!r}",
                         line=int(big[0]) + 2, field=field, path=str(path))
    return stamps.to_numpy().astype(np.int64)


def parse_number_column(
    column: pd.Series,
    path: PathLike,
    field: str,
    allow_empty: bool = False,
) -> np.ndarray:
    """
    Finite floats from a text column; empty cells become MISSING when allowed.

    Raises:
        ParseError: A cell that is not a finite number
    """
    raw = column.fillna("").str.strip()
    filled = raw.mask(raw == "", "nan") if allow_empty else raw
    try:
        values = filled.to_numpy().astype(np.float64)
    except ValueError:
        values = pd.to_numeric(filled, errors="coerce").to_numpy(dtype=np.float64)
    bad = ~np.isfinite(values)
    if allow_empty:
        bad &= (raw != "").to_numpy(dtype=bool)
    bad_rows = np.flatnonzero(bad)
    if len(bad_rows):
        expected = "a finite number or empty" if allow_empty else "a finite number"
        raise ParseError(f"expected {expected}, found {raw.iloc[bad_rows[0]]!r}",
                         line=int(bad_rows[0]) + 2, field=field, path=str(path))
    return values


# =============================================================================
# Series Persistence
# =============================================================================


def write_series_csv(s: HourlySeries, path: PathLike) -> None:
    """Write a series as ``timestamp,kwh`` rows, empty kwh for MISSING hours."""
    frame = s.to_frame()
    frame.to_csv(path, index=False, lineterminator="\n", na_rep="")


def read_series_csv(path: PathLike, zone: str) -> HourlySeries:
    """
    Read a series written by :func:`write_series_csv`.

    Raises:
        ParseError: Bad header, unparsable row, or rows off the hourly grid
    """
    frame = read_text_csv(path)
    if list(frame.columns) != ["timestamp", "kwh"]:
        raise ParseError("expected header 'timestamp,kwh'", line=1, field="header", path=str(path))
    t = parse_timestamp_column(frame["timestamp"], path)
    values = parse_number_column(frame["kwh"], path, "kwh", allow_empty=True)
    if len(t) == 0:
        raise ParseError("series file has no rows", line=1, path=str(path))
    series = HourlySeries(int(t[0]), values, zone)
    off_grid = np.flatnonzero(series.instants != t)
    if len(off_grid):
        raise ParseError(f"row is not the next local hour in {zone}", line=int(off_grid[0]) + 2,
                         field="timestamp", path=str(path))
    return series
