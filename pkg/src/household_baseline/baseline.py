"""
Year-long hourly baseline synthesis.

Observed monthly totals are compared with a country reference profile to get
an adjustment factor; unobserved months are filled from the reference scaled
by that factor; the observed hours give a 168-slot weekly percentage
distribution; and the distribution maps every month total onto hourly values,
either deterministically or by resampling observed slot values.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from .errors import (
    DegenerateDistributionError,
    InsufficientDataError,
    InvalidFactorError,
    ParseError,
    PreconditionError,
    SchemaError,
    ValidationError,
)
from .reference import ReferenceProfile
from .timeseries import (
    HOURS_PER_DAY,
    SLOTS_PER_WEEK,
    HourlySeries,
    MonthlyTotals,
    MonthTotal,
    Provenance,
    Slot,
    Weekday,
    label_instants,
    local_hour_labels,
    month_hours,
    parse_number_column,
    parse_timestamp_column,
    read_text_csv,
    slot_indices,
)
from .utils import PathLike, resolve_zone

logger = logging.getLogger(__name__)

WEEKS_PER_MONTH = 4
FOUR_WEEK_MONTH_HOURS = WEEKS_PER_MONTH * SLOTS_PER_WEEK
SHARE_TOLERANCE = 1e-9
MAX_SEED = 2**64 - 1

FOUR_WEEK_CSV_COLUMNS = ["month", "week", "day", "hour", "kwh"]
CALENDAR_CSV_COLUMNS = ["timestamp", "kwh"]


class FactorMode(str, Enum):
    PAPER_LITERAL = "paper_literal"
    RATIO = "ratio"


class LayoutMode(str, Enum):
    PAPER_LITERAL = "paper_literal"
    CALENDAR = "calendar"


class Generation(str, Enum):
    DETERMINISTIC = "deterministic"
    STOCHASTIC = "stochastic"


# =============================================================================
# Adjustment Factor and Monthly Fill
# =============================================================================


@dataclass(frozen=True)
class AdjustmentFactor:
    """
    Scalar relating a household's observed months to the reference profile.

    RATIO is the mean of observed/reference over the k observed months.
    PAPER_LITERAL is the mean of (reference - observed)/reference, which is
    1 - RATIO by construction.
    """

    value: float
    mode: FactorMode
    k: int

    def __post_init__(self):
        object.__setattr__(self, "mode", FactorMode(self.mode))
        if self.k < 1:
            raise ValidationError(f"adjustment factor needs k >= 1 observed months, got {self.k}")
        if not math.isfinite(self.value):
            raise ValidationError("adjustment factor must be finite")
        if self.mode is FactorMode.PAPER_LITERAL and self.value > 1.0 + 1e-12:
            raise ValidationError(f"paper-literal factor cannot exceed 1, got {self.value}")

    def to_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "mode": self.mode.value, "k": self.k}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AdjustmentFactor":
        try:
            return cls(float(data["value"]), FactorMode(data["mode"]), int(data["k"]))
        except (KeyError, TypeError) as e:
            raise SchemaError(f"malformed adjustment factor: {e}") from e


def adjustment_factor(
    observed: MonthlyTotals,
    ref: ReferenceProfile,
    mode: FactorMode = FactorMode.RATIO,
) -> AdjustmentFactor:
    """
    Adjustment factor over the OBSERVED months.

    Raises:
        InsufficientDataError: No OBSERVED month
    """
    mode = FactorMode(mode)
    months = observed.with_provenance(Provenance.OBSERVED)
    k = len(months)
    if k == 0:
        raise InsufficientDataError("need >= 1 observed month; found 0")
    c = np.array([m.total_kwh for m in months])
    c_hat = np.array([ref[m.month] for m in months])
    if mode is FactorMode.RATIO:
        value = math.fsum(c / c_hat) / k
    else:
        value = math.fsum((c_hat - c) / c_hat) / k
    logger.info(f"Adjustment factor ({mode.value}) = {value:.6f} over {k} observed month(s)")
    return AdjustmentFactor(value, mode, k)


def fill_monthly(
    observed: MonthlyTotals,
    ref: ReferenceProfile,
    f: AdjustmentFactor,
) -> MonthlyTotals:
    """
    Fill every ABSENT month with ``f.value * reference``.

    OBSERVED (and already FILLED) months pass through unchanged.

    Raises:
        InvalidFactorError: RATIO factor <= 0, or a negative paper-literal
            factor that would fill months with negative energy
        PreconditionError: Factor computed over a different set of months
    """
    if f.mode is FactorMode.RATIO and f.value <= 0:
        raise InvalidFactorError(f"ratio factor must be > 0 to fill months, got {f.value}")
    observed_count = len(observed.with_provenance(Provenance.OBSERVED))
    if f.k != observed_count:
        raise PreconditionError(
            f"factor was computed over {f.k} month(s) but {observed_count} are observed"
        )
    absent = observed.with_provenance(Provenance.ABSENT)
    if absent and f.value < 0:
        raise InvalidFactorError(
            f"paper-literal factor {f.value:.6f} is negative: the household exceeds the "
            "reference and filled months would carry negative energy; use the ratio mode"
        )

    months: List[MonthTotal] = []
    for m in observed:
        if m.provenance is Provenance.ABSENT:
            months.append(MonthTotal(m.month, f.value * ref[m.month], m.coverage, Provenance.FILLED))
        else:
            months.append(m)
    logger.info(f"Filled {len(absent)} month(s) from the {ref.country} reference profile")
    return MonthlyTotals(tuple(months))


def _require_complete(months: MonthlyTotals) -> None:
    absent = [m.month for m in months.with_provenance(Provenance.ABSENT)]
    if absent:
        raise PreconditionError(
            f"baseline synthesis needs all 12 months; month(s) {absent} are ABSENT, fill them first"
        )


# =============================================================================
# Weekly Distribution
# =============================================================================


@dataclass(frozen=True, eq=False)
class WeeklyDistribution:
    """168 per-slot shares of weekly consumption, summing to 1."""

    shares: np.ndarray

    def __post_init__(self):
        shares = np.array(self.shares, dtype=np.float64).reshape(-1)
        if shares.shape != (SLOTS_PER_WEEK,):
            raise ValidationError(f"expected {SLOTS_PER_WEEK} shares, found {shares.size}")
        if not np.all(np.isfinite(shares)) or np.any(shares < 0):
            raise ValidationError("shares must be finite and non-negative")
        if abs(math.fsum(shares) - 1.0) > SHARE_TOLERANCE:
            raise ValidationError(f"shares must sum to 1, got {math.fsum(shares)!r}")
        shares.setflags(write=False)
        object.__setattr__(self, "shares", shares)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, WeeklyDistribution):
            return NotImplemented
        return np.array_equal(self.shares, other.shares)

    __hash__ = None

    def share(self, slot) -> float:
        index = slot.index if isinstance(slot, Slot) else int(slot)
        return float(self.shares[index])

    def as_matrix(self) -> np.ndarray:
        """Shares as a (7, 24) day-by-hour matrix, Monday first."""
        return self.shares.reshape(7, HOURS_PER_DAY)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "shares": {
                day.label: row.tolist() for day, row in zip(Weekday, self.as_matrix())
            }
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "WeeklyDistribution":
        try:
            rows = [data["shares"][day.label] for day in Weekday]
        except (KeyError, TypeError) as e:
            raise SchemaError(f"malformed weekly distribution: {e}") from e
        if any(len(row) != HOURS_PER_DAY for row in rows):
            raise SchemaError("each weekday needs 24 hourly shares")
        return cls(np.array(rows, dtype=np.float64).reshape(-1))


@dataclass(frozen=True, eq=False)
class SlotSamplePool:
    """Observed hourly kWh values collected per slot, in time order."""

    values: Tuple[np.ndarray, ...]

    def __post_init__(self):
        pools = tuple(np.array(p, dtype=np.float64).reshape(-1) for p in self.values)
        if len(pools) != SLOTS_PER_WEEK:
            raise ValidationError(f"expected {SLOTS_PER_WEEK} slot pools, found {len(pools)}")
        for p in pools:
            if not np.all(np.isfinite(p)) or np.any(p < 0):
                raise ValidationError("pooled values must be finite and non-negative")
            p.setflags(write=False)
        object.__setattr__(self, "values", pools)

    def __getitem__(self, index: int) -> np.ndarray:
        return self.values[index]

    @property
    def sizes(self) -> np.ndarray:
        return np.array([len(p) for p in self.values], dtype=np.int64)

    def candidates(self, index: int) -> np.ndarray:
        """
        Values a slot draws from.

        An empty slot borrows the same hour on the other six days, and failing
        that every observed value.
        """
        own = self.values[index]
        if len(own):
            return own
        day, hour = divmod(index, HOURS_PER_DAY)
        same_hour = [self.values[d * HOURS_PER_DAY + hour] for d in range(7) if d != day]
        borrowed = np.concatenate(same_hour)
        if len(borrowed):
            return borrowed
        return np.concatenate(self.values)


def weekly_distribution(series: HourlySeries) -> Tuple[WeeklyDistribution, SlotSamplePool]:
    """
    Weekly percentage distribution of a household's observed hours.

    Each slot's share is its mean over all observed weeks, normalised so the
    168 shares sum to 1. A slot with no observations takes the mean of the
    same hour on the other days, or the mean of all present values.

    Raises:
        InsufficientDataError: No present hourly value
        DegenerateDistributionError: All present values are zero
    """
    present = series.present
    if not present.any():
        raise InsufficientDataError("weekly distribution needs at least one present hourly value")
    slots = series.slots[present]
    values = series.values[present]
    if math.fsum(values) == 0.0:
        raise DegenerateDistributionError("all observed hourly values are zero; cannot normalise")

    sums = np.bincount(slots, weights=values, minlength=SLOTS_PER_WEEK)
    counts = np.bincount(slots, minlength=SLOTS_PER_WEEK)
    means = np.full(SLOTS_PER_WEEK, np.nan)
    seen = counts > 0
    means[seen] = sums[seen] / counts[seen]

    empty = np.flatnonzero(~seen)
    if len(empty):
        logger.warning(f"{len(empty)} weekly slot(s) have no observations; imputing")
        grid = means.reshape(7, HOURS_PER_DAY).copy()
        global_mean = float(values.mean())
        for index in empty:
            day, hour = divmod(int(index), HOURS_PER_DAY)
            others = np.delete(grid[:, hour], day)
            others = others[np.isfinite(others)]
            means[index] = others.mean() if len(others) else global_mean

    shares = means / means.sum()

    order = np.argsort(slots, kind="stable")
    boundaries = np.cumsum(counts)[:-1]
    pool = SlotSamplePool(tuple(np.split(values[order], boundaries)))
    return WeeklyDistribution(shares), pool


# =============================================================================
# Baseline Year
# =============================================================================


def block_slots(
    layout: LayoutMode,
    month: int,
    year: Optional[int] = None,
    timezone: str = "UTC",
) -> np.ndarray:
    """Slot index of every hour of a month block, in block order."""
    if LayoutMode(layout) is LayoutMode.PAPER_LITERAL:
        return np.tile(np.arange(SLOTS_PER_WEEK), WEEKS_PER_MONTH)
    if year is None:
        raise PreconditionError("calendar layout needs a baseline year")
    return slot_indices(month_hours(year, month, timezone))


@dataclass(frozen=True, eq=False)
class BaselineYear:
    """
    Synthesised hourly baseline, one block per month.

    Paper-literal blocks are 4 identical-length weeks of 168 hours (week,
    weekday, hour order); calendar blocks follow the month's local wall hours
    in ``year`` and ``timezone``. Stochastic baselines keep the pre-rescale
    draws in ``draws``.
    """

    months: Tuple[np.ndarray, ...]
    layout: LayoutMode = LayoutMode.PAPER_LITERAL
    generation: Generation = Generation.DETERMINISTIC
    seed: Optional[int] = None
    year: Optional[int] = None
    timezone: str = "UTC"
    draws: Optional[Tuple[np.ndarray, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "layout", LayoutMode(self.layout))
        object.__setattr__(self, "generation", Generation(self.generation))
        resolve_zone(self.timezone)
        blocks = tuple(np.array(b, dtype=np.float64).reshape(-1) for b in self.months)
        if len(blocks) != 12:
            raise ValidationError(f"expected 12 month blocks, found {len(blocks)}")
        if self.layout is LayoutMode.CALENDAR and self.year is None:
            raise ValidationError("calendar baselines need a year")
        for month, block in enumerate(blocks, start=1):
            expected = len(block_slots(self.layout, month, self.year, self.timezone))
            if len(block) != expected:
                raise ValidationError(
                    f"month {month} block has {len(block)} hours, expected {expected}"
                )
            if not np.all(np.isfinite(block)) or np.any(block < 0):
                raise ValidationError(f"month {month} block has negative or non-finite values")
            block.setflags(write=False)
        object.__setattr__(self, "months", blocks)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, BaselineYear):
            return NotImplemented
        return (
            self.layout == other.layout
            and self.year == other.year
            and self.timezone == other.timezone
            and all(np.array_equal(a, b) for a, b in zip(self.months, other.months))
        )

    __hash__ = None

    def month_total(self, month: int) -> float:
        return math.fsum(self.months[month - 1])

    def labels(self, month: int) -> pd.DatetimeIndex:
        """Local wall hours of a calendar-layout month block."""
        if self.layout is not LayoutMode.CALENDAR:
            raise PreconditionError("only calendar baselines have wall-clock labels")
        return month_hours(self.year, month, self.timezone)


def synthesize_baseline(
    dist: WeeklyDistribution,
    months: MonthlyTotals,
    layout: LayoutMode = LayoutMode.PAPER_LITERAL,
    *,
    year: Optional[int] = None,
    timezone: str = "UTC",
) -> BaselineYear:
    """
    Deterministic hourly baseline from a weekly distribution.

    Paper-literal: each month is 4 identical weeks whose hour values are
    ``share * month_total / 4``. Calendar: the weekly pattern tiles the
    month's actual local hours and is rescaled to the month total.

    Raises:
        PreconditionError: A month is still ABSENT
    """
    layout = LayoutMode(layout)
    _require_complete(months)
    blocks = []
    for m in months:
        if layout is LayoutMode.PAPER_LITERAL:
            blocks.append(np.tile(dist.shares, WEEKS_PER_MONTH) * (m.total_kwh / WEEKS_PER_MONTH))
        else:
            pattern = dist.shares[block_slots(layout, m.month, year, timezone)]
            blocks.append(pattern * (m.total_kwh / pattern.sum()))
    baseline = BaselineYear(tuple(blocks), layout, Generation.DETERMINISTIC,
                            year=year, timezone=timezone)
    logger.info(f"Synthesised {layout.value} baseline: {annual_total(baseline):.3f} kWh/year")
    return baseline


def sample_stochastic(
    pool: SlotSamplePool,
    months: MonthlyTotals,
    seed: int,
    layout: LayoutMode = LayoutMode.PAPER_LITERAL,
    *,
    year: Optional[int] = None,
    timezone: str = "UTC",
) -> BaselineYear:
    """
    Random hourly baseline that follows the observed per-slot distribution.

    Generator contract: numpy's PCG64 bit generator seeded with ``seed``
    drives ``Generator.random``; one double ``u`` is drawn per synthetic hour,
    month-major and in block order (week, weekday, hour), and the hour takes
    ``candidates[floor(u * len(candidates))]`` from its slot. Each month block
    is then rescaled to its month total (a block of all-zero draws is spread
    evenly instead).

    Raises:
        InsufficientDataError: Every slot pool is empty
        PreconditionError: A month is still ABSENT
    """
    layout = LayoutMode(layout)
    _require_complete(months)
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed <= MAX_SEED:
        raise ValidationError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    if pool.sizes.sum() == 0:
        raise InsufficientDataError("stochastic sampling needs at least one observed slot value")

    candidates = [pool.candidates(i) for i in range(SLOTS_PER_WEEK)]
    sizes = np.array([len(c) for c in candidates], dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    flat = np.concatenate(candidates)

    rng = np.random.Generator(np.random.PCG64(int(seed)))
    blocks, draws = [], []
    for m in months:
        slots = block_slots(layout, m.month, year, timezone)
        u = rng.random(len(slots))
        picks = np.minimum((u * sizes[slots]).astype(np.int64), sizes[slots] - 1)
        raw = flat[offsets[slots] + picks]
        total = raw.sum()
        if total > 0:
            block = raw * (m.total_kwh / total)
        else:
            block = np.full(len(raw), m.total_kwh / len(raw))
        blocks.append(block)
        draws.append(raw)

    baseline = BaselineYear(tuple(blocks), layout, Generation.STOCHASTIC, seed=int(seed),
                            year=year, timezone=timezone, draws=tuple(draws))
    logger.info(f"Sampled stochastic {layout.value} baseline with seed {seed}: "
                f"{annual_total(baseline):.3f} kWh/year")
    return baseline


def annual_total(b: BaselineYear) -> float:
    """Total baseline energy over the year (sum of all hourly values)."""
    return math.fsum(np.concatenate(b.months))


# =============================================================================
# Baseline Persistence
# =============================================================================


def write_baseline_csv(b: BaselineYear, path: PathLike) -> None:
    """
    Write a baseline as CSV.

    Paper-literal: ``month,week,day,hour,kwh``; calendar: ``timestamp,kwh``.
    """
    if b.layout is LayoutMode.PAPER_LITERAL:
        frame = _four_week_index()
        frame["kwh"] = np.concatenate(b.months)
    else:
        stamps = np.concatenate([label_instants(b.labels(m), b.timezone) for m in range(1, 13)])
        frame = pd.DataFrame({"timestamp": stamps, "kwh": np.concatenate(b.months)})
    frame.to_csv(path, index=False, lineterminator="\n")


def _four_week_index() -> pd.DataFrame:
    per_month = FOUR_WEEK_MONTH_HOURS
    days = [day.label for day in Weekday]
    return pd.DataFrame({
        "month": np.repeat(np.arange(1, 13), per_month),
        "week": np.tile(np.repeat(np.arange(1, WEEKS_PER_MONTH + 1), SLOTS_PER_WEEK), 12),
        "day": np.tile(np.repeat(days, HOURS_PER_DAY), WEEKS_PER_MONTH * 12),
        "hour": np.tile(np.arange(HOURS_PER_DAY), 7 * WEEKS_PER_MONTH * 12),
    })


def read_baseline_csv(path: PathLike, timezone: str = "UTC") -> BaselineYear:
    """
    Read a baseline written by :func:`write_baseline_csv`.

    Calendar files are interpreted in ``timezone``; the generation mode is
    not stored and reads back as DETERMINISTIC.

    Raises:
        ParseError: Unknown header, unparsable row, or rows out of layout order
    """
    frame = read_text_csv(path)
    columns = list(frame.columns)
    if columns == FOUR_WEEK_CSV_COLUMNS:
        expected = _four_week_index()
        if len(frame) != len(expected):
            raise ParseError(f"expected {len(expected)} rows, found {len(frame)}",
                             line=len(frame) + 1, path=str(path))
        for column in ("month", "week", "day", "hour"):
            found = frame[column].str.strip().to_numpy()
            mismatch = np.flatnonzero(found != expected[column].astype(str).to_numpy())
            if len(mismatch):
                raise ParseError("row out of month/week/day/hour order", line=int(mismatch[0]) + 2,
                                 field=column, path=str(path))
        values = parse_number_column(frame["kwh"], path, "kwh")
        return BaselineYear(tuple(np.split(values, 12)), LayoutMode.PAPER_LITERAL)

    if columns == CALENDAR_CSV_COLUMNS:
        if frame.empty:
            raise ParseError("baseline file has no rows", line=1, path=str(path))
        stamps = parse_timestamp_column(frame["timestamp"], path)
        values = parse_number_column(frame["kwh"], path, "kwh")
        labels = local_hour_labels(stamps, timezone)
        year = int(labels[0].year)
        if np.any(labels.year != year):
            raise ParseError("calendar baseline spans more than one year", field="timestamp",
                             path=str(path))
        month_of = np.asarray(labels.month)
        blocks = tuple(values[month_of == m] for m in range(1, 13))
        return BaselineYear(blocks, LayoutMode.CALENDAR, year=year, timezone=timezone)

    raise ParseError(
        f"unrecognised baseline header '{','.join(columns)}'", line=1, field="header", path=str(path)
    )
