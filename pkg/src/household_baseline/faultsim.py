"""
Deterministic injection of gateway field failures into clean series.

Three failure modes are reproduced: connectivity dropouts (scattered lost
hours), the gateway being unplugged (a contiguous outage) and storage
corruption (stored values replaced by negative or spike magnitudes). Given
the same series and plan, every injection produces the same output.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, NamedTuple, Tuple

import numpy as np

from .baseline import MAX_SEED
from .config import DEFAULT_SPIKE_THRESHOLD_KWH
from .errors import SchemaError, ValidationError
from .ingestion import ReadingBatch
from .timeseries import HourlySeries
from .utils import PathLike, read_json, write_json

logger = logging.getLogger(__name__)

SPIKE_MULTIPLIER = 10.0


class UnplugWindow(NamedTuple):
    start: int
    hours: int


@dataclass(frozen=True)
class FaultPlan:
    seed: int = 0
    dropout_rate: float = 0.0
    unplug_windows: Tuple[UnplugWindow, ...] = ()
    corruption_rate: float = 0.0

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        _check_rate("dropout_rate", self.dropout_rate)
        _check_rate("corruption_rate", self.corruption_rate)
        windows = tuple(UnplugWindow(int(w[0]), int(w[1])) for w in self.unplug_windows)
        for w in windows:
            if w.start < 0 or w.hours < 0:
                raise ValidationError(f"unplug window {tuple(w)} must have non-negative start and hours")
        object.__setattr__(self, "unplug_windows", windows)

    @property
    def is_empty(self) -> bool:
        return (
            self.dropout_rate == 0
            and self.corruption_rate == 0
            and all(w.hours == 0 for w in self.unplug_windows)
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "dropout_rate": self.dropout_rate,
            "unplug_windows": [{"start": w.start, "hours": w.hours} for w in self.unplug_windows],
            "corruption_rate": self.corruption_rate,
        }

    @classmethod
    def from_dict(cls, data: Any) -> "FaultPlan":
        if not isinstance(data, dict):
            raise SchemaError("fault plan must be a JSON object")
        unknown = set(data) - {"seed", "dropout_rate", "unplug_windows", "corruption_rate"}
        if unknown:
            raise SchemaError(f"unknown fault plan key(s): {', '.join(sorted(unknown))}")
        try:
            windows = tuple(UnplugWindow(w["start"], w["hours"]) for w in data.get("unplug_windows", []))
        except (KeyError, TypeError) as e:
            raise SchemaError(f"unplug windows need 'start' and 'hours': {e}") from e
        return cls(
            seed=data.get("seed", 0),
            dropout_rate=data.get("dropout_rate", 0.0),
            unplug_windows=windows,
            corruption_rate=data.get("corruption_rate", 0.0),
        )


def _check_rate(name: str, rate: Any) -> None:
    if isinstance(rate, bool) or not isinstance(rate, (int, float)) or not 0.0 <= rate <= 1.0:
        raise ValidationError(f"{name} must be in [0, 1], got {rate!r}")


def load_fault_plan(path: PathLike) -> FaultPlan:
    return FaultPlan.from_dict(read_json(path))


def save_fault_plan(plan: FaultPlan, path: PathLike) -> None:
    write_json(path, plan.to_dict())


def _rng(seed: int, stream: int = 0) -> np.random.Generator:
    bits = np.random.PCG64(seed)
    for _ in range(stream):
        bits = bits.jumped()
    return np.random.Generator(bits)


# =============================================================================
# Injections
# =============================================================================


def inject_dropouts(s: HourlySeries, rate: float, seed: int) -> HourlySeries:
    """
    Mark ``floor(rate * n)`` seeded present hours MISSING, n being the
    number of present hours.

    Hours that are already MISSING are never drawn, so exactly that many
    hours become newly MISSING.
    """
    _check_rate("dropout_rate", rate)
    present = np.flatnonzero(s.present)
    count = int(np.floor(rate * len(present)))
    if count == 0:
        return s
    chosen = present[_rng(seed).permutation(len(present))[:count]]
    values = s.values.copy()
    values[chosen] = np.nan
    return s.with_values(values)


def inject_unplug(s: HourlySeries, window: UnplugWindow) -> HourlySeries:
    """
    Mark a contiguous run of hours MISSING.

    Raises:
        ValidationError: Window start is not an hour of the series, or the
            window runs past its end
    """
    window = UnplugWindow(int(window[0]), int(window[1]))
    if window.hours == 0:
        return s
    first = s.index_of(window.start)
    if first + window.hours > len(s):
        raise ValidationError(
            f"unplug window of {window.hours} hours from {window.start} runs past the series end"
        )
    values = s.values.copy()
    values[first:first + window.hours] = np.nan
    return s.with_values(values)


def series_to_readings(s: HourlySeries) -> ReadingBatch:
    """Interval readings stamped at each present hour's start; MISSING hours are omitted."""
    present = s.present
    return ReadingBatch(s.instants[present], s.values[present])


def _corrupt(
    s: HourlySeries,
    rate: float,
    seed: int,
    spike_threshold: float,
    stream: int = 0,
) -> Tuple[ReadingBatch, np.ndarray]:
    _check_rate("corruption_rate", rate)
    present = np.flatnonzero(s.present)
    count = int(np.floor(rate * len(present)))
    values = s.values.copy()
    chosen = np.sort(_rng(seed, stream).permutation(len(present))[:count])
    positions = present[chosen]
    for rank, position in enumerate(positions):
        v = values[position]
        if rank % 2 == 0 and v > 0:
            values[position] = -abs(v)
        else:
            values[position] = spike_threshold * SPIKE_MULTIPLIER
    keep = s.present
    return ReadingBatch(s.instants[keep], values[keep]), positions


def inject_corruption(
    s: HourlySeries,
    rate: float,
    seed: int,
    spike_threshold: float = DEFAULT_SPIKE_THRESHOLD_KWH,
) -> ReadingBatch:
    """
    Gateway readings with ``floor(rate * present hours)`` values corrupted.

    Corrupted values alternate between the negated reading and ten times the
    spike threshold (zero readings always take the spike), so default
    cleaning rules catch every one. The result is a reading batch because a
    corrupted series cannot hold negative values.
    """
    readings, _ = _corrupt(s, rate, seed, spike_threshold)
    return readings


# =============================================================================
# Plans
# =============================================================================


@dataclass(frozen=True)
class FaultLog:
    """Bookkeeping of what a plan injected."""

    unplugged_hours: int
    dropped_hours: int
    corrupted_negative: int
    corrupted_spike: int
    corrupted_positions: Tuple[int, ...] = field(default=(), repr=False)

    @property
    def corrupted(self) -> int:
        return self.corrupted_negative + self.corrupted_spike

    def to_dict(self) -> Dict[str, int]:
        return {
            "unplugged_hours": self.unplugged_hours,
            "dropped_hours": self.dropped_hours,
            "corrupted_negative": self.corrupted_negative,
            "corrupted_spike": self.corrupted_spike,
        }


@dataclass(frozen=True)
class FaultResult:
    readings: ReadingBatch
    series: HourlySeries
    log: FaultLog


def apply_plan(
    s: HourlySeries,
    plan: FaultPlan,
    spike_threshold: float = DEFAULT_SPIKE_THRESHOLD_KWH,
) -> FaultResult:
    """
    Apply unplug windows, then dropouts, then corruption.

    Returns:
        FaultResult with the gateway readings, the series cleaning should
        recover (every lost or corrupted hour MISSING), and the FaultLog
    """
    missing_before = s.missing_count
    faulted = s
    for window in plan.unplug_windows:
        faulted = inject_unplug(faulted, window)
    unplugged = faulted.missing_count - missing_before

    after_unplug = faulted.missing_count
    faulted = inject_dropouts(faulted, plan.dropout_rate, plan.seed)
    dropped = faulted.missing_count - after_unplug

    readings, positions = _corrupt(faulted, plan.corruption_rate, plan.seed, spike_threshold, stream=1)
    corrupted_values = readings.v[readings.v < 0]
    negative = int(corrupted_values.size)
    spike = len(positions) - negative

    expected = faulted.values.copy()
    expected[positions] = np.nan
    log = FaultLog(unplugged, dropped, negative, spike, tuple(int(p) for p in positions))
    logger.info(
        f"Fault plan (seed {plan.seed}): unplugged {unplugged}, dropped {dropped}, "
        f"corrupted {log.corrupted} hour(s)"
    )
    return FaultResult(readings, faulted.with_values(expected), log)
