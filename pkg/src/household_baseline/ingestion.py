"""
Parsing, validation and cleaning of raw meter and weather files.

File timestamps are UTC epoch seconds; nothing here interprets local time.
"""

import json
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, NamedTuple, Tuple, Union

import numpy as np
import pandas as pd

from .config import DEFAULT_SPIKE_THRESHOLD_KWH, MAX_TEMPERATURE_C, MIN_TEMPERATURE_C
from .errors import ParseError, ValidationError
from .timeseries import (
    MAX_TIMESTAMP,
    MeterKind,
    parse_number_column,
    parse_timestamp_column,
    read_text_csv,
    reading_columns,
)
from .utils import PathLike

logger = logging.getLogger(__name__)

ENERGY_COLUMN = "energy_kwh"
TEMPERATURE_COLUMN = "temp_c"


class ReadingFormat(str, Enum):
    CSV = "csv"
    JSON_LINES = "jsonl"


class RawReading(NamedTuple):
    t: int
    value: float


# =============================================================================
# Reading Batches
# =============================================================================


@dataclass(frozen=True, eq=False)
class ReadingBatch(Sequence):
    """
    Column-oriented, immutable list of RawReading.

    Behaves as a sequence of RawReading while keeping the timestamps and values
    in numpy arrays, so year-long minute data never becomes per-row objects.
    ``rejected`` counts rows dropped by range checks while parsing.
    """

    t: np.ndarray
    v: np.ndarray
    rejected: int = 0

    def __post_init__(self):
        t = np.array(self.t, dtype=np.int64)
        v = np.array(self.v, dtype=np.float64)
        if t.shape != v.shape or t.ndim != 1:
            raise ValidationError("timestamps and values must be equal-length 1-d arrays")
        if np.any(t < 0):
            raise ValidationError("timestamps must be non-negative")
        if not np.all(np.isfinite(v)):
            raise ValidationError("reading values must be finite")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return ReadingBatch(self.t[index], self.v[index])
        return RawReading(int(self.t[index]), float(self.v[index]))

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, ReadingBatch):
            return NotImplemented
        return np.array_equal(self.t, other.t) and np.array_equal(self.v, other.v)

    __hash__ = None

    @classmethod
    def from_readings(cls, readings: Iterable[Tuple[int, float]]) -> "ReadingBatch":
        t, v = reading_columns(readings)
        return cls(t, v)


ReadingsLike = Union[ReadingBatch, Sequence]


@dataclass(frozen=True)
class CleanReport:
    """What clean_readings kept and dropped."""

    input_count: int
    kept: int
    dropped_negative: int
    dropped_spike: int
    counter_resets: int
    duplicates: int

    def to_dict(self) -> Dict[str, int]:
        return {
            "input_count": self.input_count,
            "kept": self.kept,
            "dropped_negative": self.dropped_negative,
            "dropped_spike": self.dropped_spike,
            "counter_resets": self.counter_resets,
            "duplicates": self.duplicates,
        }


# =============================================================================
# File Parsing
# =============================================================================


def parse_readings_file(
    path: PathLike,
    format: ReadingFormat = ReadingFormat.CSV,
    value_column: str = ENERGY_COLUMN,
) -> ReadingBatch:
    """
    Parse a readings file, keeping file order.

    CSV files carry a ``timestamp,<value_column>`` header; JSON-lines files hold
    one ``{"t": <int>, "v": <number>}`` object per line.

    Args:
        path: File to read
        format: CSV or JSON_LINES
        value_column: CSV value header ('energy_kwh' or 'temp_c')

    Returns:
        ReadingBatch in file order

    Raises:
        ParseError: Malformed row, with its 1-based line number and field
        OSError: File missing or unreadable
    """
    path = Path(path)
    format = ReadingFormat(format)
    if format is ReadingFormat.CSV:
        batch = _parse_csv(path, value_column)
    else:
        batch = _parse_json_lines(path)
    logger.info(f"Parsed {len(batch)} readings from {path}")
    return batch


def _parse_csv(path: Path, value_column: str) -> ReadingBatch:
    frame = read_text_csv(path)
    expected = ["timestamp", value_column]
    if list(frame.columns) != expected:
        raise ParseError(f"expected header '{','.join(expected)}', found '{','.join(frame.columns)}'",
                         line=1, field="header", path=str(path))
    stamps = parse_timestamp_column(frame["timestamp"], path)
    values = parse_number_column(frame[value_column], path, value_column)
    return ReadingBatch(stamps, values)


def _parse_json_lines(path: Path) -> ReadingBatch:
    t, v = [], []
    with path.open("r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"invalid JSON: {e.msg}", line=line_number, field="json",
                                 path=str(path)) from e
            if not isinstance(record, dict):
                raise ParseError("expected a JSON object", line=line_number, path=str(path))
            stamp = record.get("t")
            if isinstance(stamp, bool) or not isinstance(stamp, int) or not 0 <= stamp <= MAX_TIMESTAMP:
                raise ParseError(f"not an integer in [0, {MAX_TIMESTAMP}]: {stamp!r}", line=line_number,
                                 field="t", path=str(path))
            value = record.get("v")
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ParseError(f"not a finite number: {value!r}", line=line_number,
                                 field="v", path=str(path))
            t.append(stamp)
            v.append(float(value))
    return ReadingBatch(np.array(t, dtype=np.int64), np.array(v, dtype=np.float64))


def parse_weather_file(
    path: PathLike,
    format: ReadingFormat = ReadingFormat.CSV,
) -> ReadingBatch:
    """
    Parse a temperature file (°C); out-of-range rows are dropped and counted.

    Returns:
        ReadingBatch whose ``rejected`` holds the number of rows outside
        [-60, 60] °C
    """
    batch = parse_readings_file(path, format, value_column=TEMPERATURE_COLUMN)
    in_range = (batch.v >= MIN_TEMPERATURE_C) & (batch.v <= MAX_TEMPERATURE_C)
    rejected = int((~in_range).sum())
    if rejected:
        logger.warning(f"Rejected {rejected} weather reading(s) outside "
                       f"[{MIN_TEMPERATURE_C}, {MAX_TEMPERATURE_C}] °C in {path}")
    return ReadingBatch(batch.t[in_range], batch.v[in_range], rejected=rejected)


def write_readings_file(
    path: PathLike,
    readings: ReadingsLike,
    format: ReadingFormat = ReadingFormat.CSV,
    value_column: str = ENERGY_COLUMN,
) -> Path:
    """Serialise readings in a format parse_readings_file reads back exactly."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    t, v = reading_columns(readings)
    if ReadingFormat(format) is ReadingFormat.CSV:
        pd.DataFrame({"timestamp": t, value_column: v}).to_csv(path, index=False, lineterminator="\n")
    else:
        with path.open("w", encoding="utf-8", newline="\n") as handle:
            for stamp, value in zip(t.tolist(), v.tolist()):
                handle.write(json.dumps({"t": stamp, "v": value}) + "\n")
    return path


# =============================================================================
# Cleaning
# =============================================================================


def clean_readings(
    rs: ReadingsLike,
    kind: MeterKind,
    spike_threshold: float = DEFAULT_SPIKE_THRESHOLD_KWH,
) -> Tuple[ReadingBatch, CleanReport]:
    """
    Drop corrupted readings and report what was removed.

    Readings are sorted by timestamp and deduplicated (last reading wins).
    Negative values are dropped; interval energies above ``spike_threshold``
    are dropped as spikes. For cumulative counters a decrease is counted as a
    counter reset and left in place: differences after it are taken from the
    new base when aggregating.

    Returns:
        (cleaned readings, CleanReport)
    """
    kind = MeterKind(kind)
    if spike_threshold <= 0:
        raise ValidationError(f"spike threshold must be positive, got {spike_threshold}")
    t, v = reading_columns(rs)
    input_count = len(t)

    order = np.argsort(t, kind="stable")
    t, v = t[order], v[order]
    last = np.ones(len(t), dtype=bool)
    last[:-1] = t[1:] != t[:-1]
    duplicates = int(len(t) - last.sum())
    t, v = t[last], v[last]

    negative = v < 0
    if kind is MeterKind.INTERVAL_KWH:
        spike = ~negative & (v > spike_threshold)
    else:
        spike = np.zeros(len(v), dtype=bool)
    keep = ~negative & ~spike
    t, v = t[keep], v[keep]
    resets = int(np.sum(np.diff(v) < 0)) if kind is MeterKind.CUMULATIVE_KWH else 0

    report = CleanReport(
        input_count=input_count,
        kept=len(t),
        dropped_negative=int(negative.sum()),
        dropped_spike=int(spike.sum()),
        counter_resets=resets,
        duplicates=duplicates,
    )
    if duplicates:
        logger.warning(f"Dropped {duplicates} duplicate timestamp(s), keeping the last reading")
    if resets:
        logger.warning(f"Detected {resets} counter reset(s)")
    logger.info(
        f"Cleaned {input_count} readings: kept {report.kept}, "
        f"negative {report.dropped_negative}, spikes {report.dropped_spike}"
    )
    return ReadingBatch(t, v), report
