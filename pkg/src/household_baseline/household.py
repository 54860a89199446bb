"""
Per-household configuration, loaded from a JSON document.

Example document::

    {
      "user_id": "u-0042",
      "timezone": "Europe/Athens",
      "country": "EL",
      "factor_mode": "ratio",
      "layout_mode": "paper_literal",
      "spike_threshold": 100.0,
      "completeness_threshold": 0.95,
      "seed": 7
    }
"""

import logging
import math
import re
from dataclasses import asdict, dataclass, fields
from enum import Enum
from typing import Any, Dict, Optional

from .baseline import MAX_SEED, FactorMode, LayoutMode
from .config import DEFAULT_COMPLETENESS_THRESHOLD, DEFAULT_SPIKE_THRESHOLD_KWH
from .errors import ConfigurationError, SchemaError
from .utils import PathLike, read_json, resolve_zone, write_json

logger = logging.getLogger(__name__)

_COUNTRY_CODE = re.compile(r"[A-Z]{2}")


class TemperatureSource(str, Enum):
    OUTDOOR = "outdoor"
    INDOOR = "indoor"


@dataclass(frozen=True)
class HouseholdConfig:
    user_id: str
    timezone: str = "UTC"
    country: str = "EL"
    factor_mode: FactorMode = FactorMode.RATIO
    layout_mode: LayoutMode = LayoutMode.PAPER_LITERAL
    spike_threshold: float = DEFAULT_SPIKE_THRESHOLD_KWH
    completeness_threshold: float = DEFAULT_COMPLETENESS_THRESHOLD
    seed: Optional[int] = None
    baseline_year: Optional[int] = None
    temperature_source: TemperatureSource = TemperatureSource.OUTDOOR

    def __post_init__(self):
        if not isinstance(self.user_id, str) or not self.user_id:
            raise ConfigurationError("user_id must be a non-empty string")
        resolve_zone(self.timezone)
        if not isinstance(self.country, str) or not _COUNTRY_CODE.fullmatch(self.country):
            raise ConfigurationError(f"country must be an ISO 3166-1 alpha-2 code, got {self.country!r}")
        for name, enum in (("factor_mode", FactorMode), ("layout_mode", LayoutMode),
                           ("temperature_source", TemperatureSource)):
            try:
                object.__setattr__(self, name, enum(getattr(self, name)))
            except ValueError:
                choices = ", ".join(m.value for m in enum)
                raise ConfigurationError(
                    f"{name} must be one of {choices}, got {getattr(self, name)!r}"
                ) from None
        if not _is_number(self.spike_threshold) or self.spike_threshold <= 0:
            raise ConfigurationError(f"spike_threshold must be positive, got {self.spike_threshold!r}")
        if not _is_number(self.completeness_threshold) or not 0 < self.completeness_threshold <= 1:
            raise ConfigurationError(
                f"completeness_threshold must be in (0, 1], got {self.completeness_threshold!r}"
            )
        if self.seed is not None and (
            isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED
        ):
            raise ConfigurationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.baseline_year is not None and (
            isinstance(self.baseline_year, bool) or not isinstance(self.baseline_year, int)
            or not 1970 <= self.baseline_year <= 9999
        ):
            raise ConfigurationError(f"baseline_year must be a calendar year, got {self.baseline_year!r}")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, Enum):
                data[key] = value.value
        return data

    @classmethod
    def from_dict(cls, data: Any) -> "HouseholdConfig":
        if not isinstance(data, dict):
            raise SchemaError("household config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise SchemaError(f"unknown household config key(s): {', '.join(sorted(unknown))}")
        if "user_id" not in data:
            raise SchemaError("household config is missing 'user_id'")
        return cls(**data)


def _is_number(value: Any) -> bool:
    return not isinstance(value, bool) and isinstance(value, (int, float)) and math.isfinite(value)


def load_household_config(path: PathLike) -> HouseholdConfig:
    config = HouseholdConfig.from_dict(read_json(path))
    logger.info(f"Loaded config for household {config.user_id} ({config.timezone}, {config.country})")
    return config


def save_household_config(config: HouseholdConfig, path: PathLike) -> None:
    write_json(path, config.to_dict())
