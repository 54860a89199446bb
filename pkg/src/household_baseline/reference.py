"""
Country-level monthly reference consumption profiles.

A profile holds twelve per-household monthly kWh values (January first), such
as the household electricity statistics published by a national or European
statistics office. Values are per household: any per-capita or national-total
normalisation must be done when the file is authored.
"""

import logging
import math
import re
from dataclasses import dataclass
from importlib import resources
from typing import Any, Dict, Tuple

from .errors import SchemaError, ValidationError
from .utils import PathLike, read_json, write_json

logger = logging.getLogger(__name__)

MONTH_NAMES = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
               "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")

# ISO 3166-1 alpha-2, plus the statistics-office conventions EL (Greece) and UK
_COUNTRY_CODE = re.compile(r"[A-Z]{2}")


@dataclass(frozen=True)
class ReferenceProfile:
    country: str
    monthly_kwh: Tuple[float, ...]
    source_label: str = ""

    def __post_init__(self):
        if not isinstance(self.country, str) or not _COUNTRY_CODE.fullmatch(self.country):
            raise ValidationError(
                f"country must be a two-letter upper-case ISO 3166-1 code, got {self.country!r}"
            )
        values = tuple(self.monthly_kwh)
        if len(values) != 12:
            raise SchemaError(f"expected 12 monthly values, found {len(values)}")
        for month, value in zip(MONTH_NAMES, values):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"{month}: monthly value must be a number, got {value!r}")
            if not math.isfinite(value) or value <= 0:
                raise ValidationError(f"{month}: monthly value must be finite and > 0, got {value}")
        object.__setattr__(self, "monthly_kwh", tuple(float(v) for v in values))

    def __getitem__(self, month: int) -> float:
        """Reference kWh for a 1-based month."""
        return self.monthly_kwh[month - 1]

    @property
    def annual_kwh(self) -> float:
        return math.fsum(self.monthly_kwh)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "country": self.country,
            "source": self.source_label,
            "monthly_kwh": list(self.monthly_kwh),
        }

    @classmethod
    def from_dict(cls, data: Any) -> "ReferenceProfile":
        if not isinstance(data, dict):
            raise SchemaError("reference profile must be a JSON object")
        missing = [key for key in ("country", "monthly_kwh") if key not in data]
        if missing:
            raise SchemaError(f"reference profile is missing key(s): {', '.join(missing)}")
        if not isinstance(data["monthly_kwh"], list):
            raise SchemaError("'monthly_kwh' must be a list of 12 numbers")
        return cls(
            country=data["country"],
            monthly_kwh=tuple(data["monthly_kwh"]),
            source_label=str(data.get("source", "")),
        )


def load_reference_profile(path: PathLike) -> ReferenceProfile:
    """
    Load and validate a reference profile JSON document.

    Raises:
        SchemaError: Not exactly 12 values, or missing keys
        ValidationError: A value is not > 0, or a bad country code
    """
    profile = ReferenceProfile.from_dict(read_json(path))
    logger.info(
        f"Loaded reference profile for {profile.country} "
        f"({profile.annual_kwh:.1f} kWh/year) from {path}"
    )
    return profile


def save_reference_profile(profile: ReferenceProfile, path: PathLike) -> None:
    write_json(path, profile.to_dict())


def load_bundled_reference(country: str = "EL") -> ReferenceProfile:
    """Load a reference profile shipped with the package (synthetic data)."""
    name = f"reference_{country.lower()}_synthetic.json"
    try:
        source = resources.files("household_baseline").joinpath("data").joinpath(name)
        with resources.as_file(source) as path:
            return load_reference_profile(path)
    except FileNotFoundError:
        raise ValidationError(f"no bundled reference profile for {country!r}") from None
