import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Union
from zoneinfo import ZoneInfo, ZoneInfoNotFoundError

from .errors import ConfigurationError, SchemaError

PathLike = Union[str, Path]

# =============================================================================
# Utility Functions
# =============================================================================

def configure_logging(level: str = "INFO") -> None:
    """
    Configure root logging for an entry point.

    Records go to stderr: stdout is reserved for result lines (CLI) and for
    the MCP stdio transport (server).
    """
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )


def resolve_zone(name: str) -> ZoneInfo:
    """
    Resolve an IANA time zone name.

    Args:
        name: Zone name (e.g. 'Europe/Athens')

    Returns:
        The ZoneInfo for that name

    Raises:
        ConfigurationError: If the name is not a known IANA zone
    """
    if not isinstance(name, str) or not name:
        raise ConfigurationError(f"time zone must be a non-empty IANA name, got {name!r}")
    try:
        return ZoneInfo(name)
    except (ZoneInfoNotFoundError, ValueError) as e:
        raise ConfigurationError(f"unknown time zone {name!r}") from e


def read_json(path: PathLike) -> Any:
    """Read a UTF-8 JSON document, turning decode failures into SchemaError."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e


def write_json(path: PathLike, document: Any) -> Path:
    """Write a JSON document with stable formatting; returns the path written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    return path


def json_number(value: float) -> Any:
    """Map non-finite floats to None so documents stay valid JSON."""
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def format_kwh(value: float) -> str:
    """Format an energy value for result lines and summaries."""
    return f"{value:.6f}"
