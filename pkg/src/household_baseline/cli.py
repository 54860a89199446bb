"""
Command-line interface: ``household-baseline <command> ...``.

Each command prints exactly one result line on stdout; logs and diagnostics go
to stderr. Exit codes: 0 success, 2 input error, 3 insufficient data,
4 temperature adjustment undefined, 1 unexpected failure.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

import pandas as pd

from .config import SAVINGS_REPORT_FILE, get_runtime_settings
from .errors import AdjustmentUndefinedError, BaselineError
from .household import load_household_config
from .pipeline import (
    load_config_or_default,
    run_batch,
    run_build_baseline,
    run_faultsim,
    run_ingest,
    run_savings,
)
from .timeseries import MeterKind
from .utils import configure_logging, format_kwh

logger = logging.getLogger(__name__)


def _instant(text: str) -> int:
    """Epoch seconds, or an ISO 8601 timestamp with a UTC offset."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        stamp = pd.Timestamp(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not an epoch second or ISO timestamp: {text!r}") from e
    if stamp.tzinfo is None:
        raise argparse.ArgumentTypeError(f"ISO timestamp needs a UTC offset: {text!r}")
    return int(stamp.timestamp())


# =============================================================================
# Commands
# =============================================================================


def cmd_ingest(args: argparse.Namespace) -> int:
    config = load_household_config(args.config)
    result = run_ingest(args.readings, MeterKind(args.kind), config, args.out)
    print(result.series_path)
    return 0


def cmd_build_baseline(args: argparse.Namespace) -> int:
    config = load_household_config(args.config)
    result = run_build_baseline(
        args.series, args.reference, config, args.out,
        stochastic=args.stochastic, seed=args.seed,
    )
    print(format_kwh(result.annual_kwh))
    return 0


def cmd_savings(args: argparse.Namespace) -> int:
    config = load_household_config(args.config)
    start, end = args.window
    report = run_savings(
        args.baseline, args.observed, args.weather_obs, args.weather_base,
        start, end, config, args.out,
        adjust=not args.no_temp_adjust,
        plot_path=args.emit_plot_data,
    )
    print(format_kwh(report.S))
    return 0


def cmd_faultsim(args: argparse.Namespace) -> int:
    config = load_config_or_default(args.config, args.timezone)
    run_faultsim(args.series, args.plan, args.out, config)
    print(args.out)
    return 0


def cmd_batch(args: argparse.Namespace) -> int:
    result = run_batch(args.manifest, args.jobs)
    print(json.dumps(result.annual_kwh, sort_keys=True))
    return 0


# =============================================================================
# Parser
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="household-baseline",
        description="Hourly household consumption baselines and temperature-adjusted savings.",
    )
    parser.add_argument("--log-level", default=None,
                        help="Logging level (default: LOG_LEVEL env var or INFO)")
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="Clean and aggregate raw meter readings")
    ingest.add_argument("--readings", required=True, help="Meter readings file (CSV or .jsonl)")
    ingest.add_argument("--kind", required=True, choices=[k.value for k in MeterKind])
    ingest.add_argument("--config", required=True, help="Household config JSON")
    ingest.add_argument("--out", required=True, help="Output directory")
    ingest.set_defaults(handler=cmd_ingest)

    build = sub.add_parser("build-baseline", help="Synthesise a year-long hourly baseline")
    build.add_argument("--series", required=True, help="Hourly series CSV from 'ingest'")
    build.add_argument("--reference", default=None,
                       help="Reference profile JSON (default: bundled profile for the config country)")
    build.add_argument("--config", required=True, help="Household config JSON")
    build.add_argument("--out", required=True, help="Output directory")
    build.add_argument("--stochastic", action="store_true", help="Resample observed slot values")
    build.add_argument("--seed", type=int, default=None, help="Seed for --stochastic")
    build.set_defaults(handler=cmd_build_baseline)

    savings = sub.add_parser("savings", help="Compute savings over a comparison window")
    savings.add_argument("--baseline", required=True, help="Baseline CSV from 'build-baseline'")
    savings.add_argument("--observed", required=True, help="Observed hourly series CSV")
    savings.add_argument("--weather-obs", required=True, help="Temperatures during the window")
    savings.add_argument("--weather-base", required=True, help="Baseline-equivalent temperatures")
    savings.add_argument("--window", required=True, nargs=2, type=_instant, metavar=("START", "END"),
                         help="Half-open window [START, END), epoch seconds or ISO 8601")
    savings.add_argument("--config", required=True, help="Household config JSON")
    savings.add_argument("--out", default=SAVINGS_REPORT_FILE, help="Report JSON path")
    savings.add_argument("--no-temp-adjust", action="store_true",
                         help="Compare unadjusted observed consumption")
    savings.add_argument("--emit-plot-data", default=None, metavar="PATH",
                         help="Write timestamp,baseline,observed,adjusted rows for plotting")
    savings.set_defaults(handler=cmd_savings)

    faultsim = sub.add_parser("faultsim", help="Inject gateway faults into a series")
    faultsim.add_argument("--series", required=True, help="Hourly series CSV")
    faultsim.add_argument("--plan", required=True, help="Fault plan JSON")
    faultsim.add_argument("--out", required=True, help="Output readings CSV")
    faultsim.add_argument("--config", default=None, help="Household config JSON (for zone and spike threshold)")
    faultsim.add_argument("--timezone", default=None, help="Series zone when no config is given (default UTC)")
    faultsim.set_defaults(handler=cmd_faultsim)

    batch = sub.add_parser("batch", help="Build baselines for many households")
    batch.add_argument("--manifest", required=True, help="Batch manifest JSON")
    batch.add_argument("--jobs", type=int, default=1, help="Parallel workers (default 1)")
    batch.set_defaults(handler=cmd_batch)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point for the ``household-baseline`` command."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level or get_runtime_settings().log_level)

    try:
        return args.handler(args)
    except AdjustmentUndefinedError as e:
        print(f"error: {e} (rerun with --no-temp-adjust)", file=sys.stderr)
        return e.exit_code
    except BaselineError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.exception(f"Unexpected failure in '{args.command}': {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
