#!/usr/bin/env python3
"""
Entry points for the household baseline MCP server.

The server exposes slot lookup, series inspection, baseline building and
savings calculation as MCP tools over stdio.
"""

import logging
import os
import sys

from .server import mcp as configured_server

logger = logging.getLogger("household_baseline")


# =============================================================================
# Entry Points
# =============================================================================

def main() -> None:
    """Production entry point (`household-baseline-mcp`)."""
    try:
        configured_server.run()
    except KeyboardInterrupt:
        logger.info("Server interrupted by user")
        sys.exit(0)
    except Exception as e:
        logger.error(f"Server failed to start: {e}")
        sys.exit(1)


def dev_main() -> None:
    """Development entry point with DEBUG logging defaults."""
    os.environ.setdefault("ENVIRONMENT", "development")
    os.environ.setdefault("LOG_LEVEL", "DEBUG")
    main()


if __name__ == "__main__":
    main()
