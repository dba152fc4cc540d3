# Structured logging setup shared by the CLI and services.
"""structlog configuration.

Events are JSON lines on stderr so CSV and SVG output on stdout or disk stays
clean. Library modules only call ``structlog.get_logger()``; the CLI calls
:func:`configure_logging` once at start-up.
"""

from __future__ import annotations

import logging
import sys

import structlog

LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
}


def configure_logging(level: str | int = "info") -> None:
    numeric = LEVELS[level.lower()] if isinstance(level, str) else level
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.dict_tracebacks,
            structlog.processors.JSONRenderer(),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )
