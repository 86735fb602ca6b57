"""Logging configuration for pegcluster."""

import logging
import sys
import threading
from pathlib import Path

LOGGER_NAME = "pegcluster"

_setup_lock = threading.Lock()

_DETAILED_FORMAT = (
    "%(asctime)s - %(name)s - %(levelname)s - [%(module)s:%(lineno)d] - %(message)s"
)
_CONSOLE_FORMAT = "%(levelname)s: %(message)s"


def _level_from_name(name: str) -> int:
    """Numeric level for ``name``; WARNING when unknown."""
    level = logging.getLevelNamesMapping().get(name.upper())
    return level if level is not None else logging.WARNING


def _file_handler(log_file: str) -> logging.FileHandler:
    """DEBUG-level file handler, creating missing directories."""
    path = Path(log_file)
    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path, mode="a", encoding="utf-8")
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(logging.Formatter(_DETAILED_FORMAT, "%Y-%m-%d %H:%M:%S"))
    return handler


def setup_logging(
    log_level: str = "WARNING", log_file: str | None = None
) -> logging.Logger:
    """
    Attach handlers to the ``pegcluster`` logger once per process.

    Console records go to standard error so that trees, traces and
    benchmark tables on standard output stay machine readable. A log file,
    when given, receives every record down to DEBUG.

    Args:
        log_level: Console level name; unknown names mean WARNING
        log_file: Optional path of a file to append detailed records to

    Returns:
        The ``pegcluster`` logger
    """
    logger = logging.getLogger(LOGGER_NAME)
    with _setup_lock:
        if logger.handlers:
            return logger

        console_level = _level_from_name(log_level)
        logger.setLevel(logging.DEBUG if log_file else console_level)

        console = logging.StreamHandler(sys.stderr)
        console.setLevel(console_level)
        console.setFormatter(logging.Formatter(_CONSOLE_FORMAT))
        logger.addHandler(console)

        if log_file:
            try:
                logger.addHandler(_file_handler(log_file))
            except OSError as exc:
                logger.warning("Could not open log file %s: %s", log_file, exc)
            else:
                logger.debug("Logging to file: %s", log_file)
    return logger
