"""Logging utilities for isoforms.

Results go to stdout as JSON; everything the library reports about its own work (search
sizes, borderline candidates, truncated trajectories) goes through the ``isoforms`` logger.
"""

import logging
import sys
from typing import TextIO

LOGGER_NAME = "isoforms"


def setup_logging(level: int = logging.WARNING, stream: TextIO = sys.stderr) -> logging.Logger:
    """
    Configure isoforms logging on a single stream handler.

    Args:
        level: The minimum logging level to display (default: WARNING)
        stream: The stream to write logs to (default: sys.stderr)

    Returns:
        The configured logger instance
    """
    root_logger = logging.getLogger()
    root_logger.setLevel(level)

    # Remove existing handlers to prevent duplication
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    handler = logging.StreamHandler(stream)
    formatter = logging.Formatter("%(levelname)s - %(name)s - %(message)s")
    handler.setFormatter(formatter)
    root_logger.addHandler(handler)

    logging.getLogger(LOGGER_NAME).setLevel(level)
    # matplotlib is chatty at INFO (font cache, backend selection)
    logging.getLogger("matplotlib").setLevel(max(level, logging.WARNING))

    return logging.getLogger(LOGGER_NAME)
