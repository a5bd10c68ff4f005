"""Logging setup"""

import logging
import sys

from app.config.settings import settings


def configure_logging(level: str | None = None) -> None:
    """
    Route log records to standard error.

    Args:
        level: Level name; defaults to settings.LOG_LEVEL
    """
    logging.basicConfig(
        stream=sys.stderr,
        level=(level or settings.LOG_LEVEL).upper(),
        format="%(levelname)s [%(name)s] %(message)s",
        force=True,
    )
