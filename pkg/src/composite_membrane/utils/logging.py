"""
Logging configuration and utilities.
"""

import logging
import sys
from pathlib import Path
from typing import Optional

from rich.logging import RichHandler

from ..config import get_settings

FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
QUIET_LOGGERS = ("PIL",)

logger = logging.getLogger(__name__)


def setup_logging(
    level: Optional[str] = None,
    log_file: Optional[Path] = None,
    format_string: Optional[str] = None,
    rich_console: Optional[bool] = None,
) -> None:
    """
    Configure the root logger for a run.

    The console handler is a rich handler on a terminal and a plain stream
    handler otherwise (pipes, CI logs). The optional file handler always uses
    the plain format so log files stay greppable.
    """
    settings = get_settings()

    log_level = (level or settings.log_level).upper()
    log_file_path = log_file or settings.log_file
    if rich_console is None:
        rich_console = sys.stdout.isatty()

    logging.basicConfig(
        level=getattr(logging, log_level),
        handlers=_get_handlers(
            Path(log_file_path) if log_file_path is not None else None,
            format_string or FILE_FORMAT,
            rich_console,
        ),
        force=True,
    )

    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)


def _get_handlers(log_file: Optional[Path], format_string: str, rich_console: bool) -> list:
    formatter = logging.Formatter(format_string)
    if rich_console:
        console = RichHandler(show_path=False, rich_tracebacks=False)
    else:
        console = logging.StreamHandler(sys.stdout)
        console.setFormatter(formatter)
    handlers = [console]

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)

    return handlers


def log_settings(command: str) -> None:
    """Record the effective numerical settings of a command at DEBUG."""
    values = get_settings().to_dict()
    listing = ", ".join(f"{key}={values[key]}" for key in sorted(values))
    logger.debug("%s settings: %s", command, listing)
