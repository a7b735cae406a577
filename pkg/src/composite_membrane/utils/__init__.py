"""
Utility functions and helpers.
"""

from .logging import log_settings, setup_logging
from .file_utils import (
    ensure_directory,
    write_field_dump,
    read_field_dump,
    write_manifest,
    read_manifest,
    write_pgm,
)
from .data_utils import calculate_statistics, write_csv, read_csv

__all__ = [
    "setup_logging",
    "log_settings",
    "ensure_directory",
    "write_field_dump",
    "read_field_dump",
    "write_manifest",
    "read_manifest",
    "write_pgm",
    "calculate_statistics",
    "write_csv",
    "read_csv",
]
