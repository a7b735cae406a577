"""
Configuration management for the composite membrane package.
"""

from .settings import Settings, get_settings, update_settings
from .run_config import RunConfig, load_run_config

__all__ = ["Settings", "get_settings", "update_settings", "RunConfig", "load_run_config"]
