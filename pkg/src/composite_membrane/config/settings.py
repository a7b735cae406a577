"""
Process-wide numerical defaults and output settings.
"""

import os
from pathlib import Path
from typing import Optional, Dict, Any
from dataclasses import dataclass, field

from dotenv import load_dotenv


@dataclass
class Settings:
    """Application settings and numerical defaults."""

    # Directories
    output_dir: Path = field(default_factory=lambda: Path("./membrane_output"))

    # Geometry
    subsamples: int = 4
    disk_subsamples: int = 16
    n_theta: int = 256
    interp_order: int = 3

    # Spectral / optimizer
    eigen_tol: float = 1e-9
    eigen_max_iter: int = 2000
    cg_max_iter: int = 20000
    optimizer_tol: float = 1e-8
    max_iter: int = 200
    damping: float = 0.0

    # Free boundary
    gamma: float = 0.5
    tol_W: float = 1e-2
    tau: float = 1e-3
    band_cells: int = 10
    blowup_grid: int = 65

    # Execution
    threads: int = 1

    # Logging
    log_level: str = "INFO"
    log_file: Optional[Path] = None

    def __post_init__(self):
        """Apply environment overrides."""
        load_dotenv()
        self.log_level = os.getenv("MEMBRANE_LOG_LEVEL", self.log_level)
        if os.getenv("MEMBRANE_OUTPUT_DIR"):
            self.output_dir = Path(os.environ["MEMBRANE_OUTPUT_DIR"])
        if os.getenv("MEMBRANE_LOG_FILE"):
            self.log_file = Path(os.environ["MEMBRANE_LOG_FILE"])
        if os.getenv("MEMBRANE_THREADS"):
            self.threads = max(1, int(os.environ["MEMBRANE_THREADS"]))

    def to_dict(self) -> Dict[str, Any]:
        """Convert settings to dictionary."""
        return {
            "output_dir": str(self.output_dir),
            "subsamples": self.subsamples,
            "disk_subsamples": self.disk_subsamples,
            "n_theta": self.n_theta,
            "interp_order": self.interp_order,
            "eigen_tol": self.eigen_tol,
            "eigen_max_iter": self.eigen_max_iter,
            "cg_max_iter": self.cg_max_iter,
            "optimizer_tol": self.optimizer_tol,
            "max_iter": self.max_iter,
            "damping": self.damping,
            "gamma": self.gamma,
            "tol_W": self.tol_W,
            "tau": self.tau,
            "band_cells": self.band_cells,
            "blowup_grid": self.blowup_grid,
            "threads": self.threads,
            "log_level": self.log_level,
            "log_file": str(self.log_file) if self.log_file else None,
        }


# Global settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get the global settings instance."""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def update_settings(**kwargs) -> None:
    """Update global settings with new values."""
    global _settings
    if _settings is None:
        _settings = Settings()

    for key, value in kwargs.items():
        if hasattr(_settings, key):
            setattr(_settings, key, value)
        else:
            raise ValueError(f"Unknown setting: {key}")
