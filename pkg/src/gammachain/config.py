"""
Configuration management for the XY-Gamma chain toolkit
"""

import os
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from dotenv import dotenv_values, load_dotenv

# Load environment variables from .env file
load_dotenv()


@dataclass
class Config:
    """Main configuration class"""

    # Output
    OUTPUT_DIR: str = "results"
    FLOAT_FORMAT: str = "%.17g"
    OUTPUT_FORMAT: str = "csv"

    # Fan-out cap for parameter sweeps (GAMMACHAIN_THREADS)
    THREADS: int = 1

    # Chain defaults used by the published figures
    DEFAULT_N: int = 2000
    DEFAULT_J: float = 1.0
    DEFAULT_GAMMA: float = 0.6
    DEFAULT_GAMMA_OFFDIAG: float = 0.6

    # Numerics
    GAP_GRID_POINTS: int = 2048
    FIT_WINDOW: Tuple[float, float] = (1e-4, 1e-2)
    FIT_POINTS: int = 15
    LARGE_N: int = 200000
    SWEEP_RESOLUTION: int = 400
    FD_STEP: float = 1e-3

    # Exact diagonalization
    ED_DENSE_MAX_SITES: int = 10
    ED_MAX_SITES: int = 12
    DEGENERACY_TOL: float = 1e-8

    # Scaling-fit size ladder
    SCALING_SIZES: Tuple[int, ...] = field(
        default_factory=lambda: tuple(range(200, 2001, 200))
    )

    @classmethod
    def from_env(cls) -> 'Config':
        """Load configuration from environment variables"""
        return cls(
            OUTPUT_DIR=os.getenv('GAMMACHAIN_OUTPUT_DIR', cls.OUTPUT_DIR),
            THREADS=max(1, int(os.getenv('GAMMACHAIN_THREADS', cls.THREADS))),
            GAP_GRID_POINTS=int(
                os.getenv('GAMMACHAIN_GAP_GRID_POINTS', cls.GAP_GRID_POINTS)
            ),
            LARGE_N=int(os.getenv('GAMMACHAIN_LARGE_N', cls.LARGE_N)),
        )

    def get_output_path(self, filename: str) -> str:
        """Get full path for an output file"""
        return os.path.join(self.OUTPUT_DIR, filename)


def load_run_file(path: str) -> Dict[str, Optional[str]]:
    """Read a flat key=value run file"""
    if not os.path.exists(path):
        raise FileNotFoundError(f"Config file not found: {path}")
    return dict(dotenv_values(path))
