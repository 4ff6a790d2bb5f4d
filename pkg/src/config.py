"""
ZakFrame Configuration Module
Handles configuration settings, numerical defaults and environment variables.
"""

import os
from typing import Dict, Any
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

_PACKAGE_DIR = os.path.dirname(os.path.abspath(__file__))
_PROJECT_DIR = os.path.dirname(_PACKAGE_DIR)


class Config:
    """Configuration class for ZakFrame."""

    # Runtime Configuration
    LOG_LEVEL = os.getenv('ZAKFRAME_LOG_LEVEL', 'INFO')

    # File Paths
    DATA_DIR = os.path.join(_PROJECT_DIR, "data")
    OUTPUT_DIR = os.getenv('ZAKFRAME_OUTPUT_DIR', "results")
    PRESETS_FILE = os.path.join(DATA_DIR, "figure_presets.json")

    # Precision Settings
    PRECISION_TIERS = (53, 106, 212)
    DEFAULT_PRECISION = 212
    DEFAULT_TOLERANCES = {53: 1e-12, 106: 1e-22, 212: 1e-30}
    CERTIFICATION_PRECISION = 106
    CERTIFICATION_TOLERANCE = 1e-25

    # Zak Transform Settings
    DEFAULT_ZAK_TOL = 1e-14
    MAX_HERMITE_ORDER = 64
    MAX_TRUNCATION_INDEX = 1 << 16

    # Frame Scan Settings
    DEFAULT_GRID = 51
    DEFAULT_SAMPLES = 200
    PROBE_LATTICE = 12
    DENSITY_TOLERANCE = 1e-12
    DROP_THRESHOLD = 1e-12
    NEAR_DROP_GRID = 400
    REFINE_STARTS = 4
    REFINE_LEVELS = 28
    REFINE_POINTS = 21

    # Identity Catalog Settings
    CATALOG_M_VALUES = (0, 1, 2)
    CATALOG_CLASS_WINDOWS = 10
    CATALOG_SEED = 20160404

    # Output Settings
    CSV_COLUMNS = ["b", "a", "sqrtA", "sqrtB", "argmin_x", "argmin_gamma", "max_trunc"]


def get_config() -> Dict[str, Any]:
    """Return configuration as dictionary."""
    return {
        'threads': resolve_threads(),
        'log_level': Config.LOG_LEVEL,
        'data_dir': Config.DATA_DIR,
        'output_dir': Config.OUTPUT_DIR,
        'presets_file': Config.PRESETS_FILE,
        'precision_tiers': Config.PRECISION_TIERS,
        'default_grid': Config.DEFAULT_GRID,
    }


def resolve_threads(requested: int = None) -> int:
    """
    Resolve the worker count for parallel evaluation

    Args:
        requested: Explicit thread count; falls back to ZAKFRAME_THREADS

    Returns:
        Positive number of worker threads (0 means one per CPU)
    """
    if requested is None:
        try:
            requested = int(os.getenv('ZAKFRAME_THREADS', '0'))
        except ValueError:
            requested = 0
    if requested <= 0:
        return os.cpu_count() or 1
    return requested


def validate_config() -> bool:
    """Validate that the configuration is usable."""
    try:
        int(os.getenv('ZAKFRAME_THREADS', '0'))
    except ValueError:
        return False
    if not os.path.exists(Config.PRESETS_FILE):
        return False
    return True
