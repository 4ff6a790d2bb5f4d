"""
Utility functions for ZakFrame: parsing helpers and result exporters
"""

import json
import logging
import os
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, TextIO, Tuple

import numpy as np
import pandas as pd

from src.config import Config
from src.exceptions import ScanParameterError, WindowSpecError

# Setup logging
logger = logging.getLogger(__name__)


def parse_fraction(text: str) -> Fraction:
    """
    Parse an exact rational coordinate

    Args:
        text: Integer, ``p/q`` or a terminating decimal such as ``0.25``

    Returns:
        Fraction with the exact value
    """
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise WindowSpecError(f"Cannot parse rational value '{text}'") from e


def parse_point(text: str) -> Tuple[Fraction, Fraction]:
    """Parse ``x,gamma`` into a pair of Fractions."""
    parts = str(text).split(',')
    if len(parts) != 2:
        raise WindowSpecError(f"Expected a point 'x,gamma', got '{text}'")
    return parse_fraction(parts[0]), parse_fraction(parts[1])


def log_spaced(start: float, stop: float, count: int) -> np.ndarray:
    """
    Logarithmically spaced samples from start to stop inclusive

    Sample i and sample count-1-i multiply to start*stop, so a range
    symmetric about sqrt(start*stop) on a log axis is sampled symmetrically.
    """
    if not 0 < start < stop:
        raise ScanParameterError(f"Need 0 < start < stop, got {start}, {stop}")
    if count < 2:
        raise ScanParameterError(f"Need at least two samples, got {count}")
    exponents = np.linspace(0.0, 1.0, count)
    samples = start * (stop / start) ** exponents
    samples[0], samples[-1] = start, stop
    return samples


def ensure_parent_dir(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def export_scan_csv(records: List[Dict[str, Any]], output_path: str) -> str:
    """
    Write scan rows as CSV

    Args:
        records: Rows keyed by Config.CSV_COLUMNS
        output_path: CSV file path

    Returns:
        Path to the written file
    """
    try:
        ensure_parent_dir(output_path)
        df = pd.DataFrame(records, columns=Config.CSV_COLUMNS)
        df.to_csv(output_path, index=False)
        logger.info(f"Wrote {len(df)} scan rows to {output_path}")
        return output_path
    except OSError as e:
        logger.error(f"Error writing scan CSV {output_path}: {str(e)}")
        raise


def write_gnuplot_script(csv_path: str, script_path: str, title: str = "") -> str:
    """
    Write a gnuplot script plotting sqrt(A) and sqrt(B) against b on a log-x axis

    Args:
        csv_path: CSV produced by export_scan_csv
        script_path: Script file path
        title: Plot title

    Returns:
        Path to the written script
    """
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set logscale x",
        "set xlabel 'b'",
        "set ylabel 'frame bound'",
    ]
    if title:
        lines.append(f"set title '{title}'")
    lines.append(
        f"plot '{csv_path}' using 1:3 with lines title 'sqrt(A)', "
        f"'' using 1:4 with lines title 'sqrt(B)'")
    try:
        ensure_parent_dir(script_path)
        with open(script_path, 'w') as f:
            f.write('\n'.join(lines) + '\n')
        logger.info(f"Wrote gnuplot script {script_path}")
        return script_path
    except OSError as e:
        logger.error(f"Error writing gnuplot script {script_path}: {str(e)}")
        raise


def plot_scan(records: List[Dict[str, Any]], output_path: str, title: str = "") -> str:
    """
    Render a scan as PNG with matplotlib

    Args:
        records: Scan rows
        output_path: PNG file path
        title: Plot title

    Returns:
        Path to the written image
    """
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    df = pd.DataFrame(records, columns=Config.CSV_COLUMNS)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(df['b'], df['sqrtB'], color='tab:red', label='sqrt(B)')
    ax.plot(df['b'], df['sqrtA'], color='tab:blue', label='sqrt(A)')
    ax.set_xscale('log')
    ax.set_xlabel('b')
    ax.set_ylabel('frame bound')
    if title:
        ax.set_title(title)
    ax.legend()
    try:
        ensure_parent_dir(output_path)
        fig.savefig(output_path, dpi=150, bbox_inches='tight')
        logger.info(f"Saved scan plot to {output_path}")
    finally:
        plt.close(fig)
    return output_path


def write_json_lines(objects: Iterable[Dict[str, Any]], stream: TextIO) -> int:
    """Write one JSON object per line; returns the number of lines."""
    count = 0
    for obj in objects:
        stream.write(json.dumps(obj, sort_keys=False) + '\n')
        count += 1
    return count


def load_presets(path: Optional[str] = None) -> Dict[str, Any]:
    """Load the figure presets JSON file."""
    path = path or Config.PRESETS_FILE
    with open(path, 'r') as f:
        return json.load(f)
