"""
Basic tests for ZakFrame configuration and helpers
"""

import importlib
import io
import json
import os
from fractions import Fraction
from unittest.mock import patch

import numpy as np
import pandas as pd
import pytest

from src.config import Config, get_config, resolve_threads, validate_config
from src.exceptions import ScanParameterError, WindowSpecError, ZakFrameError
from src.utils import (
    export_scan_csv, load_presets, log_spaced, parse_fraction, parse_point,
    write_gnuplot_script, write_json_lines,
)


class TestConfig:
    """Test configuration module."""

    def test_config_initialization(self):
        """Test Config class defaults."""
        config = Config()
        assert config.PRECISION_TIERS == (53, 106, 212)
        assert config.DEFAULT_PRECISION == 212
        assert config.DEFAULT_GRID == 51
        assert config.CATALOG_SEED == 20160404
        assert config.CSV_COLUMNS[:4] == ["b", "a", "sqrtA", "sqrtB"]

    def test_tolerances_cover_every_tier(self):
        assert set(Config.DEFAULT_TOLERANCES) == set(Config.PRECISION_TIERS)

    def test_get_config(self):
        config = get_config()
        assert config['threads'] >= 1
        assert config['presets_file'].endswith('figure_presets.json')

    def test_resolve_threads_explicit(self):
        assert resolve_threads(3) == 3

    def test_resolve_threads_from_environment(self):
        with patch.dict(os.environ, {'ZAKFRAME_THREADS': '5'}):
            assert resolve_threads() == 5

    def test_resolve_threads_auto(self):
        with patch.dict(os.environ, {'ZAKFRAME_THREADS': '0'}):
            assert resolve_threads() == (os.cpu_count() or 1)

    def test_validate_config_with_bad_threads(self):
        """Test configuration validation with a malformed thread count."""
        with patch.dict(os.environ, {'ZAKFRAME_THREADS': 'many'}):
            assert validate_config() == False

    def test_validate_config_with_defaults(self):
        with patch.dict(os.environ, {'ZAKFRAME_THREADS': '2'}):
            assert validate_config() == True


class TestParsing:
    """Test rational parsing helpers."""

    def test_parse_fraction(self):
        assert parse_fraction('0.25') == Fraction(1, 4)
        assert parse_fraction('5/6') == Fraction(5, 6)
        assert parse_fraction('-1') == Fraction(-1)

    def test_parse_fraction_rejects_garbage(self):
        with pytest.raises(WindowSpecError):
            parse_fraction('a quarter')
        with pytest.raises(WindowSpecError):
            parse_fraction('1/0')

    def test_parse_point(self):
        assert parse_point('3/4,1/2') == (Fraction(3, 4), Fraction(1, 2))
        with pytest.raises(WindowSpecError):
            parse_point('1,2,3')


class TestLogSpacing:
    """Test log-spaced sampling."""

    def test_endpoints_are_exact(self):
        samples = log_spaced(0.125, 4.0, 200)
        assert samples[0] == 0.125
        assert samples[-1] == 4.0
        assert len(samples) == 200
        assert np.all(np.diff(samples) > 0)

    def test_symmetric_about_geometric_mean(self):
        samples = log_spaced(0.125, 4.0, 51)
        products = samples * samples[::-1]
        np.testing.assert_allclose(products, 0.5, rtol=1e-12)

    def test_rejects_bad_range(self):
        with pytest.raises(ScanParameterError):
            log_spaced(2.0, 1.0, 10)
        with pytest.raises(ScanParameterError):
            log_spaced(1.0, 2.0, 1)

    def test_range_errors_are_library_errors(self):
        with pytest.raises(ZakFrameError):
            log_spaced(0.0, 1.0, 10)


class TestExporters:
    """Test CSV, gnuplot and JSON-lines output."""

    def test_export_scan_csv(self, tmp_path):
        record = dict(zip(Config.CSV_COLUMNS, [1.0, 0.5, 0.2, 1.4, 0.25, 0.5, 1e-15]))
        path = export_scan_csv([record, record], str(tmp_path / 'out' / 'scan.csv'))
        df = pd.read_csv(path)
        assert list(df.columns) == Config.CSV_COLUMNS
        assert len(df) == 2
        assert df['sqrtB'].iloc[0] == pytest.approx(1.4)

    def test_write_gnuplot_script(self, tmp_path):
        path = write_gnuplot_script('scan.csv', str(tmp_path / 'scan.gp'), 'h_2')
        with open(path) as f:
            script = f.read()
        assert 'set logscale x' in script
        assert "using 1:3" in script and "using 1:4" in script
        assert "set title 'h_2'" in script

    def test_write_json_lines(self):
        stream = io.StringIO()
        count = write_json_lines([{'id': 'I1'}, {'id': 'I2'}], stream)
        lines = stream.getvalue().splitlines()
        assert count == 2
        assert json.loads(lines[1]) == {'id': 'I2'}

    def test_load_presets(self):
        presets = load_presets()
        assert presets['fig2']['window'] == '2'
        assert presets['fig2']['density'] == '1/2'
        assert [p['window'] for p in presets['fig3']] == ['4', '5']

    def test_presets_are_symmetric_about_the_swap(self):
        """Each preset range is mapped onto itself by b -> density / b."""
        presets = load_presets()
        for preset in [presets['fig2']] + presets['fig3']:
            density = float(Fraction(preset['density']))
            assert preset['b_min'] * preset['b_max'] == pytest.approx(density, rel=1e-15)


class TestPackage:
    """Test package metadata and module headers."""

    def test_version(self):
        import src
        assert src.__version__.count('.') == 2

    @pytest.mark.parametrize('module', ['config', 'exceptions', 'utils', 'xprec', 'hermite', 'zak',
                                        'zibulski', 'identities', 'framescan', 'cli'])
    def test_module_header(self, module):
        """Every module opens with a short title docstring."""
        imported = importlib.import_module(f'src.{module}')
        title = imported.__doc__.strip().splitlines()[0]
        assert title and len(title) < 90
