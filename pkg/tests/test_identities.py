"""
Tests for the identity catalog and its high-precision verification
"""

from dataclasses import replace
from fractions import Fraction

import pytest

from src.exceptions import ToleranceBelowPrecisionError, WindowSpecError
from src.hermite import HermiteWindow
from src.identities import (
    PROVEN, SQRT2, VERIFIED_NUMERICALLY, IdentityCase, catalog, families, negative_control,
    select_cases, split_sums, verify, verify_catalog,
)


class TestCatalog:
    """Test catalog enumeration."""

    def test_family_counts(self):
        counts = {}
        for case in catalog():
            counts[case.id] = counts.get(case.id, 0) + 1
        assert counts == {'I1': 6, 'I2': 6, 'I3': 27, 'I4': 150, 'I5': 1, 'I6': 1, 'I7': 3}

    def test_deterministic(self):
        first = [case.window for case in catalog() if case.id == 'I4']
        second = [case.window for case in catalog() if case.id == 'I4']
        assert first == second

    def test_seeded_windows_stay_in_class(self):
        for case in catalog():
            if case.id == 'I4':
                assert case.window.eigenclass == dict(case.params)['class']
                assert len(case.window.orders) == 3

    def test_families(self):
        table = {row['id']: row for row in families()}
        assert table['I4']['cases'] == 150
        assert table['I1']['status'] == PROVEN
        assert table['I7']['status'] == VERIFIED_NUMERICALLY

    def test_select_cases(self):
        assert len(select_cases(['i1', 'I5'])) == 7
        assert len(select_cases(['all'])) == 194
        with pytest.raises(WindowSpecError):
            select_cases(['I9'])

    def test_case_labels(self):
        case = select_cases(['I7'])[1]
        assert str(case) == 'I7[p=1]'
        assert case.params_dict()['lambda'] == '27^(1/4)'
        assert case.x == Fraction(1, 3)


class TestVerify:
    """Test verification verdicts."""

    def test_catalog_passes_at_106_bits(self):
        reports = verify_catalog(precision_bits=106, threads=4)
        assert len(reports) == 194
        failed = [str(r.case) for r in reports if not r.passed]
        assert failed == []

    @pytest.mark.parametrize('family', ['I5', 'I6', 'I7'])
    def test_numerical_families_at_212_bits(self, family):
        for case in select_cases([family]):
            report = verify(case, 212)
            assert report.passed
            assert report.residual <= 1e-30

    def test_report_json(self):
        report = verify(select_cases(['I1'])[0], 106)
        data = report.to_json()
        assert set(data) == {'id', 'params', 'precision_bits', 'residual', 'truncation_bound',
                             'terms_used', 'verdict', 'status'}
        assert data['verdict'] == 'PASS'
        assert data['params']['x'] == '1/4'

    def test_negative_control_fails(self):
        case = IdentityCase('control', (), HermiteWindow.single(0), SQRT2, Fraction(1, 4), Fraction(1, 2))
        report = verify(case, 106)
        assert report.verdict == 'FAIL'
        assert case.status == VERIFIED_NUMERICALLY

    def test_negative_control_value(self):
        magnitude = negative_control(HermiteWindow.single(0), 'sqrt(2)', '1/4', '1/2')
        assert float(magnitude) == pytest.approx(0.91358, abs=1e-3)

    def test_tolerance_below_floor(self):
        with pytest.raises(ToleranceBelowPrecisionError):
            verify(select_cases(['I1'])[0], 53, 1e-20)


class TestSplitSums:
    """Test the even/odd split of an identity series."""

    def test_halves_cancel(self):
        sums = split_sums(select_cases(['I1'])[0])
        assert sums.difference < 1e-20
        assert abs(sums.even) > 0.1
        assert abs(sums.odd) > 0.1


class TestPrecisionScaling:
    """Test residuals across precision tiers."""

    def test_catalog_passes_at_212_bits(self):
        reports = verify_catalog(precision_bits=212)
        assert len(reports) == 194
        assert [str(r.case) for r in reports if not r.passed] == []
        assert all(r.residual <= 1e-30 for r in reports)

    def test_first_family_at_212_bits(self):
        for case in select_cases(['I1']):
            assert verify(case, 212).residual <= 1e-30

    @pytest.mark.parametrize('family', ['I1', 'I2', 'I3', 'I5', 'I6', 'I7'])
    def test_residual_shrinks_with_precision(self, family):
        for case in select_cases([family]):
            coarse = verify(case, 53).residual
            fine = verify(case, 212).residual
            if coarse > 0:
                assert fine <= coarse * 1e-8

    def test_doubling_precision(self):
        case = select_cases(['I1'])[0]
        single = verify(case, 106).residual
        double = verify(case, 212).residual
        if single > 0:
            assert double <= single * 1e-10


class TestNegativeControls:
    """The Gaussian does not satisfy any catalog identity."""

    @pytest.mark.parametrize('family', ['I1', 'I2', 'I3', 'I4', 'I5', 'I6', 'I7'])
    def test_gaussian_at_each_family_point(self, family):
        half = (Fraction(1, 2), Fraction(1, 2))
        case = next(c for c in select_cases([family]) if (c.x, c.gamma) != half)
        control = replace(case, window=HermiteWindow.single(0))
        assert negative_control(control.window, control.lam, control.x, control.gamma) > 1e-3
        report = verify(control, 106)
        assert report.verdict == 'FAIL'
        assert report.residual > 1e-3
