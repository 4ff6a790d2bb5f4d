"""
Tests for Hermite functions and windows
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.exceptions import PrecisionMismatchError, UnsupportedOrderError, WindowSpecError
from src.hermite import (
    HermiteWindow, classify_eigenspace, hermite_eval, hermite_table, rodrigues_polynomial,
    tail_envelope, window_eval,
)
from src.xprec import xreal


class TestRodriguesPolynomial:
    """Test the exact polynomial oracle."""

    def test_low_orders(self):
        assert rodrigues_polynomial(0).t_coefficients == (1,)
        assert rodrigues_polynomial(1).t_coefficients == (0, -2)
        assert rodrigues_polynomial(2).t_coefficients == (-2, 0, 4)

    def test_exact_coefficients(self):
        poly = rodrigues_polynomial(2)
        assert poly.exact_coefficient(2) == (16, 2)
        assert poly.exact_coefficient(0) == (-4, 1)
        assert poly.exact_coefficient(1) == (0, 0)

    @pytest.mark.parametrize('n', [0, 1, 2, 5, 10, 17])
    def test_recurrence_matches_definition(self, n):
        poly = rodrigues_polynomial(n)
        for x in (-1.7, -0.3, 0.0, 0.45, 1.2):
            assert hermite_eval(n, x) == pytest.approx(float(poly.evaluate(x, 106)), abs=1e-12)


class TestHermiteEval:
    """Test native and extended evaluation."""

    def test_ground_state(self):
        assert hermite_eval(0, 0.0) == pytest.approx(2 ** 0.25)
        assert hermite_eval(1, 0.5) == pytest.approx(-2 * 2 ** 0.25 * math.sqrt(math.pi) * 0.5
                                                     * math.exp(-math.pi / 4))

    def test_scalar_returns_float(self):
        assert isinstance(hermite_eval(3, 0.2), float)

    def test_array_input(self):
        xs = np.linspace(-2, 2, 9)
        values = hermite_eval(4, xs)
        assert values.shape == (9,)
        assert values[3] == pytest.approx(hermite_eval(4, float(xs[3])))

    def test_orthonormality(self):
        xs = np.linspace(-8.0, 8.0, 16001)
        dx = xs[1] - xs[0]
        table = hermite_table(6, xs)
        for m in range(7):
            for n in range(7):
                inner = float(np.sum(table[m] * table[n]) * dx)
                assert inner == pytest.approx(1.0 if m == n else 0.0, abs=1e-8)

    def test_extended_agrees_with_native(self):
        extended = hermite_eval(7, xreal('0.3', 212), 212)
        assert float(extended) == pytest.approx(hermite_eval(7, 0.3), abs=1e-14)

    def test_order_range(self):
        with pytest.raises(UnsupportedOrderError):
            hermite_eval(65, 0.0)
        with pytest.raises(UnsupportedOrderError):
            hermite_eval(-1, 0.0)

    def test_extended_argument_needs_precision(self):
        with pytest.raises(PrecisionMismatchError):
            hermite_table(3, xreal(1, 106))

    @given(st.integers(min_value=0, max_value=30),
           st.floats(min_value=-6, max_value=6, allow_nan=False, allow_infinity=False))
    @settings(max_examples=200, deadline=None)
    def test_parity(self, n, x):
        assert hermite_eval(n, -x) == pytest.approx((-1) ** n * hermite_eval(n, x), abs=1e-13)


class TestHermiteWindow:
    """Test window construction and classification."""

    def test_parse_single(self):
        assert HermiteWindow.parse('2') == HermiteWindow.single(2)
        assert str(HermiteWindow.single(4)) == '4'

    def test_parse_combination_sorts_orders(self):
        window = HermiteWindow.parse('6:0.5,2:1')
        assert window.orders == (2, 6)
        assert window.coefficients == (1.0, 0.5)
        assert window.max_order == 6

    @pytest.mark.parametrize('spec', ['', 'a', '2,2', '2:0', '3:nan', '70'])
    def test_parse_rejects(self, spec):
        with pytest.raises((WindowSpecError, UnsupportedOrderError)):
            HermiteWindow.parse(spec)

    def test_eigenclass_and_parity(self):
        assert HermiteWindow.parse('2:1,6:-0.5,10:0.25').eigenclass == 2
        assert classify_eigenspace(HermiteWindow.parse('2,3')) is None
        assert HermiteWindow.parse('3,7').parity == -1
        assert HermiteWindow.parse('0,2').parity == 1
        assert HermiteWindow.parse('1,2').parity is None

    def test_window_eval_is_linear(self):
        window = HermiteWindow.parse('2:1.5,6:-0.5')
        expected = 1.5 * hermite_eval(2, 0.7) - 0.5 * hermite_eval(6, 0.7)
        assert window_eval(window, 0.7) == pytest.approx(expected, abs=1e-14)
        assert float(window_eval(window, xreal('0.7', 106), 106)) == pytest.approx(expected, abs=1e-14)

    def test_scaled(self):
        window = HermiteWindow.parse('3:2').scaled(0.5)
        assert window.coefficients == (1.0,)

    @pytest.mark.parametrize('y', [0.4, 1.0, 1.7, 2.5, 3.2])
    def test_tail_envelope_dominates(self, y):
        window = HermiteWindow.parse('2:1,6:-0.5,10:0.25')
        bound = float(tail_envelope(window, y))
        assert bound >= abs(window_eval(window, y))
        assert bound >= abs(window_eval(window, -y))
