"""
Tests for Zibulski-Zeevi matrices and their singular extremes
"""

from fractions import Fraction

import numpy as np
import pytest

from src.exceptions import DensityMismatchError, NonFiniteMatrixError, WindowSpecError
from src.hermite import HermiteWindow
from src.zak import QuarticSurd
from src.zibulski import (
    RationalDensity, hermitian_eigenvalues, integer_oversampled_bound, jacobi_eigenvalues,
    singular_extremes, zz_grid_extremes, zz_matrix, zz_sample,
)

H2 = HermiteWindow.single(2)


class TestRationalDensity:
    """Test density parsing and validation."""

    def test_parse_reduces(self):
        assert RationalDensity.parse('2/4') == RationalDensity(1, 2)
        assert str(RationalDensity.parse('2/3')) == '2/3'
        assert RationalDensity.parse('1/3').is_integer_oversampled

    def test_invalid(self):
        with pytest.raises(DensityMismatchError):
            RationalDensity(2, 4)
        with pytest.raises(DensityMismatchError):
            RationalDensity.parse('0')
        with pytest.raises(WindowSpecError):
            RationalDensity.parse('half')

    def test_density_above_one_warns(self, caplog):
        density = RationalDensity.of(3, 2)
        assert density.value == Fraction(3, 2)
        assert 'exploration' in caplog.text

    def test_matches(self):
        density = RationalDensity(1, 2)
        assert density.matches(0.25, 2.0)
        assert not density.matches(0.25, 2.1)


class TestEigenvalues:
    """Test the Jacobi eigenvalue routines against LAPACK."""

    def test_symmetric(self):
        rng = np.random.default_rng(7)
        m = rng.normal(size=(6, 6))
        sym = m + m.T
        np.testing.assert_allclose(jacobi_eigenvalues(sym), np.linalg.eigvalsh(sym), atol=1e-10)

    def test_batched(self):
        rng = np.random.default_rng(11)
        m = rng.normal(size=(4, 5, 5))
        sym = m + np.swapaxes(m, -1, -2)
        values = jacobi_eigenvalues(sym)
        assert values.shape == (4, 5)
        for i in range(4):
            np.testing.assert_allclose(values[i], np.linalg.eigvalsh(sym[i]), atol=1e-10)

    def test_hermitian(self):
        rng = np.random.default_rng(3)
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        herm = m @ m.conj().T
        np.testing.assert_allclose(hermitian_eigenvalues(herm), np.linalg.eigvalsh(herm), atol=1e-10)

    def test_graded_matrix_keeps_small_eigenvalue(self):
        gram = np.diag([1.0, 1e-24])
        values = jacobi_eigenvalues(gram)
        assert values[0] == pytest.approx(1e-24, rel=1e-6)

    def test_singular_extremes(self):
        rng = np.random.default_rng(5)
        m = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
        singular = np.linalg.svd(m, compute_uv=False)
        sigma_min, sigma_max = singular_extremes(m)
        assert sigma_min == pytest.approx(singular.min(), abs=1e-10)
        assert sigma_max == pytest.approx(singular.max(), abs=1e-10)

    def test_non_finite(self):
        with pytest.raises(NonFiniteMatrixError):
            singular_extremes(np.array([[1.0, np.nan]]))


class TestZZMatrix:
    """Test matrix assembly."""

    def test_shape(self):
        sample = zz_matrix(H2, 0.8, RationalDensity(2, 3), 0.1, 0.2)
        assert sample.matrix.shape == (2, 3)

    def test_rank_loss_at_witness(self):
        sample = zz_matrix(H2, QuarticSurd.parse('1/sqrt(2)'), RationalDensity(1, 2),
                           Fraction(3, 4), Fraction(1, 2), bits=106)
        assert sample.max_entry < 1e-20

    def test_sample_sorted_extremes(self):
        sample = zz_sample(H2, 0.9, RationalDensity(2, 3), 0.31, 0.47)
        assert 0 <= sample.sigma_min <= sample.sigma_max

    def test_integer_oversampled_shortcut(self):
        density = RationalDensity(1, 3)
        sample = zz_sample(H2, 0.7, density, 0.2, 0.4)
        functional = integer_oversampled_bound(H2, 0.7, 3, 0.2, 0.4)
        assert functional == pytest.approx(sample.sigma_min, abs=1e-12)
        assert functional == pytest.approx(sample.sigma_max, abs=1e-12)


class TestGridExtremes:
    """Test vectorized extremes against per-point assembly."""

    @pytest.mark.parametrize('density, b', [(RationalDensity(1, 2), 1.2), (RationalDensity(2, 3), 0.9)])
    def test_grid_matches_samples(self, density, b):
        window = HermiteWindow.parse('2:1,6:-0.4')
        xs = np.array([0.0, 0.2, 0.55])
        gammas = np.array([0.1, 0.5])
        extremes = zz_grid_extremes(window, b, density, xs, gammas)
        sigma_min, sigma_max = extremes.sigma_min, extremes.sigma_max
        assert sigma_min.shape == (3, 2)
        assert extremes.truncation_bound <= 1e-14
        assert 0 < extremes.rounding_floor < 1e-12
        for i, x in enumerate(xs):
            for j, gamma in enumerate(gammas):
                sample = zz_sample(window, b, density, float(x), float(gamma))
                assert sigma_min[i, j] == pytest.approx(sample.sigma_min, abs=1e-9)
                assert sigma_max[i, j] == pytest.approx(sample.sigma_max, abs=1e-9)

    def test_pointwise(self):
        xs = np.array([0.25, 0.75])
        gammas = np.array([0.5, 0.5])
        sigma_min = zz_grid_extremes(H2, QuarticSurd.parse('1/sqrt(2)'), RationalDensity(1, 2),
                                     xs, gammas, pointwise=True).sigma_min
        assert sigma_min.shape == (2,)
        assert np.all(sigma_min < 1e-12)


class TestInvariances:
    """Singular extremes under unitary phases and window scaling."""

    def test_unit_phases_leave_extremes(self):
        rng = np.random.default_rng(17)
        matrix = zz_matrix(H2, 0.9, RationalDensity(2, 3), 0.31, 0.47).matrix
        columns = np.exp(2j * np.pi * rng.uniform(size=3))
        rows = np.exp(2j * np.pi * rng.uniform(size=2))
        rotated = rows[:, None] * matrix * columns[None, :]
        for original, moved in zip(singular_extremes(matrix), singular_extremes(rotated)):
            assert moved == pytest.approx(original, abs=1e-12)

    @pytest.mark.parametrize('factor', [-2.5, 0.3])
    def test_window_scaling(self, factor):
        window = HermiteWindow.parse('2:1,6:-0.4')
        density = RationalDensity(2, 3)
        base = zz_sample(window, 0.9, density, 0.12, 0.81)
        scaled = zz_sample(window.scaled(factor), 0.9, density, 0.12, 0.81)
        assert scaled.sigma_min == pytest.approx(abs(factor) * base.sigma_min, abs=1e-12)
        assert scaled.sigma_max == pytest.approx(abs(factor) * base.sigma_max, abs=1e-12)


class TestClosedForms:
    """Test matrix routines against closed-form values."""

    def test_integer_oversampling_matches_matrix(self):
        rng = np.random.default_rng(20160404)
        windows = [HermiteWindow.single(n) for n in range(6)] + [HermiteWindow.parse('2:1,6:-0.4')]
        for _ in range(50):
            window = windows[int(rng.integers(len(windows)))]
            q = int(rng.integers(2, 6))
            b = float(rng.uniform(0.4, 2.5))
            x, gamma = (float(v) for v in rng.uniform(0.0, 1.0, size=2))
            sample = zz_sample(window, b, RationalDensity(1, q), x, gamma)
            functional = integer_oversampled_bound(window, b, q, x, gamma)
            assert sample.sigma_min == pytest.approx(functional, abs=1e-11)
            assert sample.sigma_max == pytest.approx(functional, abs=1e-11)

    def test_two_row_gram_quadratic_formula(self):
        rng = np.random.default_rng(41)
        phi = rng.normal(size=(200, 2, 3)) + 1j * rng.normal(size=(200, 2, 3))
        gram = phi @ np.conj(np.swapaxes(phi, -1, -2))
        values = hermitian_eigenvalues(gram)
        a, d = gram[:, 0, 0].real, gram[:, 1, 1].real
        root = np.sqrt((a - d) ** 2 + 4 * np.abs(gram[:, 0, 1]) ** 2)
        expected = np.stack([(a + d - root) / 2, (a + d + root) / 2], axis=-1)
        assert values.shape == (200, 2)
        assert np.all(np.abs(values - expected) <= 1e-10 * expected[:, 1:])
