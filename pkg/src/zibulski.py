"""
Zibulski-Zeevi matrices for rationally oversampled Gabor systems

For a lattice with ab = p/q, gcd(p, q) = 1, the p x q matrix at (x, gamma) has
entries

    Phi[k, l] = p^{-1/2} Z_{1/b} g(x - l p/q, gamma + k/p)

and the Gabor system is a frame with bounds A, B exactly when the extreme
singular values of Phi stay in [sqrt(A), sqrt(B)] for almost every point.
"""

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Optional, Sequence, Tuple

import numpy as np

from src.config import Config
from src.exceptions import DensityMismatchError, NonFiniteMatrixError, WindowSpecError, ZakFrameError
from src.hermite import HermiteWindow
from src.xprec import get_context
from src.zak import ZakParameter, zak_eval, zak_grid, zak_points

# Setup logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RationalDensity:
    """Lattice density ab = p/q in lowest terms."""

    p: int
    q: int

    def __post_init__(self):
        if isinstance(self.p, bool) or not isinstance(self.p, int) or not isinstance(self.q, int):
            raise DensityMismatchError(f"Density terms must be integers, got {self.p!r}/{self.q!r}")
        if self.p < 1 or self.q < 1:
            raise DensityMismatchError(f"Density terms must be positive, got {self.p}/{self.q}")
        if math.gcd(self.p, self.q) != 1:
            raise DensityMismatchError(f"Density {self.p}/{self.q} is not in lowest terms")

    @classmethod
    def of(cls, p: int, q: int) -> 'RationalDensity':
        """Reduce p/q to lowest terms; densities >= 1 are accepted with a warning."""
        g = math.gcd(int(p), int(q)) or 1
        density = cls(int(p) // g, int(q) // g)
        if density.p >= density.q:
            logger.warning(f"Density {density} is >= 1; accepted for exploration only")
        return density

    @classmethod
    def parse(cls, text: str) -> 'RationalDensity':
        try:
            value = Fraction(str(text).strip())
        except (ValueError, ZeroDivisionError) as e:
            raise WindowSpecError(f"Cannot parse density '{text}'") from e
        if value <= 0:
            raise DensityMismatchError(f"Density must be positive, got {text}")
        return cls.of(value.numerator, value.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def is_integer_oversampled(self) -> bool:
        return self.p == 1

    def matches(self, a: float, b: float, tol: float = Config.DENSITY_TOLERANCE) -> bool:
        return abs(float(a) * float(b) - self.p / self.q) <= tol

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


@dataclass(frozen=True)
class ZZMatrixSample:
    """Zibulski-Zeevi matrix at one point with its singular extremes."""

    point: Tuple[Any, Any]
    matrix: np.ndarray
    sigma_min: Optional[float] = None
    sigma_max: Optional[float] = None
    truncation_bound: Any = 0.0

    @property
    def max_entry(self):
        """Largest entry magnitude (kept at the entries' own precision)."""
        return max(abs(entry) for entry in self.matrix.flat)

    def row_magnitudes(self) -> list:
        return [max(abs(entry) for entry in row) for row in self.matrix]


def _shift(value, offset: Fraction):
    if isinstance(value, (int, Fraction)):
        return value + offset
    return float(value) + float(offset)


def zz_matrix(window: HermiteWindow, b, density: RationalDensity, x, gamma,
              tol=None, bits: Optional[int] = None) -> ZZMatrixSample:
    """
    Assemble the p x q Zibulski-Zeevi matrix

    Args:
        window: Hermite window g
        b: Modulation parameter; the Zak parameter is 1/b
        density: Lattice density p/q
        x: Time coordinate
        gamma: Frequency coordinate
        tol: Truncation tolerance per entry
        bits: Working precision; None for native binary64

    Returns:
        ZZMatrixSample without singular values
    """
    lam = ZakParameter.coerce(b).reciprocal()
    p, q = density.p, density.q
    entries = []
    bound = 0.0
    for k in range(p):
        row = []
        for l in range(q):
            evaluation = zak_eval(window, lam, _shift(x, -Fraction(l * p, q)),
                                  _shift(gamma, Fraction(k, p)), tol, bits)
            row.append(evaluation.value)
            bound = max(bound, evaluation.truncation_bound)
        entries.append(row)
    if bits is None:
        matrix = np.array(entries, dtype=complex) / math.sqrt(p)
        scale = 1 / math.sqrt(p)
    else:
        ctx = get_context(bits)
        scale = 1 / ctx.sqrt(p)
        matrix = np.empty((p, q), dtype=object)
        for k in range(p):
            for l in range(q):
                matrix[k, l] = entries[k][l] * scale
    return ZZMatrixSample((x, gamma), matrix, truncation_bound=bound * scale)


def jacobi_eigenvalues(matrices: np.ndarray, rtol: float = 1e-13, max_sweeps: int = 60) -> np.ndarray:
    """
    Eigenvalues of real symmetric matrices by cyclic Jacobi rotations

    Args:
        matrices: Array of shape (n, n) or (..., n, n)
        rtol: Stop once the off-diagonal norm is below rtol * ||A||_F
        max_sweeps: Sweep cap

    Returns:
        Eigenvalues sorted ascending, shape (n,) or (..., n)
    """
    a = np.array(matrices, dtype=float)
    single = a.ndim == 2
    batch_shape = a.shape[:-2]
    n = a.shape[-1]
    a = a.reshape(-1, n, n)
    scale = np.sqrt((a * a).sum(axis=(1, 2)))
    mask = ~np.eye(n, dtype=bool)
    for sweep in range(max_sweeps):
        off = np.sqrt((a[:, mask] ** 2).sum(axis=1))
        if np.all(off <= rtol * scale):
            break
        for k in range(n - 1):
            for l in range(k + 1, n):
                akl = a[:, k, l]
                diff = a[:, l, l] - a[:, k, k]
                nonzero = akl != 0
                phi = np.where(nonzero, diff / np.where(nonzero, 2.0 * akl, 1.0), 0.0)
                t = np.copysign(1.0, phi) / (np.abs(phi) + np.sqrt(phi * phi + 1.0))
                tiny = np.abs(akl) < np.abs(diff) * 1.0e-36
                t = np.where(tiny, akl / np.where(diff == 0, 1.0, diff), t)
                t = np.where(nonzero, t, 0.0)
                c = (1.0 / np.sqrt(t * t + 1.0))[:, None]
                s = t[:, None] * c
                col_k, col_l = a[:, :, k].copy(), a[:, :, l].copy()
                a[:, :, k] = c * col_k - s * col_l
                a[:, :, l] = s * col_k + c * col_l
                row_k, row_l = a[:, k, :].copy(), a[:, l, :].copy()
                a[:, k, :] = c * row_k - s * row_l
                a[:, l, :] = s * row_k + c * row_l
    else:
        logger.warning(f"Jacobi iteration stopped after {max_sweeps} sweeps without converging")
    eigenvalues = np.sort(np.diagonal(a, axis1=1, axis2=2), axis=1)
    if single:
        return eigenvalues[0]
    return eigenvalues.reshape(batch_shape + (n,))


def hermitian_eigenvalues(gram: np.ndarray) -> np.ndarray:
    """
    Eigenvalues of Hermitian matrices through the real symmetric embedding
    [[Re, -Im], [Im, Re]], whose spectrum repeats every eigenvalue twice

    Args:
        gram: Array of shape (..., p, p)

    Returns:
        Ascending eigenvalues, shape (..., p)
    """
    gram = np.asarray(gram, dtype=complex)
    top = np.concatenate([gram.real, -gram.imag], axis=-1)
    bottom = np.concatenate([gram.imag, gram.real], axis=-1)
    embedded = np.concatenate([top, bottom], axis=-2)
    return jacobi_eigenvalues(embedded)[..., ::2]


def singular_extremes(matrix) -> Tuple[float, float]:
    """
    Extreme singular values of a p x q matrix

    Args:
        matrix: Complex entries (native or XComplex)

    Returns:
        (sigma_min, sigma_max) from the eigenvalues of the p x p Gram matrix
    """
    m = np.asarray(np.array(matrix, dtype=object).tolist(), dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise ZakFrameError(f"Expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteMatrixError("Zibulski-Zeevi matrix has non-finite entries")
    eigenvalues = np.maximum(hermitian_eigenvalues(m @ m.conj().T), 0.0)
    return math.sqrt(eigenvalues[0]), math.sqrt(eigenvalues[-1])


def zz_sample(window: HermiteWindow, b, density: RationalDensity, x, gamma,
              tol=None, bits: Optional[int] = None) -> ZZMatrixSample:
    """Zibulski-Zeevi matrix at one point together with its singular extremes."""
    sample = zz_matrix(window, b, density, x, gamma, tol, bits)
    sigma_min, sigma_max = singular_extremes(sample.matrix)
    return replace(sample, sigma_min=sigma_min, sigma_max=sigma_max)


def integer_oversampled_bound(window: HermiteWindow, b, q: int, x, gamma,
                              tol=None, bits: Optional[int] = None):
    """
    Frame-bound functional for integer oversampling (p = 1)

    Args:
        window: Hermite window g
        b: Modulation parameter; the Zak parameter is 1/b
        q: Oversampling factor
        x: Time coordinate
        gamma: Frequency coordinate

    Returns:
        (sum_l |Z_{1/b} g(x - l/q, gamma)|^2)^{1/2}
    """
    lam = ZakParameter.coerce(b).reciprocal()
    total = 0
    for l in range(q):
        value = zak_eval(window, lam, _shift(x, -Fraction(l, q)), gamma, tol, bits).value
        total += abs(value) ** 2
    if bits is None:
        return math.sqrt(total)
    return get_context(bits).sqrt(total)


@dataclass(frozen=True)
class GridExtremes:
    """Singular extremes over a grid or point set with their error scales."""

    sigma_min: np.ndarray
    sigma_max: np.ndarray
    truncation_bound: float
    rounding_floor: float = 0.0


def _block_values(window, lam, density, xs, gammas, tol, pointwise: bool):
    p, q = density.p, density.q
    evaluate = zak_points if pointwise else zak_grid
    blocks = []
    bound = 0.0
    floor = 0.0
    for k in range(p):
        row = []
        for l in range(q):
            result = evaluate(window, lam, xs - l * p / q, gammas + k / p, tol)
            row.append(result.values)
            bound = max(bound, result.truncation_bound)
            floor = max(floor, result.rounding_floor)
        blocks.append(row)
    return blocks, bound, floor


def zz_grid_extremes(window: HermiteWindow, b, density: RationalDensity,
                     xs: Sequence[float], gammas: Sequence[float], tol: Optional[float] = None,
                     pointwise: bool = False) -> GridExtremes:
    """
    Singular extremes of the Zibulski-Zeevi matrices over many points

    Args:
        window: Hermite window g
        b: Modulation parameter
        density: Lattice density p/q
        xs: Time coordinates
        gammas: Frequency coordinates
        tol: Truncation tolerance
        pointwise: Treat (xs[i], gammas[i]) as points instead of a tensor grid

    Returns:
        GridExtremes with arrays of shape (len(xs), len(gammas)) for grids
        and (len(xs),) for points. Its rounding_floor bounds how far binary64
        summation of the entries can move a singular value.
    """
    lam = ZakParameter.coerce(b).reciprocal()
    xs = np.asarray(xs, dtype=float)
    gammas = np.asarray(gammas, dtype=float)
    blocks, bound, floor = _block_values(window, lam, density, xs, gammas, tol, pointwise)
    p, q = density.p, density.q
    bound /= math.sqrt(p)
    floor *= math.sqrt(q)
    if p == 1:
        sigma = np.sqrt(sum(np.abs(values) ** 2 for values in blocks[0]))
        return GridExtremes(sigma, sigma.copy(), bound, floor)
    matrices = np.stack([np.stack(row, axis=-1) for row in blocks], axis=-2) / math.sqrt(p)
    if not np.all(np.isfinite(matrices)):
        raise NonFiniteMatrixError("Zibulski-Zeevi matrix has non-finite entries")
    gram = np.einsum('...kl,...ml->...km', matrices, matrices.conj())
    eigenvalues = np.maximum(hermitian_eigenvalues(gram), 0.0)
    return GridExtremes(np.sqrt(eigenvalues[..., 0]), np.sqrt(eigenvalues[..., -1]), bound, floor)
