"""
Zak transform module for ZakFrame
Handles adaptive truncation, tail bounds and native or multi-precision evaluation.
"""

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from src.config import Config
from src.exceptions import (
    EigenclassError, PrecisionError, ScanParameterError, ToleranceBelowPrecisionError,
    WindowSpecError, ZakToleranceError,
)
from src.hermite import HermiteWindow, tail_envelope, window_eval
from src.xprec import expi_turns, get_context, rounding_floor, xreal

# Setup logging
logger = logging.getLogger(__name__)

Real = Union[int, float, Fraction]

_RATIONAL = re.compile(r'^(\d+)(?:/(\d+))?$')
_SQRT = re.compile(r'^sqrt\((\d+)\)$')
_POWER = re.compile(r'^(\d+)\^\((-?\d+)/([24])\)$')
_QUOTIENT = re.compile(r'^(\d+)/(?!\d+$)(.+)$')


def _strip_fourth_powers(u: int, w: int) -> Tuple[int, int]:
    d = 2
    while d ** 4 <= w:
        while w % d ** 4 == 0:
            w //= d ** 4
            u *= d
        d += 1
    return u, w


@dataclass(frozen=True)
class QuarticSurd:
    """Exact positive scalar (u/v) * w^(1/4) in normal form."""

    u: int
    v: int
    w: int

    def __post_init__(self):
        for name in ('u', 'v', 'w'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise WindowSpecError(f"QuarticSurd.{name} must be a positive integer, got {value!r}")
        if math.gcd(self.u, self.v) != 1 or _strip_fourth_powers(1, self.w)[1] != self.w:
            raise WindowSpecError(
                f"QuarticSurd({self.u}, {self.v}, {self.w}) is not normalized; use QuarticSurd.of")

    @classmethod
    def of(cls, u: int, v: int = 1, w: int = 1) -> 'QuarticSurd':
        """Normalize (u/v) * w^(1/4): fourth powers move out of w, gcd(u, v) = 1."""
        if min(u, v, w) < 1:
            raise WindowSpecError(f"Quartic surd components must be positive: ({u}, {v}, {w})")
        u, w = _strip_fourth_powers(int(u), int(w))
        g = math.gcd(u, int(v))
        return cls(u // g, int(v) // g, w)

    @classmethod
    def rational(cls, value: Union[int, Fraction]) -> 'QuarticSurd':
        value = Fraction(value)
        if value <= 0:
            raise WindowSpecError(f"Zak parameters must be positive, got {value}")
        return cls.of(value.numerator, value.denominator, 1)

    @classmethod
    def parse(cls, text: str) -> 'QuarticSurd':
        """
        Parse a product of rational and radical factors

        Accepted factors are ``u`` or ``u/v``, ``sqrt(w)``, ``w^(k/4)`` and
        ``w^(k/2)`` (k may be negative), each optionally prefixed by ``1/``.
        Factors are joined with ``*``, e.g. ``1/3*27^(1/4)`` or ``1/sqrt(2)``.

        Args:
            text: Surd expression

        Returns:
            Normalized QuarticSurd
        """
        source = str(text).replace(' ', '')
        if not source:
            raise WindowSpecError("Empty quartic surd")
        result = cls(1, 1, 1)
        for factor in source.split('*'):
            match = _QUOTIENT.match(factor)
            if match:
                numerator = int(match.group(1))
                if numerator == 0:
                    raise WindowSpecError(f"Zero factor in quartic surd '{text}'")
                parsed = cls._parse_factor(match.group(2), text).reciprocal() * numerator
            else:
                parsed = cls._parse_factor(factor, text)
            result = result * parsed
        return result

    @classmethod
    def _parse_factor(cls, factor: str, text: str) -> 'QuarticSurd':
        match = _RATIONAL.match(factor)
        if match:
            numerator = int(match.group(1))
            denominator = int(match.group(2) or 1)
            if numerator == 0 or denominator == 0:
                raise WindowSpecError(f"Zero factor in quartic surd '{text}'")
            return cls.of(numerator, denominator, 1)
        match = _SQRT.match(factor)
        if match:
            base = int(match.group(1))
            if base == 0:
                raise WindowSpecError(f"Zero factor in quartic surd '{text}'")
            return cls.of(1, 1, base ** 2)
        match = _POWER.match(factor)
        if match:
            base, exponent, denominator = int(match.group(1)), int(match.group(2)), int(match.group(3))
            if base == 0 or abs(exponent) > 12:
                raise WindowSpecError(f"Unsupported power in quartic surd '{text}'")
            quarter = exponent * (4 // denominator)
            surd = cls.of(1, 1, base ** abs(quarter))
            return surd.reciprocal() if quarter < 0 else surd
        raise WindowSpecError(f"Cannot parse quartic surd factor '{factor}' in '{text}'")

    def reciprocal(self) -> 'QuarticSurd':
        """1 / ((u/v) w^(1/4)) = (v / (u w)) (w^3)^(1/4)."""
        return QuarticSurd.of(self.v, self.u * self.w, self.w ** 3)

    def __mul__(self, other):
        if isinstance(other, QuarticSurd):
            return QuarticSurd.of(self.u * other.u, self.v * other.v, self.w * other.w)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self * QuarticSurd.rational(other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = QuarticSurd.rational(other)
        if isinstance(other, QuarticSurd):
            return self * other.reciprocal()
        return NotImplemented

    def value(self, bits: int):
        """Value at working precision as an XReal."""
        ctx = get_context(bits)
        return ctx.mpf(self.u) / self.v * ctx.root(ctx.mpf(self.w), 4)

    def __float__(self) -> float:
        return self.u / self.v * self.w ** 0.25

    def __str__(self) -> str:
        rational = str(self.u) if self.v == 1 else f"{self.u}/{self.v}"
        if self.w == 1:
            return rational
        radical = f"{self.w}^(1/4)"
        return radical if rational == '1' else f"{rational}*{radical}"


@dataclass(frozen=True)
class ZakParameter:
    """Zak parameter lam > 0, held exactly as a QuarticSurd or as a float."""

    surd: Optional[QuarticSurd] = None
    approx: Optional[float] = None

    def __post_init__(self):
        if (self.surd is None) == (self.approx is None):
            raise WindowSpecError("ZakParameter needs exactly one of an exact surd or an approximation")
        if self.approx is not None and not (math.isfinite(self.approx) and self.approx > 0):
            raise WindowSpecError(f"Zak parameter must be positive and finite, got {self.approx}")

    @classmethod
    def coerce(cls, value) -> 'ZakParameter':
        """
        Build a parameter from any supported representation

        Args:
            value: ZakParameter, QuarticSurd, positive int or Fraction
                (exact), float (approximate) or a string accepted by
                QuarticSurd.parse or float()

        Returns:
            ZakParameter
        """
        if isinstance(value, ZakParameter):
            return value
        if isinstance(value, QuarticSurd):
            return cls(surd=value)
        if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            return cls(surd=QuarticSurd.rational(value))
        if isinstance(value, str):
            try:
                return cls(surd=QuarticSurd.parse(value))
            except WindowSpecError:
                try:
                    return cls(approx=float(value))
                except ValueError as e:
                    raise WindowSpecError(f"Cannot parse Zak parameter '{value}'") from e
        return cls(approx=float(value))

    @property
    def is_exact(self) -> bool:
        return self.surd is not None

    def reciprocal(self) -> 'ZakParameter':
        if self.surd is not None:
            return ZakParameter(surd=self.surd.reciprocal())
        return ZakParameter(approx=1.0 / self.approx)

    def value(self, bits: int):
        if self.surd is not None:
            return self.surd.value(bits)
        return get_context(bits).mpf(self.approx)

    def __float__(self) -> float:
        return float(self.surd) if self.surd is not None else self.approx

    def __str__(self) -> str:
        return str(self.surd) if self.surd is not None else repr(self.approx)


@dataclass(frozen=True)
class ZakEvaluation:
    """One Zak value with its certified truncation bound and rounding floor."""

    value: Any
    truncation_bound: Any
    terms_used: int
    magnitude_sum: Any = 0.0
    bits: Optional[int] = None
    rounding_floor: Any = 0.0

    @property
    def magnitude(self):
        return abs(self.value)


@dataclass(frozen=True)
class ZakGrid:
    """Native Zak values on a grid or point set with a shared truncation bound."""

    values: np.ndarray
    truncation_bound: float
    terms_used: int
    magnitude_sum: float = 0.0

    @property
    def rounding_floor(self) -> float:
        """Worst binary64 summation error of any value in the grid."""
        return float(rounding_floor(self.magnitude_sum, self.terms_used, 53))


def reduce_point(x: Real, gamma: Real, bits: Optional[int] = None):
    """
    Reduce a point into the fundamental domain

    Args:
        x: Time coordinate
        gamma: Frequency coordinate
        bits: Precision of the returned phase; None for a Python complex

    Returns:
        (x0, gamma0, phase) with x0, gamma0 in [0, 1) and
        Z(x, gamma) = phase * Z(x0, gamma0)
    """
    shift = math.floor(x)
    x0 = x - shift
    if x0 >= 1:
        shift += 1
        x0 = x - shift
    g0 = gamma - math.floor(gamma)
    if g0 >= 1:
        g0 = g0 - 1
    return x0, g0, expi_turns(shift * gamma, bits)


def _start_index(window: HermiteWindow, lam: float) -> int:
    return max(8, math.ceil((window.max_order + 20) / lam))


def _tail_side(window: HermiteWindow, lam: float, y, ctx):
    """Bound on sum_{j>=0} |window(y + j lam)| via a geometric envelope ratio."""
    root = ctx.sqrt(2 * ctx.pi)
    t = root * y
    if t <= 0:
        return ctx.inf
    d = root * lam
    ratio = (1 + d / t) ** window.max_order * ctx.exp(-t * d - d * d / 2)
    if ratio >= 1:
        return ctx.inf
    return tail_envelope(window, y) / (1 - ratio)


def truncation_bound(window: HermiteWindow, lam: float, K: int, x0: Optional[Real] = None):
    """
    Rigorous bound on the terms omitted by the symmetric sum over [-K, K]

    Args:
        window: Hermite window
        lam: Zak parameter (float value)
        K: Truncation index
        x0: Reduced time coordinate; None bounds the worst case over [0, 1)

    Returns:
        Bound as a 53-bit XReal (infinite while the envelope ratio is >= 1)
    """
    ctx = get_context(53)
    lam = ctx.mpf(float(lam))
    if x0 is None:
        y_neg = lam * K
        # worst case needs the envelope to be decreasing from y_neg on
        if (2 * ctx.pi) * y_neg * y_neg <= window.max_order:
            return ctx.inf
        y_pos = lam * (K + 1)
    else:
        x0 = xreal(x0, 53) if isinstance(x0, Fraction) else ctx.mpf(x0)
        y_pos = lam * (x0 + K + 1)
        y_neg = lam * (K + 1 - x0)
    return ctx.sqrt(lam) * (_tail_side(window, lam, y_pos, ctx) + _tail_side(window, lam, y_neg, ctx))


def choose_truncation(window: HermiteWindow, lam: float, tol, x0: Optional[Real] = None):
    """
    Adaptive truncation index

    Starts from max(8, ceil((n_max + 20) / lam)) and doubles K until the
    tail bound drops to tol.

    Returns:
        (K, bound)
    """
    lam = float(lam)
    K = _start_index(window, lam)
    while True:
        bound = truncation_bound(window, lam, K, x0)
        if bound <= tol:
            return K, bound
        if 2 * K > Config.MAX_TRUNCATION_INDEX:
            raise ZakToleranceError(
                f"Truncation bound {float(bound):.3g} above tolerance {float(tol):.3g} at K={K}")
        logger.debug(f"Tail bound {float(bound):.3g} > {float(tol):.3g} at K={K}; doubling")
        K *= 2


def _phase_turns(k: np.ndarray, gamma0: Real) -> np.ndarray:
    if isinstance(gamma0, Fraction):
        return np.array([float((-int(j) * gamma0) % 1) for j in k])
    return np.mod(-k * float(gamma0), 1.0)


def _native_sum(window: HermiteWindow, lam: float, x0: Real, gamma0: Real, K: int):
    k = np.arange(-K, K + 1)
    samples = window_eval(window, lam * (float(x0) + k))
    terms = samples * np.exp(2j * np.pi * _phase_turns(k, gamma0))
    scale = math.sqrt(lam)
    return scale * complex(terms.sum()), scale * float(np.abs(samples).sum()), len(k)


def _extended_sum(window: HermiteWindow, lam: ZakParameter, x0: Real, gamma0: Real, K: int, bits: int):
    ctx = get_context(bits)
    lam_x = lam.value(bits)
    x0_x = xreal(x0, bits)
    total = ctx.mpc(0)
    magnitude = ctx.mpf(0)
    for k in range(-K, K + 1):
        sample = window_eval(window, lam_x * (x0_x + k), bits)
        if not sample:
            continue
        total += sample * expi_turns(-k * gamma0, bits)
        magnitude += abs(sample)
    scale = ctx.sqrt(lam_x)
    return scale * total, scale * magnitude, 2 * K + 1


def zak_partial_sum(window: HermiteWindow, lam, x: Real, gamma: Real, K: int, bits: Optional[int] = None):
    """
    Zak series truncated to k in [-K, K] at the reduced point

    Args:
        window: Hermite window
        lam: Zak parameter (anything ZakParameter.coerce accepts)
        x: Time coordinate
        gamma: Frequency coordinate
        K: Truncation index
        bits: Working precision; None for native binary64

    Returns:
        Partial sum times the quasi-periodic phase (complex or XComplex)
    """
    lam = ZakParameter.coerce(lam)
    x0, gamma0, phase = reduce_point(x, gamma, bits)
    if bits is None:
        value, _, _ = _native_sum(window, float(lam), x0, gamma0, K)
    else:
        value, _, _ = _extended_sum(window, lam, x0, gamma0, K, bits)
    return phase * value


def zak_eval(window: HermiteWindow, lam, x: Real, gamma: Real, tol=None,
             bits: Optional[int] = None) -> ZakEvaluation:
    """
    Evaluate Z_lam window(x, gamma) with a certified truncation bound

    Z_lam f(x, gamma) = sqrt(lam) * sum_k f(lam (x + k)) e^{-2 pi i k gamma}, summed
    over k in [-K, K] at the point reduced to the unit square.

    Args:
        window: Hermite window
        lam: Zak parameter; exact surds keep lam (x + k) at full precision
        x: Time coordinate (float or Fraction)
        gamma: Frequency coordinate (Fraction gives exact phases)
        tol: Target truncation bound; defaults to Config.DEFAULT_ZAK_TOL in
            native mode and the tier tolerance otherwise
        bits: Working precision; None for native binary64

    Returns:
        ZakEvaluation with truncation_bound <= tol
    """
    lam = ZakParameter.coerce(lam)
    if tol is None:
        tol = Config.DEFAULT_ZAK_TOL if bits is None else Config.DEFAULT_TOLERANCES[bits]
    if not tol > 0:
        raise PrecisionError(f"Tolerance must be positive, got {tol}")
    x0, gamma0, phase = reduce_point(x, gamma, bits)
    K, bound = choose_truncation(window, float(lam), tol, x0)
    if bits is None:
        value, magnitude, terms = _native_sum(window, float(lam), x0, gamma0, K)
        floor = float(rounding_floor(magnitude, terms, 53))
        if tol < floor:
            # native callers get a best-effort value; the floor travels with it
            logger.debug(f"Tolerance {float(tol):.3g} is below the rounding floor {floor:.3g} "
                         f"of the binary64 sum at ({x}, {gamma})")
        return ZakEvaluation(phase * value, float(bound), terms, magnitude, None, floor)

    value, magnitude, terms = _extended_sum(window, lam, x0, gamma0, K, bits)
    floor = rounding_floor(magnitude, terms, bits)
    if tol < floor:
        raise ToleranceBelowPrecisionError(
            f"Tolerance {float(tol):.3g} is below the rounding floor {float(floor):.3g} at {bits} bits")
    return ZakEvaluation(phase * value, bound, terms, magnitude, bits, floor)


def zak_eval_dual(window: HermiteWindow, lam, x: Real, gamma: Real, tol=None,
                  bits: Optional[int] = None) -> ZakEvaluation:
    """
    Evaluate Z_lam window(x, gamma) through Poisson summation

    Z_lam f(x, gamma) = e^{2 pi i x gamma} Z_{1/lam} f^(gamma, -x) with
    f^ = (-i)^j f for a window of eigenclass j.

    Returns:
        ZakEvaluation from the independent dual path
    """
    j = classify_or_raise(window)
    lam = ZakParameter.coerce(lam)
    inner = zak_eval(window, lam.reciprocal(), gamma, -x, tol, bits)
    rotation = (1, -1j, -1, 1j)[j]
    value = expi_turns(x * gamma, bits) * rotation * inner.value
    return ZakEvaluation(value, inner.truncation_bound, inner.terms_used, inner.magnitude_sum, bits,
                         inner.rounding_floor)


def classify_or_raise(window: HermiteWindow) -> int:
    j = window.eigenclass
    if j is None:
        raise EigenclassError(f"Window {window} mixes Fourier eigenspaces")
    return j


def zak_symmetry_residuals(window: HermiteWindow, lam, samples: Iterable[Tuple[Real, Real]],
                           tol=None, bits: Optional[int] = None):
    """
    Largest violation of Z(x, gamma) = +-Z(-x, -gamma) over the samples

    Args:
        window: Window of definite parity
        lam: Zak parameter
        samples: Points (x, gamma)
        tol: Truncation tolerance per evaluation
        bits: Working precision; None for native binary64

    Returns:
        max |Z(x, gamma) - s Z(-x, -gamma)| with s = +1 for even, -1 for odd
    """
    sign = window.parity
    if sign is None:
        raise EigenclassError(f"Window {window} has no definite parity")
    worst = 0.0 if bits is None else get_context(bits).mpf(0)
    for x, gamma in samples:
        direct = zak_eval(window, lam, x, gamma, tol, bits).value
        mirrored = zak_eval(window, lam, -x, -gamma, tol, bits).value
        worst = max(worst, abs(direct - sign * mirrored))
    return worst


@lru_cache(maxsize=256)
def _grid_truncation(window: HermiteWindow, lam: float, tol: float) -> Tuple[int, float]:
    K, bound = choose_truncation(window, lam, tol)
    return K, float(bound)


def _reduced_rows(window: HermiteWindow, lam: float, xs: np.ndarray, K: int):
    shifts = np.floor(xs)
    k = np.arange(-K, K + 1)
    samples = window_eval(window, lam * ((xs - shifts)[:, None] + k[None, :]))
    return samples, shifts, k


def _row_magnitude(samples: np.ndarray, lam: float) -> float:
    if samples.size == 0:
        return 0.0
    return math.sqrt(lam) * float(np.abs(samples).sum(axis=-1).max())


def zak_grid(window: HermiteWindow, lam, xs: Sequence[float], gammas: Sequence[float],
             tol: Optional[float] = None) -> ZakGrid:
    """
    Native Zak transform on the tensor grid xs x gammas as one matrix product

    Args:
        window: Hermite window
        lam: Zak parameter (float value is used)
        xs: Time coordinates (any real values)
        gammas: Frequency coordinates (any real values)
        tol: Truncation tolerance, default Config.DEFAULT_ZAK_TOL

    Returns:
        ZakGrid with values of shape (len(xs), len(gammas))
    """
    lam = float(ZakParameter.coerce(lam))
    tol = Config.DEFAULT_ZAK_TOL if tol is None else float(tol)
    xs = np.asarray(xs, dtype=float)
    gammas = np.asarray(gammas, dtype=float)
    K, bound = _grid_truncation(window, lam, tol)
    samples, shifts, k = _reduced_rows(window, lam, xs, K)
    reduced = gammas - np.floor(gammas)
    kernel = np.exp(-2j * np.pi * np.mod(np.outer(k, reduced), 1.0))
    phase = np.exp(2j * np.pi * np.mod(np.outer(shifts, gammas), 1.0))
    values = math.sqrt(lam) * (samples @ kernel) * phase
    return ZakGrid(values, bound, 2 * K + 1, _row_magnitude(samples, lam))


def zak_points(window: HermiteWindow, lam, xs: Sequence[float], gammas: Sequence[float],
               tol: Optional[float] = None) -> ZakGrid:
    """
    Native Zak transform at the scattered points (xs[i], gammas[i])

    Returns:
        ZakGrid with one value per point
    """
    lam = float(ZakParameter.coerce(lam))
    tol = Config.DEFAULT_ZAK_TOL if tol is None else float(tol)
    xs = np.asarray(xs, dtype=float)
    gammas = np.asarray(gammas, dtype=float)
    if xs.shape != gammas.shape:
        raise ScanParameterError("xs and gammas must have the same shape")
    K, bound = _grid_truncation(window, lam, tol)
    samples, shifts, k = _reduced_rows(window, lam, xs, K)
    reduced = gammas - np.floor(gammas)
    kernel = np.exp(-2j * np.pi * np.mod(np.outer(reduced, k), 1.0))
    phase = np.exp(2j * np.pi * np.mod(shifts * gammas, 1.0))
    values = math.sqrt(lam) * (samples * kernel).sum(axis=1) * phase
    return ZakGrid(values, bound, 2 * K + 1, _row_magnitude(samples, lam))
