"""
Hermite functions and finite Hermite windows

The n-th Hermite function follows the Rodrigues form

    h_n(x) = c_n^{-1/2} e^{pi x^2} (d/dx)^n e^{-2 pi x^2},  c_n = (2 pi)^n 2^{n-1/2} n!

which is (-1)^n times the usual positive-leading family. Production values
come from the normalized three-term recurrence; the exact polynomial form is
kept as an oracle.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np

from src.config import Config
from src.exceptions import (
    PrecisionMismatchError, UnsupportedOrderError, WindowSpecError,
)
from src.xprec import get_context, is_extended

# Setup logging
logger = logging.getLogger(__name__)

MAX_ORDER = Config.MAX_HERMITE_ORDER

Scalar = Union[float, np.ndarray]


def hermite_order(n: int) -> int:
    """Validate a Hermite order and return it as int."""
    if isinstance(n, bool) or int(n) != n or not 0 <= int(n) <= MAX_ORDER:
        raise UnsupportedOrderError(f"Hermite order must be an integer in [0, {MAX_ORDER}], got {n}")
    return int(n)


@dataclass(frozen=True)
class RodriguesPolynomial:
    """
    Exact polynomial R_n with (d/dx)^n e^{-2 pi x^2} = R_n(x) e^{-2 pi x^2}

    Coefficients are stored in the basis t = sqrt(2 pi) x, where
    R_n(x) = (2 pi)^{n/2} P_n(t) and P_n has integer coefficients satisfying
    P_0 = 1, P_{n+1} = P_n' - 2 t P_n.
    """

    order: int
    t_coefficients: Tuple[int, ...]

    def exact_coefficient(self, k: int) -> Tuple[int, int]:
        """
        Coefficient of x^k in R_n as an exact (integer, power of pi) pair

        Args:
            k: Monomial degree

        Returns:
            (r, m) such that the coefficient equals r * pi^m
        """
        if k < 0 or k >= len(self.t_coefficients) or self.t_coefficients[k] == 0:
            return 0, 0
        m = (self.order + k) // 2
        return self.t_coefficients[k] * 2 ** m, m

    def absolute_t_coefficients(self) -> Tuple[int, ...]:
        return tuple(abs(c) for c in self.t_coefficients)

    def r_value(self, x, bits: int = 106):
        """Evaluate R_n(x) from the exact x-coefficients."""
        ctx = get_context(bits)
        x = ctx.mpf(x)
        total = ctx.mpf(0)
        for k in range(len(self.t_coefficients) - 1, -1, -1):
            r, m = self.exact_coefficient(k)
            total = total * x + (r * ctx.pi ** m if r else 0)
        return total

    def evaluate(self, x, bits: int = 106):
        """
        Hermite function value straight from the definition

        Args:
            x: Evaluation point
            bits: Working precision in bits

        Returns:
            h_n(x) = c_n^{-1/2} R_n(x) e^{-pi x^2} as an XReal
        """
        ctx = get_context(bits)
        x = ctx.mpf(x)
        n = self.order
        c_n = (2 * ctx.pi) ** n * ctx.ldexp(ctx.sqrt(2), n - 1) * math.factorial(n)
        return self.r_value(x, bits) * ctx.exp(-ctx.pi * x * x) / ctx.sqrt(c_n)


@lru_cache(maxsize=None)
def rodrigues_polynomial(n: int) -> RodriguesPolynomial:
    """
    Exact Rodrigues polynomial of order n

    Args:
        n: Hermite order

    Returns:
        RodriguesPolynomial built by the derivative recursion
    """
    n = hermite_order(n)
    if n == 0:
        return RodriguesPolynomial(0, (1,))
    prev = rodrigues_polynomial(n - 1).t_coefficients
    coeffs = [0] * (n + 1)
    for k in range(1, len(prev)):
        coeffs[k - 1] += k * prev[k]
    for k, c in enumerate(prev):
        coeffs[k + 1] -= 2 * c
    return RodriguesPolynomial(n, tuple(coeffs))


def _native_table(max_order: int, x) -> List[Scalar]:
    x = np.asarray(x, dtype=float)
    gauss = np.exp(-np.pi * x * x)
    h_prev = 2.0 ** 0.25 * gauss
    table = [h_prev]
    if max_order == 0:
        return table
    h_cur = 2.0 * 2.0 ** 0.25 * math.sqrt(math.pi) * x * gauss
    table.append(-h_cur)
    for n in range(1, max_order):
        h_next = 2.0 * math.sqrt(math.pi / (n + 1)) * x * h_cur - math.sqrt(n / (n + 1)) * h_prev
        h_prev, h_cur = h_cur, h_next
        table.append(h_cur if (n + 1) % 2 == 0 else -h_cur)
    return table


def _extended_table(max_order: int, x, bits: int) -> list:
    ctx = get_context(bits)
    x = ctx.mpf(x)
    gauss = ctx.exp(-ctx.pi * x * x)
    root2 = ctx.root(2, 4)
    h_prev = root2 * gauss
    table = [h_prev]
    if max_order == 0:
        return table
    sqrt_pi = ctx.sqrt(ctx.pi)
    h_cur = 2 * root2 * sqrt_pi * x * gauss
    table.append(-h_cur)
    for n in range(1, max_order):
        h_next = 2 * sqrt_pi / ctx.sqrt(n + 1) * x * h_cur - ctx.sqrt(ctx.mpf(n) / (n + 1)) * h_prev
        h_prev, h_cur = h_cur, h_next
        table.append(h_cur if (n + 1) % 2 == 0 else -h_cur)
    return table


def hermite_table(max_order: int, x, bits: Optional[int] = None) -> list:
    """
    All Hermite functions h_0..h_max_order at x from one recurrence sweep

    Args:
        max_order: Highest order needed
        x: Point(s); float or ndarray for native precision, anything
           mpmath accepts when bits is given
        bits: Working precision; None selects native binary64

    Returns:
        List indexed by order
    """
    max_order = hermite_order(max_order)
    if bits is None:
        if is_extended(x):
            raise PrecisionMismatchError("Extended-precision argument needs an explicit precision")
        return _native_table(max_order, x)
    return _extended_table(max_order, x, bits)


def _as_output(value, x):
    if isinstance(value, np.ndarray) and np.ndim(x) == 0:
        return float(value) + 0.0
    return value


def hermite_eval(n: int, x, bits: Optional[int] = None):
    """
    Evaluate the Hermite function h_n

    Args:
        n: Hermite order in [0, 64]
        x: Evaluation point(s)
        bits: Working precision; None for native binary64

    Returns:
        h_n(x) with the Rodrigues sign convention
    """
    n = hermite_order(n)
    return _as_output(hermite_table(n, x, bits)[n], x)


@dataclass(frozen=True)
class HermiteWindow:
    """Finite linear combination of Hermite functions."""

    terms: Tuple[Tuple[int, float], ...]

    def __post_init__(self):
        if not self.terms:
            raise WindowSpecError("A Hermite window needs at least one term")
        previous = -1
        for order, coefficient in self.terms:
            order = hermite_order(order)
            if order <= previous:
                raise WindowSpecError("Window orders must be strictly increasing")
            if coefficient == 0 or not math.isfinite(coefficient):
                raise WindowSpecError(f"Coefficient of h_{order} must be finite and nonzero")
            previous = order

    @classmethod
    def single(cls, n: int, coefficient: float = 1.0) -> 'HermiteWindow':
        return cls(((hermite_order(n), float(coefficient)),))

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[int, float]]) -> 'HermiteWindow':
        """Build a window from (order, coefficient) pairs in any order."""
        ordered = sorted((hermite_order(n), float(c)) for n, c in terms)
        return cls(tuple(ordered))

    @classmethod
    def parse(cls, spec: str) -> 'HermiteWindow':
        """
        Parse the window syntax shared with the command line

        Args:
            spec: ``n`` for a single Hermite function or ``n0:c0,n1:c1,...``

        Returns:
            Parsed HermiteWindow
        """
        text = str(spec).strip()
        if not text:
            raise WindowSpecError("Empty window specification")
        terms = []
        try:
            for part in text.split(','):
                part = part.strip()
                if ':' in part:
                    order_text, coeff_text = part.split(':', 1)
                    terms.append((int(order_text.strip()), float(coeff_text.strip())))
                else:
                    terms.append((int(part), 1.0))
        except ValueError as e:
            raise WindowSpecError(f"Cannot parse window '{spec}': {e}") from e
        if len({n for n, _ in terms}) != len(terms):
            raise WindowSpecError(f"Repeated order in window '{spec}'")
        return cls.from_terms(terms)

    @property
    def orders(self) -> Tuple[int, ...]:
        return tuple(n for n, _ in self.terms)

    @property
    def coefficients(self) -> Tuple[float, ...]:
        return tuple(c for _, c in self.terms)

    @property
    def max_order(self) -> int:
        return self.terms[-1][0]

    @property
    def eigenclass(self) -> Optional[int]:
        return classify_eigenspace(self)

    @property
    def parity(self) -> Optional[int]:
        """+1 for even windows, -1 for odd ones, None for mixed parity."""
        residues = {n % 2 for n in self.orders}
        if len(residues) != 1:
            return None
        return 1 if residues.pop() == 0 else -1

    def scaled(self, factor: float) -> 'HermiteWindow':
        return HermiteWindow(tuple((n, c * factor) for n, c in self.terms))

    def __str__(self) -> str:
        if len(self.terms) == 1 and self.terms[0][1] == 1.0:
            return str(self.terms[0][0])
        return ','.join(f"{n}:{c!r}" for n, c in self.terms)


def window_eval(window: HermiteWindow, x, bits: Optional[int] = None):
    """
    Evaluate a Hermite window

    Args:
        window: Finite Hermite combination
        x: Evaluation point(s)
        bits: Working precision; None for native binary64

    Returns:
        Sum of coefficient * h_order(x) from a single recurrence sweep
    """
    table = hermite_table(window.max_order, x, bits)
    if bits is None:
        total = np.zeros_like(table[0])
        for n, c in window.terms:
            total = total + c * table[n]
        return _as_output(total, x)
    ctx = get_context(bits)
    total = ctx.mpf(0)
    for n, c in window.terms:
        total += ctx.mpf(c) * table[n]
    return total


def classify_eigenspace(window: HermiteWindow) -> Optional[int]:
    """
    Fourier eigenspace index of a window

    Args:
        window: Finite Hermite combination

    Returns:
        j when every order is j mod 4 (Fourier transform = (-i)^j * window),
        otherwise None
    """
    residues = {n % 4 for n in window.orders}
    if len(residues) == 1:
        return residues.pop()
    return None


def tail_envelope(window: HermiteWindow, y, bits: int = 53):
    """
    Upper bound on |window(y)| and |window(-y)|

    Uses |P_n(t)| <= sum_k |p_k| |t|^k, which also makes the bound monotone
    in the ratio estimate of the Zak tail.

    Args:
        window: Finite Hermite combination
        y: Non-negative abscissa
        bits: Precision of the bound computation (exponent range is unlimited)

    Returns:
        Bound as an XReal
    """
    ctx = get_context(bits)
    t = ctx.sqrt(2 * ctx.pi) * abs(ctx.mpf(y))
    gauss = ctx.exp(-t * t / 2)
    total = ctx.mpf(0)
    for n, c in window.terms:
        poly = ctx.mpf(0)
        for coefficient in reversed(rodrigues_polynomial(n).absolute_t_coefficients()):
            poly = poly * t + coefficient
        norm = ctx.root(2, 4) / ctx.sqrt(ctx.mpf(2) ** n * math.factorial(n))
        total += abs(ctx.mpf(c)) * norm * poly
    return total * gauss
