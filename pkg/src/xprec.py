"""
Extended-precision scalar arithmetic

XReal and XComplex values are mpmath numbers bound to one context per
precision tier. Contexts are created lazily per thread because mpmath
functions adjust the working precision of their context while they run.
"""

import logging
import threading
from fractions import Fraction
from typing import Union

import mpmath
from mpmath.ctx_mp import MPContext

from src.config import Config
from src.exceptions import PrecisionError

# Setup logging
logger = logging.getLogger(__name__)

MAX_EXP_ARGUMENT = 10 ** 6

XReal = mpmath.mpf
XComplex = mpmath.mpc
Rational = Union[int, Fraction]

_local = threading.local()


def get_context(bits: int) -> MPContext:
    """
    Return the calling thread's mpmath context for a precision tier

    Args:
        bits: Working precision in bits (one of Config.PRECISION_TIERS)

    Returns:
        MPContext whose precision is fixed to ``bits``
    """
    if bits not in Config.PRECISION_TIERS:
        raise PrecisionError(
            f"Unsupported precision {bits} bits; supported tiers: {Config.PRECISION_TIERS}")
    contexts = getattr(_local, 'contexts', None)
    if contexts is None:
        contexts = _local.contexts = {}
    ctx = contexts.get(bits)
    if ctx is None:
        ctx = MPContext()
        ctx.prec = bits
        contexts[bits] = ctx
        logger.debug(f"Created {bits}-bit context for thread {threading.get_ident()}")
    return ctx


def xreal(value: Union[int, float, str, Fraction], bits: int):
    """Convert an exact or decimal value to an XReal at the given precision."""
    ctx = get_context(bits)
    if isinstance(value, Fraction):
        return ctx.mpf(value.numerator) / value.denominator
    return ctx.mpf(value)


def xpi(bits: int):
    """The constant pi at full working precision."""
    return +get_context(bits).pi


def xreal_exp(x, bits: int):
    """
    Exponential at working precision

    Args:
        x: Real argument, |x| <= 10^6
        bits: Working precision in bits

    Returns:
        e^x as an XReal
    """
    ctx = get_context(bits)
    x = ctx.mpf(x)
    if abs(x) > MAX_EXP_ARGUMENT:
        raise PrecisionError(f"exp argument {ctx.nstr(x, 8)} outside [-1e6, 1e6]")
    return ctx.exp(x)


def quarter_root(w: int, bits: int):
    """
    Fourth root of a positive integer

    Args:
        w: Integer radicand, w >= 1
        bits: Working precision in bits

    Returns:
        w^(1/4) as an XReal
    """
    if int(w) != w or w < 1:
        raise PrecisionError(f"quarter_root expects a positive integer, got {w}")
    ctx = get_context(bits)
    return ctx.root(ctx.mpf(int(w)), 4)


def expi_turns(turns: Union[Rational, float], bits: int = None):
    """
    Unit phase e^{2 pi i * turns}

    Rational turns are reduced modulo one exactly, so phases at multiples of
    1/4 come out as exact 0 and +-1 components.

    Args:
        turns: Phase in full turns
        bits: Working precision; None returns a Python complex

    Returns:
        XComplex (or complex) of modulus one
    """
    if isinstance(turns, (int, Fraction)):
        turns = Fraction(turns) % 1
    if bits is None:
        ctx = get_context(53)
        t = ctx.mpf(turns.numerator) / turns.denominator if isinstance(turns, Fraction) else ctx.mpf(turns)
        return complex(float(ctx.cospi(2 * t)), float(ctx.sinpi(2 * t)))
    ctx = get_context(bits)
    t = ctx.mpf(turns.numerator) / turns.denominator if isinstance(turns, Fraction) else ctx.mpf(turns)
    return ctx.mpc(ctx.cospi(2 * t), ctx.sinpi(2 * t))


def ulp(x, bits: int):
    """Unit in the last place of x at the given precision."""
    ctx = get_context(bits)
    x = ctx.mpf(x)
    if x == 0:
        return ctx.ldexp(ctx.mpf(1), -bits)
    return ctx.ldexp(ctx.mpf(1), int(ctx.floor(ctx.log(abs(x), 2))) + 1 - bits)


def rounding_floor(magnitude_sum, n_terms: int, bits: int):
    """
    Worst-case accumulated rounding error of a summation

    Args:
        magnitude_sum: Sum of absolute values of the summed terms
        n_terms: Number of terms
        bits: Working precision in bits

    Returns:
        Error scale 2^{1-bits} * n_terms * magnitude_sum
    """
    ctx = get_context(bits)
    return ctx.ldexp(ctx.mpf(magnitude_sum), 1 - bits) * max(1, n_terms)


def to_decimal_string(value, digits: int = None, bits: int = 212) -> str:
    """Render an XReal as a decimal string with the precision's digits."""
    ctx = get_context(bits)
    if digits is None:
        digits = max(1, int(bits * 0.30103))
    return ctx.nstr(ctx.mpf(value), digits)


def is_extended(value) -> bool:
    """True when value is an mpmath number."""
    return hasattr(value, '_mpf_') or hasattr(value, '_mpc_')
