"""
Exception types raised by the ZakFrame library
"""


class ZakFrameError(ValueError):
    """Base class for all library errors."""


class PrecisionError(ZakFrameError):
    """Unsupported precision tier or an argument outside the supported range."""


class PrecisionMismatchError(ZakFrameError):
    """An extended-precision value was passed to a native-precision evaluation."""


class UnsupportedOrderError(ZakFrameError):
    """Hermite order outside the supported range."""


class WindowSpecError(ZakFrameError):
    """A window or parameter specification string could not be parsed."""


class EigenclassError(ZakFrameError):
    """The window has no Fourier eigenclass, or the wrong one."""


class ToleranceBelowPrecisionError(ZakFrameError):
    """The requested tolerance is below the rounding floor of the precision."""


class ZakToleranceError(ZakFrameError):
    """Adaptive truncation could not reach the requested tolerance."""


class DensityMismatchError(ZakFrameError):
    """Lattice parameters do not match the declared rational density."""


class NonFiniteMatrixError(ZakFrameError):
    """A Zibulski-Zeevi matrix contains NaN or infinite entries."""


class ScanParameterError(ZakFrameError):
    """A grid, sampling range or obstruction index is out of range."""
