"""
Frame-bound scanning module for ZakFrame
Handles grid estimates along hyperbolas and obstruction certification.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config import Config, resolve_threads
from src.exceptions import DensityMismatchError, EigenclassError, ScanParameterError
from src.hermite import HermiteWindow
from src.utils import log_spaced
from src.xprec import to_decimal_string
from src.zak import QuarticSurd, ZakParameter, classify_or_raise
from src.zibulski import GridExtremes, RationalDensity, zz_grid_extremes, zz_matrix

# Setup logging
logger = logging.getLogger(__name__)

Point = Tuple[float, float]


@dataclass(frozen=True)
class GridSpec:
    """Uniform nx x ngamma grid (i/nx, j/ngamma) plus extra probe points."""

    nx: int = Config.DEFAULT_GRID
    ngamma: int = Config.DEFAULT_GRID
    probe_points: Tuple[Point, ...] = ()

    def __post_init__(self):
        if self.nx < 2 or self.ngamma < 2:
            raise ScanParameterError(f"Grid needs at least 2 points per axis, got {self.nx}x{self.ngamma}")

    def xs(self) -> np.ndarray:
        return np.arange(self.nx) / self.nx

    def gammas(self) -> np.ndarray:
        return np.arange(self.ngamma) / self.ngamma

    def with_probes(self, points: Sequence[Point]) -> 'GridSpec':
        merged = dict.fromkeys(self.probe_points)
        merged.update(dict.fromkeys((float(x), float(g)) for x, g in points))
        return replace(self, probe_points=tuple(merged))

    def refined(self, factor: int = 2) -> 'GridSpec':
        """Nested refinement: every point of this grid stays in the refined one."""
        return replace(self, nx=self.nx * factor, ngamma=self.ngamma * factor)

    def __str__(self) -> str:
        return f"{self.nx}x{self.ngamma}+{len(self.probe_points)}"


@dataclass(frozen=True)
class FrameBoundsEstimate:
    """Grid extremes of the singular values at one lattice (a, b)."""

    a: float
    b: float
    density: RationalDensity
    sqrtA_apx: float
    sqrtB_apx: float
    argmin: Point
    grid: GridSpec
    max_truncation: float
    label: str = ""
    rounding_floor: float = 0.0
    explained: bool = False

    @property
    def dropped(self) -> bool:
        return self.sqrtA_apx <= Config.DROP_THRESHOLD

    @property
    def status(self) -> str:
        """
        Row classification

        A drop is explained when a known identity or obstruction sits at this
        b; an unexplained drop at or below the rounding floor of the Zak sums
        is floor-limited.
        """
        if self.label == 'EXPECTED-INCONCLUSIVE':
            return self.label
        if not self.dropped:
            return 'no obstruction found'
        if self.explained:
            return 'drop'
        if self.sqrtA_apx <= self.rounding_floor:
            return 'floor-limited'
        return 'unexplained drop'

    def to_record(self) -> Dict[str, float]:
        return {
            'b': self.b,
            'a': self.a,
            'sqrtA': self.sqrtA_apx,
            'sqrtB': self.sqrtB_apx,
            'argmin_x': self.argmin[0],
            'argmin_gamma': self.argmin[1],
            'max_trunc': self.max_truncation,
        }


@dataclass(frozen=True)
class ObstructionPoint:
    """A lattice (a, b) where every window of the listed classes fails to be a frame."""

    index: int
    a: QuarticSurd
    b: QuarticSurd
    eigenclasses: Tuple[int, ...]
    witnesses: Tuple[Tuple[int, Tuple[Fraction, Fraction]], ...] = ()
    via_symmetry: Optional[int] = None

    @property
    def density(self) -> RationalDensity:
        product = self.a * self.b
        return RationalDensity(product.u, product.v)

    def witness_for(self, eigenclass: int) -> Optional[Tuple[Fraction, Fraction]]:
        for j, point in self.witnesses:
            if j == eigenclass:
                return point
        return None


def _surd(text: str) -> QuarticSurd:
    return QuarticSurd.parse(text)


OBSTRUCTION_POINTS: Tuple[ObstructionPoint, ...] = (
    ObstructionPoint(0, _surd('1/sqrt(2)'), _surd('1/sqrt(2)'), (2,),
                     ((2, (Fraction(3, 4), Fraction(1, 2))),)),
    ObstructionPoint(1, _surd('1/sqrt(3)'), _surd('1/sqrt(3)'), (2, 3),
                     ((2, (Fraction(5, 6), Fraction(1, 2))), (3, (Fraction(2, 3), Fraction(0))))),
    ObstructionPoint(2, _surd('1/2'), _surd('1/2'), (3,),
                     ((3, (Fraction(3, 4), Fraction(0))),)),
    ObstructionPoint(3, _surd('2/sqrt(3)'), _surd('1/sqrt(3)'), (2,),
                     ((2, (Fraction(5, 6), Fraction(1, 2))),)),
    ObstructionPoint(4, _surd('1/sqrt(3)'), _surd('2/sqrt(3)'), (2,), (), via_symmetry=3),
)


def obstruction_point(index: int) -> ObstructionPoint:
    for point in OBSTRUCTION_POINTS:
        if point.index == index:
            return point
    raise ScanParameterError(f"No obstruction point with index {index}")


@dataclass(frozen=True)
class KnownProbe:
    """A b value injected into scans because a drop is known or recorded there."""

    b: Any
    label: str
    witness: Optional[Tuple[Fraction, Fraction]] = None


NEAR_DROP_PROBES: Dict[Tuple[Tuple[int, ...], Fraction], Tuple[KnownProbe, ...]] = {
    ((2,), Fraction(1, 2)): (
        KnownProbe(2.35, 'regression: sqrtA near 1e-4'),
        KnownProbe(2.82, 'regression: sqrtA near 1e-7'),
        KnownProbe(3.5261848971734, 'EXPECTED-INCONCLUSIVE'),
    ),
}

_IDENTITY_DROPS: Dict[Tuple[Tuple[int, ...], Fraction], Tuple[KnownProbe, ...]] = {
    ((4,), Fraction(1, 2)): (
        KnownProbe(_surd('3^(-1/4)'), 'h4 identity at lambda=3^(1/4)', (Fraction(1, 2), Fraction(1, 2))),
        KnownProbe(_surd('3^(1/4)'), 'h4 identity at lambda=3^(-1/4)', (Fraction(1, 2), Fraction(1, 2))),
        KnownProbe(_surd('1/2*3^(1/4)'), 'swap of b=3^(-1/4)', (Fraction(3, 4), Fraction(0))),
        KnownProbe(_surd('1/2*3^(-1/4)'), 'swap of b=3^(1/4)', (Fraction(3, 4), Fraction(0))),
    ),
    ((5,), Fraction(1, 3)): (
        KnownProbe(_surd('27^(-1/4)'), 'h5 identity at lambda=27^(1/4)', (Fraction(0), Fraction(1, 2))),
        KnownProbe(_surd('1/3*27^(1/4)'), 'swap of b=27^(-1/4)', (Fraction(5, 6), Fraction(0))),
    ),
}


def known_probe_b(window: HermiteWindow, density: RationalDensity) -> List[KnownProbe]:
    """
    Exact b values with a known rank loss for this window along ab = p/q

    Args:
        window: Hermite window
        density: Lattice density

    Returns:
        Obstruction points of the window's class plus the identity-explained
        drops of single h_4 and h_5 windows
    """
    probes = []
    j = window.eigenclass
    for point in OBSTRUCTION_POINTS:
        if j in point.eigenclasses and point.density == density:
            probes.append(KnownProbe(point.b, f"obstruction point {point.index}", point.witness_for(j)))
    probes.extend(_IDENTITY_DROPS.get((window.orders, density.value), ()))
    return probes


def near_drop_probes(window: HermiteWindow, density: RationalDensity) -> List[KnownProbe]:
    """Recorded narrow drops without an explaining identity."""
    return list(NEAR_DROP_PROBES.get((window.orders, density.value), ()))


def witness_probes(density: RationalDensity, lattice: int = Config.PROBE_LATTICE) -> List[Point]:
    """
    Probe lattice (1/(lattice q))Z x (1/lattice)Z inside [0, 1)^2

    It contains every witness listed here and is mapped onto itself by the
    a <-> b exchange, so paired samples along a hyperbola see the same probes.
    """
    nx = lattice * density.q
    return [(i / nx, j / lattice) for i in range(nx) for j in range(lattice)]


class _RunningExtremes:
    """Smallest sigma_min and largest sigma_max seen so far, with their error scales."""

    def __init__(self):
        self.lowest = np.inf
        self.argmin: Point = (0.0, 0.0)
        self.highest = 0.0
        self.bound = 0.0
        self.floor = 0.0

    def add(self, extremes: GridExtremes, xs: np.ndarray, gammas: np.ndarray) -> None:
        """Merge extremes whose coordinates are given by xs and gammas of the same shape."""
        k = np.unravel_index(np.argmin(extremes.sigma_min), extremes.sigma_min.shape)
        if extremes.sigma_min[k] < self.lowest:
            self.lowest = float(extremes.sigma_min[k])
            self.argmin = (float(xs[k]) % 1.0, float(gammas[k]) % 1.0)
        self.highest = max(self.highest, float(extremes.sigma_max.max()))
        self.bound = max(self.bound, extremes.truncation_bound)
        self.floor = max(self.floor, extremes.rounding_floor)

    def add_grid(self, extremes: GridExtremes, xs: np.ndarray, gammas: np.ndarray) -> None:
        mesh_x, mesh_gamma = np.meshgrid(xs, gammas, indexing='ij')
        self.add(extremes, mesh_x, mesh_gamma)


def _separated_minima(sigma_min: np.ndarray, count: int, separation: int = 3,
                      candidates: int = 5000) -> List[Tuple[int, int]]:
    """Indices of the lowest cells of a periodic grid, pairwise more than separation cells apart."""
    nx, ngamma = sigma_min.shape
    picked: List[Tuple[int, int]] = []
    for flat in np.argsort(sigma_min, axis=None)[:candidates]:
        i, j = (int(v) for v in np.unravel_index(flat, sigma_min.shape))
        far = all(min(abs(i - pi), nx - abs(i - pi)) > separation
                  or min(abs(j - pj), ngamma - abs(j - pj)) > separation for pi, pj in picked)
        if far:
            picked.append((i, j))
            if len(picked) == count:
                break
    return picked


def _zoom(window: HermiteWindow, b, density: RationalDensity, start: Point, halfwidth: float,
          tol: Optional[float], running: _RunningExtremes) -> None:
    offsets = np.linspace(-1.0, 1.0, Config.REFINE_POINTS)
    shrink = 3.0 * 2.0 / (Config.REFINE_POINTS - 1)
    center = start
    for _ in range(Config.REFINE_LEVELS):
        xs = center[0] + halfwidth * offsets
        gammas = center[1] + halfwidth * offsets
        extremes = zz_grid_extremes(window, b, density, xs, gammas, tol)
        running.add_grid(extremes, xs, gammas)
        i, j = np.unravel_index(np.argmin(extremes.sigma_min), extremes.sigma_min.shape)
        center = (float(xs[i]), float(gammas[j]))
        halfwidth *= shrink


def _refine_near_drop(window: HermiteWindow, b, density: RationalDensity, tol: Optional[float],
                      running: _RunningExtremes) -> None:
    """
    Resolve a narrow drop: a dense uniform grid locates the valleys, then
    each of the lowest separated cells is zoomed into until the window
    collapses below binary64 resolution
    """
    dense = GridSpec(Config.NEAR_DROP_GRID, Config.NEAR_DROP_GRID)
    xs, gammas = dense.xs(), dense.gammas()
    extremes = zz_grid_extremes(window, b, density, xs, gammas, tol)
    running.add_grid(extremes, xs, gammas)
    for i, j in _separated_minima(extremes.sigma_min, Config.REFINE_STARTS):
        _zoom(window, b, density, (float(xs[i]), float(gammas[j])), 2.0 / Config.NEAR_DROP_GRID, tol, running)
    logger.debug(f"Refined b={float(b)!r}: sqrtA={running.lowest:.3g} at {running.argmin}")


def estimate_bounds(window: HermiteWindow, a, b, density: RationalDensity,
                    grid: Optional[GridSpec] = None, tol: Optional[float] = None,
                    label: str = "", refine: bool = False, explained: bool = False) -> FrameBoundsEstimate:
    """
    Estimate the frame bounds of G(window, a, b) on a sampling grid

    Args:
        window: Hermite window
        a: Translation parameter
        b: Modulation parameter (exact surd or float)
        density: Declared density p/q = ab
        grid: Sampling grid, default 51x51 without probes
        tol: Zak truncation tolerance
        label: Row label carried into the estimate
        refine: Also search a dense grid and zoom into its lowest cells;
            this can only lower sqrtA and raise sqrtB
        explained: A known identity or obstruction accounts for a drop here

    Returns:
        FrameBoundsEstimate with the minimum of sigma_min and maximum of
        sigma_max over every evaluated point
    """
    grid = grid or GridSpec()
    if not density.matches(float(a), float(b)):
        raise DensityMismatchError(f"a*b = {float(a) * float(b):.15g} does not match density {density}")
    running = _RunningExtremes()
    xs, gammas = grid.xs(), grid.gammas()
    running.add_grid(zz_grid_extremes(window, b, density, xs, gammas, tol), xs, gammas)
    if grid.probe_points:
        px = np.array([p[0] for p in grid.probe_points])
        pg = np.array([p[1] for p in grid.probe_points])
        running.add(zz_grid_extremes(window, b, density, px, pg, tol, pointwise=True), px, pg)
    if refine:
        _refine_near_drop(window, b, density, tol, running)
    return FrameBoundsEstimate(float(a), float(b), density, running.lowest, running.highest, running.argmin,
                               grid, running.bound, label, rounding_floor=running.floor, explained=explained)


@dataclass(frozen=True)
class _ScanTask:
    value: float
    parameter: ZakParameter
    label: str = ""
    refine: bool = False
    explained: bool = False


def _b_tasks(window, density, b_min, b_max, n_samples, probe_b, include_known) -> List[_ScanTask]:
    tasks = [_ScanTask(float(b), ZakParameter(approx=float(b))) for b in log_spaced(b_min, b_max, n_samples)]
    extra = [_ScanTask(0.0, ZakParameter.coerce(b), 'probe') for b in probe_b]
    if include_known:
        known = [_ScanTask(0.0, ZakParameter.coerce(p.b), p.label, explained=True)
                 for p in known_probe_b(window, density)]
        near = [_ScanTask(0.0, ZakParameter.coerce(p.b), p.label, refine=True)
                for p in near_drop_probes(window, density)]
        extra = known + near + extra
    seen = set()
    for task in extra:
        value = float(task.parameter)
        key = round(value, 12)
        if not b_min <= value <= b_max or key in seen:
            continue
        seen.add(key)
        tasks.append(replace(task, value=value))
    tasks.sort(key=lambda task: (task.value, task.label))
    return tasks


def _partner_a(b: ZakParameter, density: RationalDensity):
    if b.is_exact:
        return b.surd.reciprocal() * density.value
    return (density.p / density.q) / float(b)


def scan_hyperbola(window: HermiteWindow, density: RationalDensity, b_min: float, b_max: float,
                   n_samples: int, grid: Optional[GridSpec] = None, tol: Optional[float] = None,
                   probe_b: Sequence = (), include_known: bool = True, lattice_probes: bool = True,
                   threads: Optional[int] = None) -> List[FrameBoundsEstimate]:
    """
    Sweep the hyperbola ab = p/q over log-spaced b values

    Args:
        window: Hermite window
        density: Lattice density p/q
        b_min: Smallest b
        b_max: Largest b
        n_samples: Number of log-spaced samples
        grid: Sampling grid
        tol: Zak truncation tolerance
        probe_b: Extra exact or approximate b values to include
        include_known: Inject known obstruction and drop b values; recorded
            near-drop values are refined on a dense grid
        lattice_probes: Append the witness probe lattice to the grid
        threads: Worker threads; None reads ZAKFRAME_THREADS

    Returns:
        Estimates ordered by b
    """
    if not 0 < b_min < b_max:
        raise ScanParameterError(f"Need 0 < b_min < b_max, got {b_min}, {b_max}")
    if n_samples < 2:
        raise ScanParameterError(f"Need at least two samples, got {n_samples}")
    grid = grid or GridSpec()
    if lattice_probes:
        grid = grid.with_probes(witness_probes(density))
    tasks = _b_tasks(window, density, b_min, b_max, n_samples, probe_b, include_known)

    def run(task: _ScanTask):
        return estimate_bounds(window, _partner_a(task.parameter, density), task.parameter, density, grid, tol,
                               task.label, refine=task.refine, explained=task.explained)

    workers = resolve_threads(threads)
    logger.info(f"Scanning {window} along ab={density}: {len(tasks)} b values, grid {grid}, {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        estimates = list(executor.map(run, tasks))
    drops = [e for e in estimates if e.dropped]
    logger.info(f"Scan finished: {len(drops)} of {len(estimates)} samples have sqrtA <= {Config.DROP_THRESHOLD:g}")
    for estimate in estimates:
        if estimate.label == 'EXPECTED-INCONCLUSIVE':
            logger.warning(f"b={estimate.b!r} is an expected-inconclusive probe: sqrtA={estimate.sqrtA_apx:.3g}")
        elif estimate.dropped:
            logger.info(f"b={estimate.b!r}: {estimate.status}, sqrtA={estimate.sqrtA_apx:.3g} "
                        f"(rounding floor {estimate.rounding_floor:.3g})")
    return estimates


@dataclass(frozen=True)
class CertificationReport:
    """Outcome of a witness evaluation at one obstruction point."""

    point: int
    a: str
    b: str
    window: str
    eigenclass: Optional[int]
    status: str
    witness: Optional[Tuple[Fraction, Fraction]] = None
    residual: Any = None
    truncation_bound: Any = None
    vanishing_row: Optional[int] = None
    precision_bits: Optional[int] = None
    tolerance: Optional[float] = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status == 'PASS'

    def to_dict(self) -> Dict[str, Any]:
        bits = self.precision_bits or 53
        return {
            'point': self.point,
            'a': self.a,
            'b': self.b,
            'window': self.window,
            'status': self.status,
            'witness': None if self.witness is None else [str(c) for c in self.witness],
            'residual': None if self.residual is None else to_decimal_string(self.residual, 10, bits),
            'truncation_bound': (None if self.truncation_bound is None
                                 else to_decimal_string(self.truncation_bound, 6, 53)),
            'vanishing_row': self.vanishing_row,
            'note': self.note,
        }


def certify_obstruction(window: HermiteWindow, point: ObstructionPoint, tol=None,
                        bits: Optional[int] = None, force: bool = False) -> CertificationReport:
    """
    Certify that the Zibulski-Zeevi matrix loses rank at the point's witness

    Args:
        window: Hermite window with an eigenclass
        point: Obstruction point
        tol: Residual tolerance, default Config.CERTIFICATION_TOLERANCE
        bits: Working precision, default Config.CERTIFICATION_PRECISION
        force: Evaluate even when the point does not apply to the window's
            class (the report is then a negative control)

    Returns:
        CertificationReport whose residual is the smallest row maximum
    """
    tol = Config.CERTIFICATION_TOLERANCE if tol is None else tol
    bits = bits or Config.CERTIFICATION_PRECISION
    j = classify_or_raise(window)
    applicable = j in point.eigenclasses
    if not applicable and not force:
        raise EigenclassError(
            f"Obstruction point {point.index} applies to H_{'/H_'.join(map(str, point.eigenclasses))}, "
            f"not to window {window} in H_{j}")
    if point.via_symmetry is not None:
        source = certify_obstruction(window, obstruction_point(point.via_symmetry), tol, bits, force)
        return replace(source, point=point.index, a=str(point.a), b=str(point.b),
                       note=f"via point {point.via_symmetry} and the a<->b symmetry")
    witness = point.witness_for(j)
    if witness is None:
        witness = point.witnesses[0][1]
    sample = zz_matrix(window, point.b, point.density, witness[0], witness[1], tol / 4, bits)
    rows = sample.row_magnitudes()
    row = min(range(len(rows)), key=lambda k: rows[k])
    residual = rows[row]
    passed = applicable and residual <= tol
    note = "" if applicable else f"forced evaluation outside H_{'/H_'.join(map(str, point.eigenclasses))}"
    logger.debug(f"Point {point.index} for {window}: residual {to_decimal_string(residual, 6, bits)}")
    return CertificationReport(point.index, str(point.a), str(point.b), str(window), j,
                               'PASS' if passed else 'FAIL', witness, residual, sample.truncation_bound,
                               row, bits, tol, note)


def certify_all(window: HermiteWindow, tol=None, bits: Optional[int] = None) -> List[CertificationReport]:
    """
    Run every obstruction point against a window

    Points outside the window's class are SKIPPED, except that odd windows
    on ab = p/(p+1) are reported COVERED by the odd-window obstruction.

    Returns:
        One report per obstruction point in index order
    """
    j = classify_or_raise(window)
    reports = []
    for point in OBSTRUCTION_POINTS:
        density = point.density
        if j in point.eigenclasses:
            reports.append(certify_obstruction(window, point, tol, bits))
        elif window.parity == -1 and density.q == density.p + 1:
            reports.append(CertificationReport(
                point.index, str(point.a), str(point.b), str(window), j, 'COVERED',
                note=f"odd windows are never frames on ab = {density}"))
        else:
            classes = '/'.join(f"H_{c}" for c in point.eigenclasses)
            reports.append(CertificationReport(
                point.index, str(point.a), str(point.b), str(window), j, 'SKIPPED',
                note=f"applies to {classes}"))
    passed = sum(r.passed for r in reports)
    logger.info(f"Obstruction certification for {window}: {passed} PASS of {len(reports)} points")
    return reports
