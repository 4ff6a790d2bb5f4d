"""
High-precision verification of zero identities of Zak transforms of Hermite windows

Every catalog case states Z_lam g(x, gamma) = 0 for an exact quartic-surd lam
and rational (x, gamma). Verification evaluates the series in an mpmath tier
with a certified tail bound and compares the residual with the tolerance.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.config import Config, resolve_threads
from src.exceptions import WindowSpecError
from src.hermite import HermiteWindow, window_eval
from src.xprec import expi_turns, get_context, to_decimal_string, xreal
from src.zak import QuarticSurd, ZakParameter, choose_truncation, reduce_point, zak_eval

# Setup logging
logger = logging.getLogger(__name__)

PROVEN = 'PROVEN'
VERIFIED_NUMERICALLY = 'VERIFIED-NUMERICALLY'

FAMILIES: Dict[str, Dict[str, str]] = {
    'I1': {'description': 'Z_sqrt(2) h_{4m+2}(p/4, 1/2) = 0 for p in {1, 3}', 'status': PROVEN},
    'I2': {'description': 'Z_sqrt(3) h_{4m+2}(p/6, 1/2) = 0 for p in {1, 5}', 'status': PROVEN},
    'I3': {'description': 'Z_sqrt(s) h_{4m+3}(p/s, 0) = 0 for s in {2, 3, 4}, 0 <= p < s', 'status': PROVEN},
    'I4': {'description': 'I1-I3 zero lattices for seeded finite H_2 and H_3 windows', 'status': PROVEN},
    'I5': {'description': 'Z_{3^(1/4)} h_4(0, 1/2) = 0', 'status': VERIFIED_NUMERICALLY},
    'I6': {'description': 'Z_{3^(-1/4)} h_4(0, 1/2) = 0', 'status': VERIFIED_NUMERICALLY},
    'I7': {'description': 'Z_{27^(1/4)} h_5(p/3, 1/2) = 0 for p in {0, 1, 2}', 'status': VERIFIED_NUMERICALLY},
}

SQRT2 = QuarticSurd(1, 1, 4)
SQRT3 = QuarticSurd(1, 1, 9)


@dataclass(frozen=True)
class IdentityCase:
    """One zero identity Z_lam window(x, gamma) = 0."""

    id: str
    params: Tuple[Tuple[str, Any], ...]
    window: HermiteWindow
    lam: QuarticSurd
    x: Fraction
    gamma: Fraction

    @property
    def status(self) -> str:
        return FAMILIES.get(self.id, {}).get('status', VERIFIED_NUMERICALLY)

    def params_dict(self) -> Dict[str, Any]:
        values = {key: value for key, value in self.params}
        values.update({'window': str(self.window), 'lambda': str(self.lam),
                       'x': str(self.x), 'gamma': str(self.gamma)})
        return values

    def __str__(self) -> str:
        extra = ','.join(f"{k}={v}" for k, v in self.params)
        return f"{self.id}[{extra}]" if extra else self.id


@dataclass(frozen=True)
class VerificationReport:
    """Residual of one identity at a given precision."""

    case: IdentityCase
    residual: Any
    truncation_bound: Any
    precision_bits: int
    terms_used: int
    tolerance: float
    verdict: str

    @property
    def passed(self) -> bool:
        return self.verdict == 'PASS'

    def to_json(self) -> Dict[str, Any]:
        return {
            'id': self.case.id,
            'params': self.case.params_dict(),
            'precision_bits': self.precision_bits,
            'residual': to_decimal_string(self.residual, 12, self.precision_bits),
            'truncation_bound': to_decimal_string(self.truncation_bound, 6, 53),
            'terms_used': self.terms_used,
            'verdict': self.verdict,
            'status': self.case.status,
        }


def _class_windows(eigenclass: int, count: int, rng: np.random.Generator) -> List[HermiteWindow]:
    orders = (eigenclass, eigenclass + 4, eigenclass + 8)
    windows = []
    for _ in range(count):
        coefficients = rng.uniform(-1.0, 1.0, size=len(orders))
        windows.append(HermiteWindow.from_terms(zip(orders, (float(c) for c in coefficients))))
    return windows


def catalog(m_values: Sequence[int] = Config.CATALOG_M_VALUES,
            class_windows: int = Config.CATALOG_CLASS_WINDOWS,
            seed: int = Config.CATALOG_SEED) -> List[IdentityCase]:
    """
    Enumerate every identity case deterministically

    Args:
        m_values: Values of m for the h_{4m+2} and h_{4m+3} families
        class_windows: Number of seeded random windows per class for I4
        seed: Seed for the I4 window coefficients

    Returns:
        Cases in family order
    """
    cases = []
    for m in m_values:
        for p in (1, 3):
            cases.append(IdentityCase('I1', (('m', m), ('p', p)), HermiteWindow.single(4 * m + 2),
                                      SQRT2, Fraction(p, 4), Fraction(1, 2)))
    for m in m_values:
        for p in (1, 5):
            cases.append(IdentityCase('I2', (('m', m), ('p', p)), HermiteWindow.single(4 * m + 2),
                                      SQRT3, Fraction(p, 6), Fraction(1, 2)))
    for m in m_values:
        for s in (2, 3, 4):
            for p in range(s):
                cases.append(IdentityCase('I3', (('m', m), ('s', s), ('p', p)), HermiteWindow.single(4 * m + 3),
                                          QuarticSurd.of(1, 1, s * s), Fraction(p, s), Fraction(0)))

    rng = np.random.default_rng(seed)
    for index, window in enumerate(_class_windows(2, class_windows, rng)):
        for lam, denominator, numerators in ((SQRT2, 4, (1, 2, 3)), (SQRT3, 6, (1, 3, 5))):
            for p in numerators:
                cases.append(IdentityCase('I4', (('class', 2), ('window_index', index), ('p', p)), window,
                                          lam, Fraction(p, denominator), Fraction(1, 2)))
    for index, window in enumerate(_class_windows(3, class_windows, rng)):
        for s in (2, 3, 4):
            for p in range(s):
                cases.append(IdentityCase('I4', (('class', 3), ('window_index', index), ('s', s), ('p', p)),
                                          window, QuarticSurd.of(1, 1, s * s), Fraction(p, s), Fraction(0)))

    h4 = HermiteWindow.single(4)
    cases.append(IdentityCase('I5', (), h4, QuarticSurd(1, 1, 3), Fraction(0), Fraction(1, 2)))
    cases.append(IdentityCase('I6', (), h4, QuarticSurd(1, 3, 27), Fraction(0), Fraction(1, 2)))
    for p in range(3):
        cases.append(IdentityCase('I7', (('p', p),), HermiteWindow.single(5), QuarticSurd(1, 1, 27),
                                  Fraction(p, 3), Fraction(1, 2)))
    return cases


def families() -> List[Dict[str, Any]]:
    """Family metadata with the case count of the default catalog."""
    counts: Dict[str, int] = {}
    for case in catalog():
        counts[case.id] = counts.get(case.id, 0) + 1
    return [{'id': family, 'cases': counts.get(family, 0), **meta} for family, meta in FAMILIES.items()]


def select_cases(selectors: Iterable[str], cases: Optional[List[IdentityCase]] = None) -> List[IdentityCase]:
    """
    Filter the catalog by family ids; ``all`` selects everything

    Args:
        selectors: Family ids such as ``I1`` (case-insensitive) or ``all``
        cases: Catalog to filter, default catalog()
    """
    cases = catalog() if cases is None else cases
    wanted = {s.strip().upper() for s in selectors}
    if not wanted or 'ALL' in wanted:
        return list(cases)
    unknown = wanted - set(FAMILIES)
    if unknown:
        raise WindowSpecError(f"Unknown identity families: {', '.join(sorted(unknown))}")
    return [case for case in cases if case.id in wanted]


def verify(case: IdentityCase, precision_bits: int = Config.DEFAULT_PRECISION,
           tolerance: Optional[float] = None) -> VerificationReport:
    """
    Verify one identity

    Args:
        case: Identity case with exact lam and rational point
        precision_bits: Working precision tier
        tolerance: Residual tolerance, default per tier

    Returns:
        VerificationReport; PASS iff residual <= max(tolerance, 4 * truncation_bound)
    """
    if tolerance is None:
        tolerance = Config.DEFAULT_TOLERANCES[precision_bits]
    evaluation = zak_eval(case.window, ZakParameter(surd=case.lam), case.x, case.gamma,
                          tolerance / 4, precision_bits)
    residual = evaluation.magnitude
    passed = residual <= max(tolerance, 4 * evaluation.truncation_bound)
    report = VerificationReport(case, residual, evaluation.truncation_bound, precision_bits,
                                evaluation.terms_used, tolerance, 'PASS' if passed else 'FAIL')
    logger.debug(f"{case}: residual {to_decimal_string(residual, 6, precision_bits)} -> {report.verdict}")
    return report


def verify_catalog(cases: Optional[List[IdentityCase]] = None, precision_bits: int = Config.DEFAULT_PRECISION,
                   tolerance: Optional[float] = None, threads: Optional[int] = None) -> List[VerificationReport]:
    """
    Verify many cases concurrently; reports come back in input order

    Args:
        cases: Cases to verify, default the full catalog
        precision_bits: Working precision tier
        tolerance: Residual tolerance
        threads: Worker threads; None reads ZAKFRAME_THREADS
    """
    cases = catalog() if cases is None else cases
    with ThreadPoolExecutor(max_workers=resolve_threads(threads)) as executor:
        reports = list(executor.map(lambda case: verify(case, precision_bits, tolerance), cases))
    failed = [r for r in reports if not r.passed]
    logger.info(f"Verified {len(reports)} identities at {precision_bits} bits: {len(failed)} failed")
    return reports


def negative_control(window: HermiteWindow, lam, x, gamma, precision_bits: int = 106):
    """
    |Z_lam window(x, gamma)| at high precision

    Args:
        window: Any Hermite window
        lam: Zak parameter (QuarticSurd or anything ZakParameter accepts)
        x: Rational time coordinate
        gamma: Rational frequency coordinate
        precision_bits: Working precision tier

    Returns:
        Magnitude as an XReal
    """
    lam = ZakParameter.coerce(lam)
    return zak_eval(window, lam, Fraction(x), Fraction(gamma), None, precision_bits).magnitude


@dataclass(frozen=True)
class SplitSums:
    """Even-k part of a Zak series and the negated odd-k part."""

    even: Any
    odd: Any

    @property
    def difference(self):
        return abs(self.even - self.odd)


def split_sums(case: IdentityCase, precision_bits: int = 106) -> SplitSums:
    """
    Split the series of a case into even and odd k

    The identity holds exactly when the even-k sum equals minus the odd-k
    sum, so ``odd`` is returned negated.

    Args:
        case: Identity case
        precision_bits: Working precision tier

    Returns:
        SplitSums with the quasi-periodic phase applied to both halves
    """
    ctx = get_context(precision_bits)
    tol = Config.DEFAULT_TOLERANCES[precision_bits]
    x0, gamma0, phase = reduce_point(case.x, case.gamma, precision_bits)
    K, _ = choose_truncation(case.window, float(case.lam), tol / 4, x0)
    lam = case.lam.value(precision_bits)
    x0_x = xreal(x0, precision_bits)
    halves = [ctx.mpc(0), ctx.mpc(0)]
    for k in range(-K, K + 1):
        sample = window_eval(case.window, lam * (x0_x + k), precision_bits)
        halves[k % 2] += sample * expi_turns(-k * gamma0, precision_bits)
    scale = ctx.sqrt(lam) * phase
    return SplitSums(scale * halves[0], -scale * halves[1])
