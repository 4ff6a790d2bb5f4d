"""
ZakFrame API Usage Examples
This file demonstrates how to use ZakFrame programmatically
"""

from fractions import Fraction

from src.framescan import GridSpec, certify_all, scan_hyperbola
from src.hermite import HermiteWindow, hermite_eval
from src.identities import negative_control, select_cases, verify_catalog
from src.xprec import to_decimal_string
from src.zak import QuarticSurd, zak_eval
from src.zibulski import RationalDensity


def example_hermite_values():
    """Example: Evaluate Hermite functions in both precisions."""
    print("Hermite Function Example")
    print("-" * 40)
    for n in (0, 2, 5):
        print(f"  h_{n}(0.3) = {hermite_eval(n, 0.3):+.15f}")
    print()


def example_zak_transform():
    """Example: A Zak value and a known zero."""
    print("Zak Transform Example")
    print("-" * 40)
    gaussian = HermiteWindow.single(0)
    value = zak_eval(gaussian, QuarticSurd.parse('sqrt(2)'), 0.0, 0.0).value
    print(f"  Z_sqrt(2) h_0(0, 0) = {value.real:.7f}")

    zero = zak_eval(HermiteWindow.single(2), QuarticSurd.parse('sqrt(2)'), Fraction(1, 4), Fraction(1, 2),
                    bits=212)
    print(f"  |Z_sqrt(2) h_2(1/4, 1/2)| = {to_decimal_string(zero.magnitude, 6, 212)}")
    control = negative_control(gaussian, 'sqrt(2)', '1/4', '1/2')
    print(f"  |Z_sqrt(2) h_0(1/4, 1/2)| = {to_decimal_string(control, 8, 106)}")
    print()


def example_identity_catalog():
    """Example: Verify two identity families."""
    print("Identity Catalog Example")
    print("-" * 40)
    reports = verify_catalog(select_cases(['I1', 'I7']), precision_bits=106)
    for report in reports:
        print(f"  {str(report.case):24s} {report.verdict}  residual "
              f"{to_decimal_string(report.residual, 3, 106)}")
    print()


def example_obstructions():
    """Example: Certify obstruction points for h_3."""
    print("Obstruction Example")
    print("-" * 40)
    for report in certify_all(HermiteWindow.single(3)):
        print(f"  point {report.point}: {report.status} {report.note}")
    print()


def example_scan():
    """Example: A coarse frame-bound scan of h_4 along ab = 1/2."""
    print("Frame Bound Scan Example")
    print("-" * 40)
    estimates = scan_hyperbola(HermiteWindow.single(4), RationalDensity(1, 2), 0.5, 1.0, 5, GridSpec(12, 12))
    for estimate in estimates:
        print(f"  b={estimate.b:.6f}  sqrtA={estimate.sqrtA_apx:.3e}  sqrtB={estimate.sqrtB_apx:.3f}  "
              f"{estimate.label}")
    print()


if __name__ == "__main__":
    example_hermite_values()
    example_zak_transform()
    example_identity_catalog()
    example_obstructions()
    example_scan()
