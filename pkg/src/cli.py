"""
ZakFrame command-line interface

Subcommands evaluate Hermite windows, scan frame bounds along hyperbolas,
reproduce the published scans, verify the identity catalog and certify
obstruction points. Results go to stdout or files, diagnostics to stderr.

Exit codes: 0 success, 1 verification or certification failure, 2 usage
error, 3 I/O error.
"""

import argparse
import logging
import os
import sys
from typing import Dict, List, Optional, Tuple

from dotenv import dotenv_values

from src import __version__
from src.config import Config
from src.exceptions import ZakFrameError
from src.framescan import GridSpec, certify_all, scan_hyperbola
from src.hermite import HermiteWindow, window_eval
from src.identities import negative_control, select_cases, verify_catalog
from src.utils import (
    export_scan_csv, load_presets, parse_fraction, parse_point, plot_scan, write_gnuplot_script, write_json_lines,
)
from src.xprec import to_decimal_string, xreal
from src.zak import ZakParameter
from src.zibulski import RationalDensity

# Setup logging
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

_TRUE = {'1', 'true', 'yes', 'on'}


def _add_grid_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--grid', type=int, help=f"grid points per axis (default {Config.DEFAULT_GRID})")
    parser.add_argument('--nx', type=int, help="grid points along x (overrides --grid)")
    parser.add_argument('--ngamma', type=int, help="grid points along gamma (overrides --grid)")
    parser.add_argument('--tol', type=float, default=Config.DEFAULT_ZAK_TOL, help="Zak truncation tolerance")


def _add_output_options(parser: argparse.ArgumentParser, default_name: Optional[str]) -> None:
    default = os.path.join(Config.OUTPUT_DIR, default_name) if default_name else None
    parser.add_argument('--out', default=default, help="CSV output path")
    parser.add_argument('--gnuplot', help="write a gnuplot script next to the CSV")
    parser.add_argument('--plot', help="render a PNG with matplotlib")
    parser.add_argument('--title', default="", help="plot title")


def build_parser() -> Tuple[argparse.ArgumentParser, Dict[str, argparse.ArgumentParser]]:
    """
    Build the argument parser

    Returns:
        (main parser, subparsers by command name)
    """
    parser = argparse.ArgumentParser(prog='zakframe',
                                     description="Zak transforms and Gabor frame bounds of Hermite windows")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('--config', help="key = value file supplying defaults for any flag")
    parser.add_argument('--log-level', default=Config.LOG_LEVEL, help="logging level (default from ZAKFRAME_LOG_LEVEL)")
    parser.add_argument('--threads', type=int, help="worker threads (default ZAKFRAME_THREADS, 0 = auto)")
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True
    sub = {}

    p = commands.add_parser('eval', help="evaluate a Hermite window at a point")
    p.add_argument('--window', help="window spec: n or n0:c0,n1:c1,...")
    p.add_argument('--x', help="evaluation point (decimal or p/q)")
    p.add_argument('--precision', type=int, choices=Config.PRECISION_TIERS,
                   help="extended precision in bits (default native binary64)")
    p.add_argument('--digits', type=int, help="significant digits for extended output")
    sub['eval'] = p

    p = commands.add_parser('scan', help="estimate frame bounds along ab = p/q")
    p.add_argument('--window', help="window spec")
    p.add_argument('--density', help="lattice density p/q")
    p.add_argument('--b-min', type=float, default=0.125)
    p.add_argument('--b-max', type=float, default=4.0)
    p.add_argument('--samples', type=int, default=Config.DEFAULT_SAMPLES)
    p.add_argument('--probe-b', action='append', default=[], help="extra b value (surd or decimal); repeatable")
    p.add_argument('--no-known', action='store_true', help="do not inject known drop locations")
    p.add_argument('--no-lattice', action='store_true', help="do not append the witness probe lattice")
    _add_grid_options(p)
    _add_output_options(p, 'scan.csv')
    sub['scan'] = p

    p = commands.add_parser('fig2', help="h_2 along ab = 1/2 for b in [1/8, 4]")
    p.add_argument('--samples', type=int)
    _add_grid_options(p)
    _add_output_options(p, 'fig2.csv')
    sub['fig2'] = p

    p = commands.add_parser('fig3', help="h_4 along ab = 1/2 and h_5 along ab = 1/3")
    p.add_argument('--samples', type=int)
    p.add_argument('--out-dir', default=Config.OUTPUT_DIR, help="directory for the CSV and gnuplot files")
    p.add_argument('--plot', action='store_true', help="also render PNG files")
    _add_grid_options(p)
    sub['fig3'] = p

    p = commands.add_parser('verify', help="verify identity families")
    p.add_argument('selectors', nargs='*', default=['all'], help="family ids (I1..I7) or all")
    p.add_argument('--precision', type=int, choices=Config.PRECISION_TIERS, default=Config.DEFAULT_PRECISION)
    p.add_argument('--tol', type=float, help="residual tolerance (default per precision)")
    p.add_argument('--out', help="JSON-lines output file (default stdout)")
    sub['verify'] = p

    p = commands.add_parser('obstructions', help="certify the obstruction points for a window")
    p.add_argument('--window', help="window spec")
    p.add_argument('--precision', type=int, choices=Config.PRECISION_TIERS, default=Config.CERTIFICATION_PRECISION)
    p.add_argument('--tol', type=float, default=Config.CERTIFICATION_TOLERANCE)
    sub['obstructions'] = p

    p = commands.add_parser('identity', help="|Z_lambda w(x, gamma)| for a manual probe")
    p.add_argument('--window', help="window spec")
    p.add_argument('--lambda', dest='lam', help="Zak parameter, e.g. sqrt(2) or 1/3*27^(1/4)")
    p.add_argument('--x', default='0', help="rational x")
    p.add_argument('--gamma', default='0', help="rational gamma")
    p.add_argument('--at', metavar='X,GAMMA', help="rational point; overrides --x and --gamma")
    p.add_argument('--precision', type=int, choices=Config.PRECISION_TIERS, default=106)
    sub['identity'] = p
    return parser, sub


def _config_defaults(path: str, parsers: List[argparse.ArgumentParser]) -> None:
    if not os.path.isfile(path):
        raise FileNotFoundError(f"Config file not found: {path}")
    values = dotenv_values(path)
    for parser in parsers:
        actions = {a.dest: a for a in parser._actions}
        defaults = {}
        for key, value in values.items():
            dest = key.strip().replace('-', '_')
            if dest == 'lambda':
                dest = 'lam'
            action = actions.get(dest)
            if action is None or value is None:
                continue
            if isinstance(action, argparse._StoreTrueAction):
                defaults[dest] = value.strip().lower() in _TRUE
            elif isinstance(action, argparse._AppendAction) or action.nargs == '*':
                defaults[dest] = [v for v in value.replace(',', ' ').split() if v]
            else:
                defaults[dest] = value
        parser.set_defaults(**defaults)
    logger.debug(f"Loaded defaults from {path}: {sorted(values)}")


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse arguments, applying ``--config`` file values as defaults."""
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        _config_defaults(args.config, [parser, sub[args.command]])
        args = parser.parse_args(argv)
    args.parser = sub[args.command]
    return args


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name, None) in (None, ''):
            args.parser.error(f"--{name.replace('_', '-')} is required")


def _grid(args: argparse.Namespace) -> GridSpec:
    size = args.grid or Config.DEFAULT_GRID
    return GridSpec(args.nx or size, args.ngamma or size)


def _write_scan(estimates, out: str, gnuplot: Optional[str], plot: Optional[str], title: str) -> None:
    records = [e.to_record() for e in estimates]
    export_scan_csv(records, out)
    if gnuplot:
        write_gnuplot_script(out, gnuplot, title)
    if plot:
        plot_scan(records, plot, title)
    drops = [e for e in estimates if e.dropped]
    print(f"{len(records)} rows written to {out}; {len(drops)} with sqrtA <= {Config.DROP_THRESHOLD:g}")
    for e in drops:
        note = f" ({e.label})" if e.label and e.label != e.status else ""
        print(f"  b={e.b:.12g} sqrtA={e.sqrtA_apx:.3g} {e.status}{note}")


def cmd_eval(args: argparse.Namespace) -> int:
    """Print a window value at one point."""
    _require(args, 'window', 'x')
    window = HermiteWindow.parse(args.window)
    x = parse_fraction(args.x)
    if args.precision is None:
        print("%.17g" % (window_eval(window, float(x)) + 0.0))
    else:
        value = window_eval(window, xreal(x, args.precision), args.precision)
        print(to_decimal_string(value, args.digits, args.precision))
    return EXIT_OK


def _run_scan(window_spec: str, density_spec: str, b_min: float, b_max: float, samples: int,
              args: argparse.Namespace, probe_b=(), include_known: bool = True, lattice: bool = True):
    window = HermiteWindow.parse(window_spec)
    density = RationalDensity.parse(density_spec)
    return scan_hyperbola(window, density, b_min, b_max, samples, _grid(args), args.tol,
                          probe_b, include_known, lattice, args.threads)


def cmd_scan(args: argparse.Namespace) -> int:
    """Scan frame bounds along a hyperbola and write CSV output."""
    _require(args, 'window', 'density')
    estimates = _run_scan(args.window, args.density, args.b_min, args.b_max, args.samples, args,
                          args.probe_b, not args.no_known, not args.no_lattice)
    _write_scan(estimates, args.out, args.gnuplot, args.plot, args.title)
    return EXIT_OK


def _run_preset(preset: Dict, args: argparse.Namespace):
    samples = args.samples or preset['samples']
    return _run_scan(preset['window'], preset['density'], preset['b_min'], preset['b_max'], samples, args,
                     preset.get('probe_b', ()))


def cmd_fig2(args: argparse.Namespace) -> int:
    """Reproduce the h_2 scan along ab = 1/2."""
    preset = load_presets()['fig2']
    estimates = _run_preset(preset, args)
    title = args.title or preset.get('title', '')
    _write_scan(estimates, args.out, args.gnuplot, args.plot, title)
    return EXIT_OK


def cmd_fig3(args: argparse.Namespace) -> int:
    """Reproduce the h_4 and h_5 scans."""
    for preset in load_presets()['fig3']:
        estimates = _run_preset(preset, args)
        base = os.path.join(args.out_dir, preset['name'])
        _write_scan(estimates, base + '.csv', base + '.gp', base + '.png' if args.plot else None,
                    preset.get('title', ''))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Verify identity families and emit JSON lines."""
    cases = select_cases(args.selectors)
    reports = verify_catalog(cases, args.precision, args.tol, args.threads)
    lines = [r.to_json() for r in reports]
    if args.out:
        with open(args.out, 'w') as f:
            write_json_lines(lines, f)
    else:
        write_json_lines(lines, sys.stdout)
    passed = sum(r.passed for r in reports)
    numeric = sum(r.case.status == 'VERIFIED-NUMERICALLY' for r in reports)
    print(f"{passed}/{len(reports)} PASS at {args.precision} bits ({numeric} verified numerically only)",
          file=sys.stderr)
    return EXIT_OK if passed == len(reports) else EXIT_FAILED


def cmd_obstructions(args: argparse.Namespace) -> int:
    """Certify every obstruction point applicable to a window."""
    _require(args, 'window')
    window = HermiteWindow.parse(args.window)
    reports = certify_all(window, args.tol, args.precision)
    for report in reports:
        line = f"point {report.point} (a={report.a}, b={report.b}): {report.status}"
        if report.witness is not None:
            data = report.to_dict()
            line += f" witness=({data['witness'][0]}, {data['witness'][1]}) residual={data['residual']}"
        if report.note:
            line += f" [{report.note}]"
        print(line)
    if not any(r.status == 'PASS' for r in reports):
        print(f"no obstruction point applies to H_{window.eigenclass}", file=sys.stderr)
    return EXIT_FAILED if any(r.status == 'FAIL' for r in reports) else EXIT_OK


def cmd_identity(args: argparse.Namespace) -> int:
    """Print |Z_lambda w(x, gamma)| at a user-chosen point."""
    _require(args, 'window', 'lam')
    window = HermiteWindow.parse(args.window)
    lam = ZakParameter.coerce(args.lam)
    if args.at:
        x, gamma = parse_point(args.at)
    else:
        x, gamma = parse_fraction(args.x), parse_fraction(args.gamma)
    magnitude = negative_control(window, lam, x, gamma, args.precision)
    print(to_decimal_string(magnitude, 20, args.precision))
    return EXIT_OK


COMMANDS = {
    'eval': cmd_eval,
    'scan': cmd_scan,
    'fig2': cmd_fig2,
    'fig3': cmd_fig3,
    'verify': cmd_verify,
    'obstructions': cmd_obstructions,
    'identity': cmd_identity,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    try:
        args = parse_args(argv)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.INFO), stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except ZakFrameError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == '__main__':
    sys.exit(main())
