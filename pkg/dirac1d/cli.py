#!/usr/bin/env python3
"""
dirac1d command line

Batch front end for the bound-state solver of the 1+1 dimensional Dirac
equation with Lorentz scalar potential g|x|.

Usage:
    python -m dirac1d table1
    python -m dirac1d eigen --mass 0 --coupling 1 --count 5 --format json
    python -m dirac1d scan --alpha 0 --nu-max 5 --step 0.01 --out scan.csv
    python -m dirac1d wavefunction --alpha 0 --index 0 --out ground.csv
    python -m dirac1d verify --alpha 0 1 2 --count 5
    python -m dirac1d compare --alpha 1 --count 5

Exit codes: 0 success, 1 numerical failure or tolerance unmet, 2 usage error.
"""

import sys
import math
import csv
import json
import logging
import argparse
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from dirac1d.config import Settings, load_reference_table, load_settings
from dirac1d.errors import Dirac1DError
from dirac1d.oracle import compare_with_spectral, substitution_residual
from dirac1d.spectral import PhysicalParams, eigenvalues, integer_levels, spectral_fn
from dirac1d.wavefunction import assemble

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2

TEMPLATE_DIR = Path(__file__).resolve().parent / 'templates'

logger = logging.getLogger(__name__)


def _templates() -> Environment:
    return Environment(
        loader=FileSystemLoader(str(TEMPLATE_DIR)),
        undefined=StrictUndefined,
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
    )


def render(template: str, **context) -> str:
    return _templates().get_template(template).render(**context)


def fmt(value: float, digits: int) -> str:
    """Fixed significant-digit rendering used for every CSV number"""
    return f"{value:.{digits}g}"


@contextmanager
def _open_output(destination: Optional[str]):
    if destination in (None, '-'):
        yield sys.stdout
    else:
        path = Path(destination)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', newline='') as f:
            yield f
        logger.info(f"Wrote {path}")


def _write_csv(destination: Optional[str], header: Sequence[str], rows: Iterable[Sequence],
               comments: Sequence[str] = ()):
    with _open_output(destination) as f:
        for line in comments:
            f.write(f"# {line}\n")
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)


def _params(args, parser: argparse.ArgumentParser) -> PhysicalParams:
    """(--mass, --coupling) or --alpha with g = 1"""

    if args.alpha is not None:
        if args.mass is not None or args.coupling is not None:
            parser.error("--alpha cannot be combined with --mass/--coupling")
        if args.alpha < 0:
            parser.error("--alpha must be non-negative")
        return PhysicalParams.from_alpha(args.alpha)

    mass = 0.0 if args.mass is None else args.mass
    coupling = 1.0 if args.coupling is None else args.coupling
    try:
        return PhysicalParams(m=mass, g=coupling)
    except ValueError as e:
        parser.error(str(e))


def _add_param_flags(sub: argparse.ArgumentParser):
    sub.add_argument('--mass', type=float, default=None, help='Fermion mass m >= 0 (default: 0)')
    sub.add_argument('--coupling', type=float, default=None, help='Coupling g > 0 (default: 1)')
    sub.add_argument('--alpha', type=float, default=None,
                     help='Dimensionless mass m/sqrt(g); implies g = 1')


def cmd_table1(args, settings: Settings, parser) -> int:
    """Reproduce the first five roots for alpha = 0, 1, 2 against the reference table"""

    if args.tolerance_override is not None:
        settings = replace(settings, spectral=replace(settings.spectral,
                                                      refine_tol=args.tolerance_override))

    reference = load_reference_table()
    alphas = sorted(reference)
    tol = settings.spectral.table_tol

    columns = {}
    for alpha in alphas:
        records = eigenvalues(PhysicalParams.from_alpha(alpha), len(reference[alpha]),
                              settings.spectral, settings.series)
        columns[alpha] = [r.nu for r in records]

    rows = []
    failures = []
    for n in range(len(reference[alphas[0]])):
        cells = []
        for alpha in alphas:
            computed, expected = columns[alpha][n], reference[alpha][n]
            delta = computed - expected
            ok = abs(delta) <= tol
            cells.append({'computed': computed, 'expected': expected, 'delta': delta, 'ok': ok})
            if not ok:
                failures.append({'n': n, 'alpha': alpha, **cells[-1]})
        rows.append({'n': n, 'cells': cells})

    sys.stdout.write(render('table1.txt.j2', alphas=alphas, rows=rows,
                            failures=failures, tol=tol))
    return EXIT_OK if not failures else EXIT_NUMERICAL


def cmd_eigen(args, settings: Settings, parser) -> int:
    """Emit the lowest levels as CSV or JSON"""

    if args.count < 1:
        parser.error("--count must be at least 1")
    params = _params(args, parser)

    records = eigenvalues(params, args.count, settings.spectral, settings.series)

    if args.format == 'json':
        with _open_output(args.out) as f:
            json.dump([r.to_dict() for r in records], f, indent=2)
            f.write('\n')
        return EXIT_OK

    digits = settings.output.digits
    _write_csv(
        args.out,
        ['index', 'nu', 'e_plus', 'e_minus', 'residual'],
        [[r.index, fmt(r.nu, digits), fmt(r.e_plus, digits), fmt(r.e_minus, digits),
          fmt(r.residual, digits)] for r in records],
    )
    return EXIT_OK


def cmd_scan(args, settings: Settings, parser) -> int:
    """Samples of f(nu; alpha) for plotting"""

    if args.alpha < 0:
        parser.error("--alpha must be non-negative")
    if not args.nu_max > 0:
        parser.error("--nu-max must be positive")
    if not 0 < args.step <= 0.5:
        parser.error("--step must lie in (0, 0.5]")

    digits = settings.output.digits
    n_steps = int(math.ceil(args.nu_max / args.step - 1e-9))
    rows = []
    for k in range(n_steps + 1):
        nu = min(k * args.step, args.nu_max)
        rows.append([fmt(nu, digits), fmt(spectral_fn(nu, args.alpha, settings.series), digits)])

    _write_csv(args.out, ['nu', 'f'], rows)
    return EXIT_OK


def cmd_wavefunction(args, settings: Settings, parser) -> int:
    """Normalized profile of one level as x,psi1,psi2 with # metadata lines"""

    if args.index < 0:
        parser.error("--index must be non-negative")
    if args.points is not None and (args.points < 3 or args.points % 2 == 0):
        parser.error("--points must be odd and at least 3")
    params = _params(args, parser)

    record = eigenvalues(params, args.index + 1, settings.spectral, settings.series)[args.index]
    profile = assemble(record, params, n_points=args.points,
                       settings=settings.wavefunction, cfg=settings.series,
                       residual_tol=settings.spectral.residual_tol)

    digits = settings.output.digits
    comments = [
        f"index={record.index}",
        f"nu={fmt(record.nu, digits)}",
        f"energy={fmt(profile.energy, digits)}",
        f"alpha={fmt(params.alpha, digits)}",
        f"norm={fmt(profile.norm, digits)}",
        f"continuity_defect={profile.continuity_defect:.3e}",
    ]
    _write_csv(args.out, ['x', 'psi1', 'psi2'],
               [[fmt(x, digits), fmt(p1, digits), fmt(p2, digits)] for x, p1, p2 in profile.rows()],
               comments)
    return EXIT_OK


def cmd_verify(args, settings: Settings, parser) -> int:
    """Spectral-condition energies against the shooting oracle"""

    if args.count < 1:
        parser.error("--count must be at least 1")
    rel_tol = settings.oracle.agreement_tol if args.rel_tol is None else args.rel_tol
    if not rel_tol > 0:
        parser.error("--rel-tol must be positive")

    blocks = []
    all_ok = True
    for alpha in args.alpha:
        if alpha < 0:
            parser.error("--alpha must be non-negative")
        params = PhysicalParams.from_alpha(alpha)
        pairs = compare_with_spectral(params, args.count, settings.oracle,
                                      settings.spectral, settings.series)

        rows = []
        for record, shot, diff in pairs:
            ok = diff <= rel_tol and shot.converged
            all_ok = all_ok and ok
            rows.append({'record': record, 'shot': shot, 'diff': diff, 'ok': ok})

        ode_residual = substitution_residual(pairs[0][0].nu, params, [0.0, 0.5, 1.0, 2.0, 3.0],
                                             settings.series)
        blocks.append({'alpha': alpha, 'rows': rows, 'ode_residual': ode_residual})

    sys.stdout.write(render('verify.txt.j2', blocks=blocks, rel_tol=rel_tol, all_ok=all_ok))
    return EXIT_OK if all_ok else EXIT_NUMERICAL


def cmd_compare(args, settings: Settings, parser) -> int:
    """Integer levels E = +-sqrt(2(n+1)g) against the quantization condition"""

    if args.count < 1:
        parser.error("--count must be at least 1")
    params = _params(args, parser)

    checks = integer_levels(params, args.count, settings.spectral, settings.series)
    survivors = [c for c in checks if c.satisfied]

    sys.stdout.write(render('compare.txt.j2', params=params, checks=checks, survivors=survivors))
    return EXIT_OK if not survivors else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='dirac1d',
        description='Bound states of the 1+1D Dirac equation with scalar potential g|x|',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Reproduce the reference table
  python -m dirac1d table1

  # Five lowest levels for m = 2, g = 4 as JSON
  python -m dirac1d eigen --mass 2 --coupling 4 --count 5 --format json

  # Cross-check against the shooting oracle
  python -m dirac1d verify --alpha 0 1 2 --count 5
        """
    )
    parser.add_argument('--config', type=str, default=None,
                        help='Settings YAML (default: $DIRAC1D_CONFIG or config/solver.yml)')
    parser.add_argument('--verbose', action='store_true', help='Debug logging on stderr')

    subparsers = parser.add_subparsers(dest='command', required=True)

    table1 = subparsers.add_parser('table1', help='Reproduce nu_0..nu_4 for alpha = 0, 1, 2')
    table1.add_argument('--tolerance-override', type=float, default=None, help=argparse.SUPPRESS)
    table1.set_defaults(handler=cmd_table1)

    eigen = subparsers.add_parser('eigen', help='Lowest bound-state levels')
    _add_param_flags(eigen)
    eigen.add_argument('--count', type=int, default=5, help='Number of levels (default: 5)')
    eigen.add_argument('--format', choices=['csv', 'json'], default='csv')
    eigen.add_argument('--out', type=str, default=None, help='Output file (default: stdout)')
    eigen.set_defaults(handler=cmd_eigen)

    scan = subparsers.add_parser('scan', help='Sample the spectral function f(nu; alpha)')
    scan.add_argument('--alpha', type=float, default=0.0)
    scan.add_argument('--nu-max', type=float, default=5.0)
    scan.add_argument('--step', type=float, default=0.05)
    scan.add_argument('--out', type=str, default=None, help='Output file (default: stdout)')
    scan.set_defaults(handler=cmd_scan)

    wave = subparsers.add_parser('wavefunction', help='Export a normalized bound state')
    _add_param_flags(wave)
    wave.add_argument('--index', type=int, default=0, help='Level index (default: 0)')
    wave.add_argument('--points', type=int, default=None, help='Odd grid size (default: settings)')
    wave.add_argument('--out', type=str, default=None, help='Output file (default: stdout)')
    wave.set_defaults(handler=cmd_wavefunction)

    verify = subparsers.add_parser('verify', help='Spectral condition vs shooting oracle')
    verify.add_argument('--alpha', type=float, nargs='+', default=[0.0, 1.0, 2.0])
    verify.add_argument('--count', type=int, default=5)
    verify.add_argument('--rel-tol', type=float, default=None,
                        help='Accepted relative energy difference (default: settings)')
    verify.set_defaults(handler=cmd_verify)

    compare = subparsers.add_parser('compare', help='Integer levels vs the quantization condition')
    _add_param_flags(compare)
    compare.add_argument('--count', type=int, default=5)
    compare.set_defaults(handler=cmd_compare)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format=LOG_FORMAT,
    )

    try:
        settings = load_settings(args.config)
        return args.handler(args, settings, parser)
    except Dirac1DError as e:
        logger.error(f"{type(e).__name__}: {e}")
        sys.stderr.write(f"✗ {type(e).__name__}: {e}\n")
        return EXIT_NUMERICAL


if __name__ == '__main__':
    sys.exit(main())
