"""
Command-line entry point of the quasistatic fracture simulator.
"""

import argparse
import logging
import sys
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from infrastructure.utilities.error_handling import ErrorContext, ErrorHandler
from infrastructure.utilities.logger import app_logger, get_logger
from infrastructure.utilities.structured_logger import CorrelationContext

from config import validate_config
from quasistatic_fracture.cli.commands import (
    CHORD_A,
    CHORD_ANGLES,
    CHORD_EPS,
    cmd_interpolation_error,
    cmd_oracle_check,
    cmd_run,
    cmd_study,
    cmd_validate,
)
from quasistatic_fracture.solver.problem import MODES

logger = get_logger(__name__)


def _number(text: str) -> float:
    """Decimal or fraction literal such as 0.125 or 1/8."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _numbers(text: str) -> List[float]:
    return [_number(v) for v in text.split(",") if v.strip()]


def _point(text: str) -> Tuple[float, float]:
    values = _numbers(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}")
    return values[0], values[1]


def _sequence(text: str) -> List[Tuple[float, float, float]]:
    """'eps,a,delta;eps,a,delta;...'"""
    triples = []
    for part in text.split(";"):
        values = _numbers(part)
        if len(values) != 3:
            raise argparse.ArgumentTypeError(f"expected eps,a,delta, got {part!r}")
        triples.append(tuple(values))
    return triples


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="app.py",
        description="Quasistatic brittle fracture on adaptive triangulations",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python app.py validate --config templates/strip-notch.toml
  python app.py run --config templates/strip-notch.toml --out runs/notch
  python app.py run --config templates/uniform-stretch.toml --solver both --threads 4
  python app.py study --config templates/strip-notch.toml --out runs/study
  python app.py oracle-check --config templates/oracle-strip.toml
  python app.py interpolation-error --eps 1/64 --a 0.4,0.2,0.1,0.05 --out runs/chords
        """
    )
    parser.add_argument('--verbose', '-v', action='store_true', help='Log debug messages to the console')
    sub = parser.add_subparsers(dest='command', metavar='command')

    def with_config(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument('--config', required=True, help='TOML run configuration')
        return p

    with_config('validate', 'Check a run configuration without running it')

    run = with_config('run', 'Run the evolution, export artifacts and check the energy estimates')
    run.add_argument('--out', help='Output directory (overrides output.directory)')
    run.add_argument('--threads', type=int, help='Worker threads of the exact solver')
    run.add_argument('--seed', type=int, help='Seed of the competitor sampler')
    run.add_argument('--solver', choices=MODES, help='Step minimiser')
    run.add_argument('--audit', action='store_true', help='Audit every step against sampled competitors')
    run.add_argument('--no-progress', action='store_true', help='Hide the step progress bar')

    study = with_config('study', 'Refinement study over (eps, a, delta)')
    study.add_argument('--out', help='Output directory')
    study.add_argument('--threads', type=int, help='Worker threads of the exact solver')
    study.add_argument('--solver', choices=MODES, help='Step minimiser')
    study.add_argument('--sequence', type=_sequence, help="Refinements as 'eps,a,delta;eps,a,delta;...'")
    study.add_argument('--initial-only', action='store_true',
                       help='Only tabulate the initial-crack energy error along the sequence')

    oracle = with_config('oracle-check', 'Compare the local search with exhaustive enumeration at every step')
    oracle.add_argument('--out', help='Output directory')
    oracle.add_argument('--threads', type=int, help='Worker threads of the exact solver')

    chords = sub.add_parser('interpolation-error', aliases=['lemma41'],
                            help='Interpolating-curve energy error for straight chords',
                            description='Interpolating-curve energy error for straight chords')
    chords.add_argument('--angles', type=_numbers, default=list(CHORD_ANGLES), help='Chord angles in degrees')
    chords.add_argument('--eps', type=_numbers, default=list(CHORD_EPS), help='Mesh sizes')
    chords.add_argument('--a', type=_numbers, default=list(CHORD_A), help='Knot margins a')
    chords.add_argument('--point', type=_point,
                        help="Point every chord passes through, as 'x,y' (default: an anchor per angle)")
    chords.add_argument('--out', help='Output directory')
    return parser


def dispatch(args: argparse.Namespace) -> int:
    if args.command == 'validate':
        return cmd_validate(args.config)
    if args.command == 'run':
        return cmd_run(args.config, out=args.out, threads=args.threads, seed=args.seed, solver=args.solver,
                       audit=args.audit, progress=not args.no_progress)
    if args.command == 'study':
        return cmd_study(args.config, out=args.out, threads=args.threads, solver=args.solver,
                         sequence=args.sequence, initial_only=args.initial_only)
    if args.command == 'oracle-check':
        return cmd_oracle_check(args.config, out=args.out, threads=args.threads)
    return cmd_interpolation_error(args.angles, args.eps, args.a, out=args.out, point=args.point)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 1

    app_logger.set_console_level(logging.DEBUG if args.verbose else logging.INFO)
    defaults = validate_config()
    for warning in defaults.warnings:
        logger.warning(warning)
    for issue in defaults.issues:
        logger.error(issue)

    try:
        return dispatch(args)
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 130
    except Exception as exc:
        context = ErrorContext(run_id=CorrelationContext.get_run_id(), operation=args.command,
                               config_path=getattr(args, 'config', None))
        ErrorHandler().handle_error(exc, context)
        return 1


if __name__ == "__main__":
    sys.exit(main())
