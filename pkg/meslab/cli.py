#!/usr/bin/env python3
"""
meslab command line.

    meslab mub      --d 5                       MUB exponent tables
    meslab geometry --d 5 [--dot]               incidence table (or a DOT graph)
    meslab mes      --d 5                       line states and the overlap matrix
    meslab verify   --d 5 --suite all           exhaustive identity checks
    meslab king     --d 5 --trials 1000 --seed 42
    meslab track    --d 5 --line 1,0 --trials 1000 --seed 42 --basis 2

Exit status: 0 when everything checks out, 1 on a failed verification or a
runtime error, 2 on a usage error.
"""

import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

from meslab import geometry, mes, mub, protocols
from meslab.arith import Dimension
from meslab.config import (
    COMMANDS,
    DEFAULT_FORMAT,
    FORMATS,
    SUITES,
    TOOL_VERSION,
    RunConfig,
    default_log_file,
    default_workers,
)
from meslab.errors import DimensionError, MeslabError
from meslab.geometry import make_line
from meslab.logger_utils import log_error, setup_logger
from meslab.reports import VerificationReport, emit, flatten, provenance, render

logger = logging.getLogger("meslab")


def dimension_arg(text: str) -> int:
    try:
        return Dimension(int(text)).d
    except (ValueError, DimensionError) as e:
        message = str(e) if isinstance(e, DimensionError) else f"dimension must be an odd prime, got {text!r}"
        raise argparse.ArgumentTypeError(message)


def seed_arg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}")
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {value}")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--d', type=dimension_arg, required=True, help='Dimension, an odd prime')
    common.add_argument('--format', choices=FORMATS, default=DEFAULT_FORMAT, help='Report format (default: json)')
    common.add_argument('--output', help="Output file; '-' forces stdout (default: $MESLAB_OUT or stdout)")
    common.add_argument('--verbose', action='store_true', help='Log INFO messages to stderr')
    common.add_argument('--log-file', default=default_log_file(), help='Also log to this file (default: $MESLAB_LOG_FILE)')

    simulation = argparse.ArgumentParser(add_help=False)
    simulation.add_argument('--trials', type=positive_int, default=1000, help='Number of rounds (default: 1000)')
    simulation.add_argument('--seed', type=seed_arg, help='64-bit seed (default: fresh entropy, reported)')
    policy = simulation.add_mutually_exclusive_group()
    policy.add_argument('--basis', help="Fixed King basis: 'ö' (or 'cb') or 0..d-1")
    policy.add_argument('--basis-policy', choices=('uniform',), help='King picks b uniformly from all d+1 bases (default)')
    simulation.add_argument('--workers', type=positive_int, default=default_workers(),
                            help='Worker processes for the trials (default: $MESLAB_WORKERS or 1)')
    simulation.add_argument('--progress', action='store_true', help='Show a progress bar on stderr')
    simulation.add_argument('--transcript', action='store_true', help='Include every round in the report')

    parser = argparse.ArgumentParser(prog='meslab', description='Exact MUBs, line states and Mean King protocols for odd prime d')
    parser.add_argument('--version', action='version', version=f"%(prog)s {TOOL_VERSION}")
    sub = parser.add_subparsers(dest='command', required=True, metavar='{' + ','.join(COMMANDS) + '}')

    sub.add_parser('mub', parents=[common], help='Exponent tables of the d+1 bases')
    geo = sub.add_parser('geometry', parents=[common], help='Points, lines and incidences')
    geo.add_argument('--dot', action='store_true', help='Write a Graphviz DOT graph instead of a report')
    sub.add_parser('mes', parents=[common], help='Line states and point/line overlap probabilities')
    verify = sub.add_parser('verify', parents=[common], help='Run verification suites')
    verify.add_argument('--suite', choices=SUITES, default='all', help='Which suite (default: all)')
    sub.add_parser('king', parents=[common, simulation], help='Simulate the Mean King retrodiction game')
    track = sub.add_parser('track', parents=[common, simulation], help="Simulate tracking the King's basis")
    track.add_argument('--line', required=True, help='Prepared line as M_DD,M0')
    return parser


def _parse_line(text: str, d: int, parser: argparse.ArgumentParser):
    try:
        m_dd, m0 = (int(part) for part in text.split(','))
    except ValueError:
        parser.error(f"--line expects M_DD,M0, got {text!r}")
    if not (0 <= m_dd < d and 0 <= m0 < d):
        parser.error(f"--line entries must lie in 0..{d - 1}, got {text!r}")
    return make_line(m_dd, m0, d)


def _mub_text(d: int) -> str:
    lines = [f"=== MUB exponent table, d={d} ===", "<n|m;b> = w**k_n / sqrt(d); b=ö is the computational basis"]
    for basis in mub.mub_table(d)['bases']:
        for state in basis['states']:
            if state['exponents'] is None:
                lines.append(f"b={basis['b']} m={state['m']}: |{state['support']}>")
            else:
                lines.append(f"b={basis['b']} m={state['m']}: " + " ".join(str(k) for k in state['exponents']))
    return "\n".join(lines) + "\n"


def _report_text(title: str, reports: Sequence[VerificationReport]) -> str:
    lines = [f"=== {title} ==="]
    for report in reports:
        status = "PASS" if report.passed else "FAIL"
        lines.append(f"{report.name:<24} {status}  {report.checks} checks, {report.violation_count} violations")
        for violation in report.violations:
            lines.append(f"    {violation}")
    return "\n".join(lines) + "\n"


def _sim_text(report: protocols.SimReport) -> str:
    doc = report.to_dict()
    empirical = doc['empirical']
    lines = [
        f"=== {report.protocol.value.upper()} simulation, d={report.d} ===",
        f"Trials: {report.trials}   Seed: {report.seed}   Basis policy: {report.policy}",
    ]
    if report.line is not None:
        lines.append(f"Prepared line: {report.line}")
    lines.append(f"Correct:      {report.success_count:>8}  ({empirical['success_rate']:.4f}, exact {report.exact['correct']})")
    lines.append(f"Undetermined: {report.undetermined_count:>8}  ({empirical['undetermined_rate']:.4f}, exact {report.exact['undetermined']})")
    lines.append(f"Errors:       {report.error_count:>8}  ({empirical['error_rate']:.4f}, exact {report.exact['error']})")
    lines.append("Per basis:")
    for b, cell in report.per_basis.items():
        lines.append(f"  b={b:<3} " + "  ".join(f"{k}={v}" for k, v in cell.items()))
    return "\n".join(lines) + "\n"


def run_suite(name: str, d: int) -> List[VerificationReport]:
    suites: Dict[str, Callable[[int], VerificationReport]] = {
        'mub': mub.verify_mub,
        'geometry': geometry.verify_dapg,
        'mes': mes.verify_mes,
        'balance': mes.verify_balance,
        'protocols': protocols.verify_protocols,
    }
    names = [s for s in SUITES if s != 'all'] if name == 'all' else [name]
    reports = []
    for suite in names:
        logger.info(f"Running suite {suite} for d={d}")
        reports.append(suites[suite](d))
    return reports


def execute(config: RunConfig) -> int:
    """Run one command and write its report; returns the exit status."""
    d = config.d
    doc: Dict[str, Any] = provenance(config.command, d, config.seed)
    rows: Optional[List[Dict[str, Any]]] = None
    text: Optional[str] = None
    status = 0

    if config.command == 'mub':
        doc['table'] = mub.mub_table(d)
        rows = mub.mub_rows(d)
        text = _mub_text(d)
    elif config.command == 'geometry':
        if config.options.get('dot'):
            emit(geometry.to_dot(d), config.output_path())
            return 0
        doc['incidence'] = geometry.incidence_table(d)
        rows = geometry.incidence_rows(d)
        text = geometry.incidence_text(d)
    elif config.command == 'mes':
        doc['line_states'] = mes.line_state_table(d)
        doc['overlaps'] = mes.overlap_matrix(d)
        rows = mes.mes_rows(d)
    elif config.command == 'verify':
        reports = run_suite(config.options['suite'], d)
        doc['suite'] = config.options['suite']
        doc['suites'] = {r.name: r.to_dict() for r in reports}
        doc['passed'] = all(r.passed for r in reports)
        rows = [{'suite': r.name, 'passed': r.passed, 'checks': r.checks, 'violations': r.violation_count} for r in reports]
        text = _report_text(f"Verification, d={d}", reports)
        status = 0 if doc['passed'] else 1
    else:
        options = config.options
        common = dict(trials=options['trials'], seed=config.seed, b_policy=options['policy'],
                      workers=options['workers'], progress=options['progress'], transcript=options['transcript'])
        if config.command == 'king':
            sim = protocols.run_mkp(d, **common)
        else:
            sim = protocols.run_track(d, options['line'], **common)
        doc.update(sim.to_dict())
        doc['seed'] = sim.seed
        rows = flatten({k: v for k, v in doc.items() if k != 'transcript'})
        text = _sim_text(sim)
        status = 0 if sim.error_count == 0 else 1

    emit(render(doc, config.fmt, rows=rows, text=text), config.output_path())
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logger(log_file=args.log_file, verbose=args.verbose)

    options: Dict[str, Any] = {}
    if args.command == 'geometry':
        options['dot'] = args.dot
    elif args.command == 'verify':
        options['suite'] = args.suite
    elif args.command in ('king', 'track'):
        try:
            options['policy'] = protocols.parse_policy(args.basis, args.d)
        except MeslabError as e:
            parser.error(str(e))
        options.update(trials=args.trials, workers=args.workers, progress=args.progress, transcript=args.transcript)
        if args.command == 'track':
            options['line'] = _parse_line(args.line, args.d, parser)

    config = RunConfig(args.command, args.d, getattr(args, 'seed', None), args.format, args.output, options)
    try:
        return execute(config)
    except MeslabError as e:
        log_error(logger, e, f"running {config.command} for d={config.d}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
