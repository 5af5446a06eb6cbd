"""
Command line entry point.

Usage:
    # Run a preset or a YAML config
    nonlocal-waves run blowup-negative-energy
    nonlocal-waves run configs/my_run.yaml --override evolution.dt=5e-4 --output-dir runs/fine

    # List presets, or print one as a complete config
    nonlocal-waves presets
    nonlocal-waves describe global-smooth-kernel

    # Run independent configs in parallel
    nonlocal-waves sweep a.yaml b.yaml linear-dispersion --workers 3

Exit status: 0 completed, 1 invalid config, 2 blow-up detected, 3 corrupted, 4 I/O error.
"""

import argparse
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from .. import __version__
from ..exceptions import ConfigError
from ..settings import get_settings
from .config import echo
from .presets import get_preset, list_presets
from .runner import EXIT_CONFIG_ERROR, EXIT_IO_ERROR, RunReport, resolve_source, run_scenario

logger = logging.getLogger(__name__)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='nonlocal-waves',
                                     description='Simulate nonlocal coupled wave systems from presets or YAML configs.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('--quiet', action='store_true', help='Only report warnings and errors')
    verbosity.add_argument('--verbose', action='store_true', help='Enable debug output')
    subparsers = parser.add_subparsers(dest='command', required=True)

    run = subparsers.add_parser('run', help='Run one experiment')
    run.add_argument('source', help='Path to a YAML config, or a preset name')
    run.add_argument('--output-dir', type=Path, help='Directory for the CSV, JSON and metrics files')
    run.add_argument('--override', action='append', default=[], metavar='KEY=VALUE',
                     help='Set a dotted config path, e.g. evolution.dt=5e-4 (repeatable)')

    subparsers.add_parser('presets', help='List the built-in presets')

    describe = subparsers.add_parser('describe', help='Print a preset as a complete YAML config')
    describe.add_argument('preset')
    describe.add_argument('--override', action='append', default=[], metavar='KEY=VALUE')

    sweep = subparsers.add_parser('sweep', help='Run independent experiments in parallel')
    sweep.add_argument('sources', nargs='+', help='YAML configs and/or preset names')
    sweep.add_argument('--output-dir', type=Path, help='Parent directory; each run writes to its own subdirectory')
    sweep.add_argument('--override', action='append', default=[], metavar='KEY=VALUE',
                       help='Applied to every config of the sweep')
    sweep.add_argument('--workers', type=int, help='Parallel runs (default NONLOCAL_WAVES_WORKERS)')
    return parser


def _summary(report: RunReport) -> str:
    line = f'{report.name}: {report.outcome.value}'
    if report.t_detect is not None:
        line += f' at t={report.t_detect:g}'
    if report.certificate is not None:
        line += f', certificate {report.certificate.status.value}'
        if report.certificate.certified:
            line += f' (levine bound {report.certificate.levine_bound:.4g})'
    if report.energy.get('max_relative_drift') is not None:
        line += f', energy drift {report.energy["max_relative_drift"]:.3e}'
    if report.oracle_max_error is not None:
        line += f', oracle error {report.oracle_max_error:.3e}'
    failed = [h.predicate for h in report.hypotheses if not h.passed]
    if failed:
        line += f', failed hypotheses: {", ".join(failed)}'
    return line


def _run(args) -> int:
    cfg = resolve_source(args.source, args.override)
    report = run_scenario(cfg, output_dir=args.output_dir)
    if not args.quiet:
        print(_summary(report))
    return report.exit_code


def _presets(args) -> int:
    for preset in list_presets():
        print(f'{preset.name:<24} {preset.description}')
    return 0


def _describe(args) -> int:
    print(echo(get_preset(args.preset).config(args.override)), end='')
    return 0


def _sweep(args) -> int:
    settings = get_settings()
    configs = [resolve_source(source, args.override) for source in args.sources]
    parent = args.output_dir if args.output_dir is not None else settings.output_dir
    directories, seen = [], {}
    for cfg in configs:
        count = seen.get(cfg.name, 0)
        seen[cfg.name] = count + 1
        directories.append(parent / (cfg.name if count == 0 else f'{cfg.name}-{count}'))

    workers = args.workers if args.workers is not None else settings.workers
    logger.info('Sweeping %d configs with %d workers', len(configs), workers)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        reports = list(executor.map(run_scenario, configs, directories))
    if not args.quiet:
        for report in reports:
            print(_summary(report))
    return max(report.exit_code for report in reports)


COMMANDS = {'run': _run, 'presets': _presets, 'describe': _describe, 'sweep': _sweep}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)

    if args.quiet:
        log_level = logging.WARNING
    elif args.verbose:
        log_level = logging.DEBUG
    else:
        log_level = get_settings().log_level
    logging.basicConfig(level=log_level, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')

    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        logger.error(e.message)
        return EXIT_CONFIG_ERROR
    except OSError as e:
        logger.error('I/O error: %s', e)
        return EXIT_IO_ERROR


if __name__ == '__main__':
    raise SystemExit(main())
