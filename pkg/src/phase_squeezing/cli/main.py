import argparse
import logging
import sys
import time
from typing import List, Optional

from phase_squeezing.cli.config import RunConfig, parse_config
from phase_squeezing.cli.output import write_tables
from phase_squeezing.errors import ConfigError, NumericalError, ParameterError
from phase_squeezing.experiments.presets import PRESETS, ExperimentResult, ExperimentRunner
from phase_squeezing.utils.checks import InvariantChecker
from phase_squeezing.utils.logging import RunLogger

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2

logger = logging.getLogger(__name__)


def execute(config: RunConfig) -> ExperimentResult:
    """Dispatch a validated config to the matching ExperimentRunner method"""
    runner = ExperimentRunner({'workers': config.workers})
    if config.mode == 'preset':
        return runner.preset(config.preset)
    if config.mode == 'spectrum':
        return runner.spectrum(config.params, config.theta, config.grid)
    if config.mode == 'spectrum-oracle':
        return runner.spectrum(config.params, config.theta, config.grid, oracle=True)
    if config.mode == 'dressed':
        return runner.dressed_states(config.params)
    if config.mode == 'variance':
        return runner.squeezing(config.params)
    if config.mode == 'omega3-sweep':
        return runner.omega3_sweep(config.params, config.grid)
    return runner.phi_sweep(config.params, config.grid)


def run(config: RunConfig, run_logger: Optional[RunLogger] = None) -> int:
    """Execute one configured run, write its CSV files and return the exit code"""
    run_logger = run_logger or RunLogger()
    run_id = RunLogger.new_run_id()
    start = time.perf_counter()
    try:
        result = execute(config)
        written = write_tables(config.output, result.tables)
        checker = InvariantChecker()
        checks = []
        for params in [result.params] + result.extra_params:
            if params is not None:
                checks.extend(checker.check_run(params))
    except NumericalError as exc:
        logger.error(str(exc))
        run_logger.log_error(run_id, config.mode, exc.operation, str(exc), time.perf_counter() - start)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, ParameterError) as exc:
        logger.error(str(exc))
        run_logger.log_error(run_id, config.mode, 'output', str(exc), time.perf_counter() - start)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    params = result.params.as_dict() if result.params is not None else None
    if config.preset:
        params = {'preset': config.preset, 'base': params}
    run_logger.log_run(
        run_id, config.mode, params, time.perf_counter() - start, checks, ', '.join(written)
    )
    failed = [check['name'] for check in checks if not check['passed']]
    if failed:
        logger.warning(f"Run {run_id} finished with failed checks: {', '.join(failed)}")
    return EXIT_OK


def run_checks() -> int:
    """Run the self-test suite and print one line per check"""
    results = InvariantChecker().run_all()
    for result in results:
        status = 'ok' if result['passed'] else 'FAILED'
        line = f"{result['name']}: {status}"
        if result['reason']:
            line += f" ({result['reason']})"
        print(line)
    return EXIT_OK if all(result['passed'] for result in results) else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='phase-squeezing',
        description='Steady state, squeezing spectrum and squeezing parameter of a closed-loop Lambda atom'
    )
    parser.add_argument('--config', help='key=value run configuration file')
    parser.add_argument('--preset', choices=sorted(PRESETS), help='regenerate the data behind a figure')
    parser.add_argument('--output', help='CSV output path (with --preset)')
    parser.add_argument('--workers', type=int, default=1, help='threads for sweeps (with --preset)')
    parser.add_argument('--check', action='store_true', help='run the built-in invariant suite')
    parser.add_argument('--log', default='squeezing_runs.log', help='JSON-lines run log')
    parser.add_argument('-v', '--verbose', action='store_true', help='debug logging to stderr')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    if args.check:
        return run_checks()

    if args.config:
        try:
            with open(args.config, encoding='utf-8') as handle:
                config = parse_config(handle.read())
        except (OSError, ConfigError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    elif args.preset:
        if not args.output:
            print("error: --preset needs --output", file=sys.stderr)
            return EXIT_CONFIG
        if args.workers < 1:
            print("error: --workers must be at least 1", file=sys.stderr)
            return EXIT_CONFIG
        config = RunConfig(mode='preset', output=args.output, preset=args.preset, workers=args.workers)
    else:
        parser.print_usage(sys.stderr)
        print("error: one of --config, --preset or --check is required", file=sys.stderr)
        return EXIT_CONFIG

    run_logger = RunLogger(args.log)
    try:
        return run(config, run_logger)
    finally:
        run_logger.close()


if __name__ == '__main__':
    sys.exit(main())
