#!/usr/bin/env python3
"""Command Line Interface for the inflow lab.

Runs experiments from JSON config files and writes their reports.

Usage:
    inflow-lab SUBCOMMAND [--config PATH] [--out DIR] [--seed N] [OPTIONS]

Example:
    inflow-lab hyp1d --config configs/burgers-small.json --out results/burgers
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from inflow_lab import __version__
from inflow_lab.config import LabConfig, ModuleName, set_config
from inflow_lab.errors import ConfigurationError, InflowLabError
from inflow_lab.harness import (
    ExperimentConfig,
    atomic_write,
    compare,
    get_preset,
    load_report,
    run,
    run_suite,
)
from inflow_lab.harness.tracking import configure_tracking, tracking_enabled

logger = logging.getLogger("inflow_lab.cli")

EXIT_PASS = 0
EXIT_VERDICT_FAILURE = 1
EXIT_INTERNAL_ERROR = 4
EXIT_INTERRUPTED = 130

RUN_COMMANDS = {
    "transport1d": ModuleName.TRANSPORT1D,
    "hyp1d": ModuleName.HYP1D,
    "pipe3d": ModuleName.PIPE3D,
    "divcurl": ModuleName.DIVCURL,
    "trace": ModuleName.TRACE,
}

DEFAULT_PRESETS = {
    "transport1d": "flush-test",
    "hyp1d": "burgers-small",
    "pipe3d": "pipe-stability",
    "divcurl": "divcurl-manufactured",
    "trace": "trace-affine",
}


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--out",
        type=str,
        default=None,
        help="Output directory (default: $INFLOW_LAB_OUTPUT_DIR/<preset> or results/<preset>)"
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Seed of the randomized property sampling (overrides the config)"
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        help="Enable verbose output"
    )
    parser.add_argument(
        "--debug",
        action="store_true",
        help="Enable debug mode with detailed logging and tracebacks"
    )
    parser.add_argument(
        "--mlflow-tracking",
        action="store_true",
        help="Log parameters, metrics and report files to MLflow"
    )


def parse_arguments(argv: Optional[list[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        prog="inflow-lab",
        description="Inflow lab CLI - hyperbolic inflow problems in 1D and the 3D pipe",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  inflow-lab transport1d --config configs/flush.json
  inflow-lab hyp1d --config configs/burgers-small.json --out results/burgers-256
  inflow-lab divcurl --out results/divcurl
  inflow-lab compare results/burgers-256/report.json results/burgers-512/report.json --out results/cmp
  inflow-lab suite --out results/suite --seed 7

Exit codes: 0 pass, 1 verdict failed, 2 configuration, 3 numerical failure,
4 internal error, 130 interrupted
        """
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name in RUN_COMMANDS:
        sub = subparsers.add_parser(name, help=f"Run a {name} experiment")
        sub.add_argument(
            "--config",
            type=str,
            default=None,
            help=f"Experiment JSON {{module, preset, params, seed, output_dir}} (default preset: {DEFAULT_PRESETS[name]})"
        )
        add_common_arguments(sub)

    sub = subparsers.add_parser("compare", help="Compare two reports")
    sub.add_argument("report_a", type=str, help="First report (report.json or its directory)")
    sub.add_argument("report_b", type=str, help="Second report")
    add_common_arguments(sub)

    sub = subparsers.add_parser("suite", help="Run every acceptance preset")
    add_common_arguments(sub)

    return parser.parse_args(argv)


def configure_logging(args: argparse.Namespace) -> None:
    """Root logger level from --verbose / --debug."""
    level = logging.DEBUG if args.debug else logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def configure_lab(args: argparse.Namespace) -> LabConfig:
    """Load .env and install the process-wide LabConfig."""
    load_dotenv()
    config = LabConfig.from_env()
    set_config(config)
    if args.verbose:
        print(f"Output root: {config.output_dir}")
    return config


def configure_mlflow(args: argparse.Namespace) -> bool:
    """Configure MLflow tracking if enabled."""
    enabled = tracking_enabled(args.mlflow_tracking)
    if enabled:
        experiment = configure_tracking()
        if args.verbose:
            print(f"MLflow tracking enabled, experiment: {experiment}")
    return enabled


def load_experiment(args: argparse.Namespace) -> ExperimentConfig:
    """Experiment from --config, or the command's default preset."""
    module = RUN_COMMANDS[args.command]
    if args.config:
        config = ExperimentConfig.from_json(args.config)
        if config.module is not module and get_preset(config.preset).module is not module:
            raise ConfigurationError(
                f"config module '{config.module.value}' does not match subcommand '{args.command}'"
            )
    else:
        config = ExperimentConfig(module=module, preset=DEFAULT_PRESETS[args.command])
    if args.seed is not None:
        config.seed = args.seed
    if args.out:
        config.output_dir = Path(args.out)
    return config


def write_error(error: InflowLabError, out_dir: Optional[Path]) -> None:
    """Structured error to stderr and, when the directory exists, to error.json."""
    document = json.dumps(error.to_dict(), sort_keys=True, indent=2)
    print(document, file=sys.stderr)
    if out_dir is not None and out_dir.is_dir():
        atomic_write(out_dir / "error.json", document + "\n")


def print_verdicts(report) -> None:
    print(f"{report.module}/{report.preset}: {'PASS' if report.passed else 'FAIL'}")
    for verdict in report.verdicts:
        value = ""
        if isinstance(verdict.value, (int, float)):
            value = f" value={verdict.value:.6g}"
        elif verdict.value is not None:
            value = f" value={verdict.value}"
        print(f"  [{'pass' if verdict.passed else 'FAIL'}] {verdict.criterion}{value}")


def command_run(args: argparse.Namespace, track: bool) -> int:
    config = load_experiment(args)
    report = run(config, track=track)
    print_verdicts(report)
    return EXIT_PASS if report.passed else EXIT_VERDICT_FAILURE


def command_compare(args: argparse.Namespace) -> int:
    summary = compare(load_report(args.report_a), load_report(args.report_b))
    out_dir = Path(args.out) if args.out else Path.cwd()
    out_dir.mkdir(parents=True, exist_ok=True)
    atomic_write(out_dir / "comparison.json", json.dumps(summary, sort_keys=True, indent=2) + "\n")
    for name, columns in summary["series"].items():
        for column, diff in columns.items():
            print(f"{name}.{column}: abs={diff['abs']:.3e} rel={diff['rel']:.3e}")
    changed = [k for k, v in summary["verdicts"].items() if v["changed"]]
    if changed:
        print(f"verdicts changed: {', '.join(changed)}")
    return EXIT_PASS


def command_suite(args: argparse.Namespace, config: LabConfig, track: bool) -> int:
    out_dir = Path(args.out) if args.out else config.output_dir / "suite"
    summary = run_suite(out_dir, seed=args.seed or 0, track=track)
    for entry in summary["presets"]:
        status = "PASS" if entry["passed"] else "FAIL"
        print(f"  [{status}] {entry['module']}/{entry['preset']}")
    return EXIT_PASS if summary["passed"] else EXIT_VERDICT_FAILURE


def main(argv: Optional[list[str]] = None) -> None:
    """Main entry point for the CLI."""
    args = parse_arguments(argv)
    configure_logging(args)
    out_dir = Path(args.out) if getattr(args, "out", None) else None

    try:
        config = configure_lab(args)
        track = configure_mlflow(args)
        if args.command == "compare":
            code = command_compare(args)
        elif args.command == "suite":
            code = command_suite(args, config, track)
        else:
            code = command_run(args, track)
        sys.exit(code)

    except InflowLabError as e:
        if args.debug:
            logger.exception("run failed")
        write_error(e, out_dir)
        sys.exit(e.exit_code)

    except KeyboardInterrupt:
        print("\n\nExecution interrupted by user")
        sys.exit(EXIT_INTERRUPTED)

    except Exception as e:
        print(f"\nError: {e}", file=sys.stderr)
        if args.debug:
            import traceback
            traceback.print_exc()
        sys.exit(EXIT_INTERNAL_ERROR)


if __name__ == "__main__":
    main()
