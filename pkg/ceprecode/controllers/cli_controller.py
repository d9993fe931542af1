"""
Command-line controller for ceprecode.

    ceprecode run <config-file> [--out DIR] [--seed S] [--threads T] [--quiet]
    ceprecode plot <csv> --kind {ser|time} [--out DIR]
    ceprecode selftest [--cases N]

The master seed is taken from --seed, then from the CEPRECODE_SEED
environment variable, then from the configuration file.
"""

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Callable, List, Optional

from .. import __version__, config
from ..exceptions import ConfigParseError, ExperimentIOError
from ..models.data_models import ExperimentSpec
from ..services.config_parser import parse_config
from ..services.error_handler import ErrorHandler
from ..services.results_io import PLOT_KINDS, emit_plot_data
from ..services.selftest import run_selftest
from .experiment_controller import run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ceprecode",
        description="Constant-envelope precoding experiments with constructive interference.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run the experiment described by a configuration file")
    run.add_argument("config", help="Key-value configuration file (a run manifest works too)")
    run.add_argument("--out", help="Output directory, overrides output_path")
    run.add_argument("--seed", type=int, help=f"Master seed, overrides ${config.SEED_ENV_VAR} and master_seed")
    run.add_argument("--threads", type=int, default=1, help="Worker threads for Monte Carlo slots")
    run.add_argument("--quiet", action="store_true", help="Only log warnings and errors")

    plot = commands.add_parser("plot", help="Write gnuplot data and script for a results CSV")
    plot.add_argument("csv", help="Results CSV written by 'run'")
    plot.add_argument("--kind", choices=PLOT_KINDS, required=True, help="SER or execution-time plot")
    plot.add_argument("--out", help="Directory for the plot files (defaults to the CSV's directory)")
    plot.add_argument("--quiet", action="store_true", help="Only log warnings and errors")

    selftest = commands.add_parser("selftest", help="Run the randomized invariant suite")
    selftest.add_argument("--cases", type=int, default=200, help="Random cases per check")
    selftest.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
    return parser


class CLIController:
    """
    Executes parsed command-line arguments and returns exit codes.
    """

    def __init__(self, error_handler: Optional[ErrorHandler] = None,
                 output: Callable[[str], None] = print):
        self.logger = logging.getLogger(__name__)
        self.error_handler = error_handler or ErrorHandler(report_callback=self._report)
        self.output = output

    @staticmethod
    def _report(message: str) -> None:
        print(message, file=sys.stderr)

    def dispatch(self, args: argparse.Namespace) -> int:
        handlers = {
            "run": self.run_command,
            "plot": self.plot_command,
            "selftest": self.selftest_command,
        }
        return handlers[args.command](args)

    def load_spec(self, args: argparse.Namespace) -> ExperimentSpec:
        """
        Reads and parses the configuration file and applies the command-line overrides.

        Raises:
            ExperimentIOError: If the file cannot be read
            ConfigParseError: If the file or the seed override is invalid
        """
        path = Path(args.config)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ExperimentIOError(f"Cannot read configuration: {e}", str(path)) from e

        spec = parse_config(text)
        seed = resolve_seed(args.seed, os.environ.get(config.SEED_ENV_VAR))
        if seed is not None:
            spec = replace(spec, master_seed=seed)
        if args.out:
            spec = replace(spec, output_path=args.out)
        return spec

    def run_command(self, args: argparse.Namespace) -> int:
        if args.threads < 1:
            return self.error_handler.handle_error(
                ConfigParseError(f"--threads must be at least 1, got {args.threads}"), "command line")['exit_code']
        try:
            spec = self.load_spec(args)
        except (ConfigParseError, ExperimentIOError) as e:
            return self.error_handler.handle_error(e, f"loading {args.config}")['exit_code']

        code = run_experiment(spec, args.threads, self.error_handler)
        if code == config.EXIT_SUCCESS:
            self.output(f"Results written to {spec.output_path}")
        return code

    def plot_command(self, args: argparse.Namespace) -> int:
        try:
            data_path, script_path = emit_plot_data(args.csv, args.kind, args.out)
        except Exception as e:
            return self.error_handler.handle_error(e, f"plotting {args.csv}")['exit_code']
        self.output(f"Plot data: {data_path}")
        self.output(f"Plot script: {script_path}")
        return config.EXIT_SUCCESS

    def selftest_command(self, args: argparse.Namespace) -> int:
        failures = run_selftest(cases=args.cases)
        for failure in failures:
            self.output(f"FAIL {failure}")
        if failures:
            self.output(f"{len(failures)} check(s) failed")
            return config.EXIT_NUMERICAL_ERROR
        self.output("All invariant checks passed")
        return config.EXIT_SUCCESS


def resolve_seed(flag: Optional[int], env_value: Optional[str]) -> Optional[int]:
    """
    The --seed flag wins over the environment variable; None keeps the configured seed.

    Raises:
        ConfigParseError: If the environment value is not a non-negative integer
    """
    if flag is not None:
        if flag < 0:
            raise ConfigParseError(f"--seed must be non-negative, got {flag}")
        return flag
    if env_value is None or not env_value.strip():
        return None
    try:
        seed = int(env_value.strip())
    except ValueError:
        raise ConfigParseError(f"{config.SEED_ENV_VAR} must be an integer, got '{env_value}'", key=config.SEED_ENV_VAR)
    if seed < 0:
        raise ConfigParseError(f"{config.SEED_ENV_VAR} must be non-negative, got {seed}", key=config.SEED_ENV_VAR)
    return seed


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)
