# File: main.py
"""
Command-line entry point for the dephased emitter-pair simulator.

Parses a run configuration (a YAML file or a named preset), runs the
scenario and writes the result table as CSV.

    python main.py run config.yaml --out results --threads 4
    python main.py run --preset fig2a
    python main.py presets
    python main.py validate config.yaml

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O error, 1 anything unexpected.
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

# --- Configuration Loading ---
try:
    import config
except ValueError as e:
    print(f"FATAL: Configuration Error - {e}", file=sys.stderr)
    sys.exit(1)
except ImportError:
    print("FATAL: config.py not found or cannot be imported.", file=sys.stderr)
    sys.exit(1)

from analytic import AnalyticError
from coupling import CouplingError
from liouvillian import NumericalError
from model import ParameterError
from presets import load_preset, preset_description, preset_names
from results import write_csv
from run_config import ConfigError, RunConfig, load_config
from scenarios import run_scenario

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

logger = logging.getLogger(__name__)


# --- Logging Setup Function ---
def setup_logging(level: int = config.LOG_LEVEL) -> logging.Logger:
    """Configures and returns the root logger. Logs go to stderr; stdout carries listings."""
    log_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - [%(module)s.%(funcName)s] - %(message)s'
    )
    root = logging.getLogger()
    root.setLevel(level)

    if root.hasHandlers():
        root.handlers.clear()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(log_formatter)
    console_handler.setLevel(level)
    root.addHandler(console_handler)
    return root


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got '{value}'") from e
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got '{value}'")
    return number


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="main.py",
        description="Steady-state and time-resolved observables of two dipole-coupled, dephased emitters",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="Run a scenario and write a CSV result file")
    run_parser.add_argument("config", nargs="?", help="YAML run configuration")
    run_parser.add_argument("--preset", help="Named preset (see 'presets')")
    run_parser.add_argument("--out", default=config.OUTPUT_DIR,
                            help=f"Output directory (default: {config.OUTPUT_DIR})")
    run_parser.add_argument("--threads", type=_positive_int, default=None,
                            help=f"Worker threads for grid sweeps (default: {config.DEFAULT_THREADS})")
    run_parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")

    subparsers.add_parser("presets", help="List the named presets")

    validate_parser = subparsers.add_parser("validate", help="Parse a configuration without running it")
    validate_parser.add_argument("config", help="YAML run configuration")
    return parser


def output_path(cfg: RunConfig, out_dir: str, name: str) -> str:
    """The configured file name (or '<name>.csv') inside out_dir; absolute names are kept."""
    return os.path.join(out_dir, cfg.output or f"{name}.csv")


def command_run(args) -> int:
    if bool(args.config) == bool(args.preset):
        raise ConfigError("give either a configuration file or --preset, not both or neither")
    if args.preset:
        cfg, name = load_preset(args.preset), args.preset
    else:
        cfg = load_config(args.config)
        name = os.path.splitext(os.path.basename(args.config))[0]

    logger.info("="*20 + " Starting %s run " + "="*20, name)
    table = run_scenario(cfg, args.threads)
    path = output_path(cfg, args.out, name)
    write_csv(path, table)
    logger.info("="*20 + " Run finished: %s " + "="*20, path)
    return EXIT_OK


def command_presets(args) -> int:
    for name in preset_names():
        print(f"{name:8s} {preset_description(name)}")
    return EXIT_OK


def command_validate(args) -> int:
    cfg = load_config(args.config)
    print(f"OK: {args.config} (scenario {cfg.scenario}, grids: {', '.join(sorted(cfg.grids)) or 'none'})")
    return EXIT_OK


COMMANDS = {"run": command_run, "presets": command_presets, "validate": command_validate}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Runs one CLI command and maps failures to exit codes.

    Returns:
        0, 2 (configuration), 3 (numerical), 4 (I/O) or 1 (unexpected).
    """
    args = build_parser().parse_args(argv)
    setup_logging(logging.DEBUG if getattr(args, "verbose", False) else config.LOG_LEVEL)
    logger.debug("Configuration: %s", config.config_summary())

    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ParameterError) as e:
        logger.error("Configuration error: %s", e)
        return EXIT_CONFIG
    except (NumericalError, AnalyticError, CouplingError) as e:
        logger.error("Numerical failure: %s", e, exc_info=True)
        return EXIT_NUMERICAL
    except OSError as e:
        logger.error("I/O error: %s", e)
        return EXIT_IO


if __name__ == "__main__":
    try:
        sys.exit(main())
    except Exception as e:
        fallback_message = f"CRITICAL UNHANDLED ERROR in __main__: {e}"
        print(fallback_message, file=sys.stderr)
        try:
            logging.getLogger(__name__).critical(fallback_message, exc_info=True)
        except Exception:
            print(f"Logger unavailable: {fallback_message}", file=sys.stderr)
        sys.exit(EXIT_UNEXPECTED)
