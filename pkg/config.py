"""
Configuration Module

Loads runtime settings for the simulator from environment variables
(typically via a .env file) and validates them. Every setting has a default,
so a bare checkout runs without a .env file.
"""

import logging
import os
from dotenv import load_dotenv

# Load environment variables from a .env file if it exists.
# Must happen before the os.getenv calls below.
load_dotenv()

VERSION = "1.0.0"

# --- Logging ---
# Root log level used by main.setup_logging. Default: INFO
_log_level_str = os.getenv("DIMER_LOG_LEVEL", "INFO")

# --- Parallelism ---
# Worker threads for grid sweeps. Default: the machine's CPU count.
_threads_str = os.getenv("DIMER_THREADS", str(os.cpu_count() or 1))

# --- Output ---
# Directory where result CSV files are written when --out is not given.
OUTPUT_DIR = os.getenv("DIMER_OUTPUT_DIR", "results")

# --- Numerics ---
# Eigenvector-matrix condition number above which spectral propagation is
# refused and the ODE integrator is used instead.
_condition_limit_str = os.getenv("DIMER_CONDITION_LIMIT", "1e8")


# --- Validation and Type Conversion ---

_log_level_str = _log_level_str.strip().upper()
if _log_level_str not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
    raise ValueError(
        f"Invalid configuration for DIMER_LOG_LEVEL ('{_log_level_str}'): "
        "expected one of DEBUG, INFO, WARNING, ERROR, CRITICAL"
    )
LOG_LEVEL = getattr(logging, _log_level_str)

try:
    DEFAULT_THREADS = int(_threads_str)
    if DEFAULT_THREADS < 1:
        raise ValueError("DIMER_THREADS must be a positive integer.")
except ValueError as e:
    raise ValueError(f"Invalid configuration for DIMER_THREADS ('{_threads_str}'): {e}") from e

try:
    CONDITION_LIMIT = float(_condition_limit_str)
    if not CONDITION_LIMIT > 1.0:
        raise ValueError("DIMER_CONDITION_LIMIT must be a number greater than 1.")
except ValueError as e:
    raise ValueError(
        f"Invalid configuration for DIMER_CONDITION_LIMIT ('{_condition_limit_str}'): {e}"
    ) from e

if not OUTPUT_DIR:
    raise ValueError("Invalid configuration for DIMER_OUTPUT_DIR (''): directory cannot be empty")


def config_summary() -> dict:
    """Returns the loaded settings as a plain dictionary."""
    return {
        "VERSION": VERSION,
        "DIMER_LOG_LEVEL": _log_level_str,
        "DIMER_THREADS": DEFAULT_THREADS,
        "DIMER_OUTPUT_DIR": OUTPUT_DIR,
        "DIMER_CONDITION_LIMIT": CONDITION_LIMIT,
    }


def print_config_summary():
    """Prints a summary of the loaded configuration settings."""
    print("--- Configuration Summary ---")
    for key, value in config_summary().items():
        print(f"  {key}: {value}")
    print("--------------------------")
