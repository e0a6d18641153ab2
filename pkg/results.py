# File: results.py
"""
Persists scenario output as CSV files.

A result file starts with '#' comment lines (the run configuration, the
version and scenario notes), followed by one header row and the data rows.
Files are written to a temporary sibling and moved into place, so a failed
write never leaves a truncated CSV behind.
"""

import csv
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import List, Sequence

# Initialize logger for this module
logger = logging.getLogger(__name__)


# --- Custom Exceptions ---
class ResultFileError(OSError):
    """Error writing a result file."""
    pass


@dataclass
class ResultTable:
    """Rows produced by one scenario run, plus the comment lines that precede them."""
    header: List[str]
    rows: List[Sequence] = field(default_factory=list)
    comments: List[str] = field(default_factory=list)

    def add_comment(self, text: str):
        self.comments.extend(text.splitlines() or [""])

    def column(self, name: str) -> List:
        index = self.header.index(name)
        return [row[index] for row in self.rows]


def format_value(value) -> str:
    """Formats one CSV cell; floats use 15 significant digits."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) or hasattr(value, "dtype"):
        number = float(value)
        if math.isnan(number):
            return "nan"
        if math.isinf(number):
            return "inf" if number > 0 else "-inf"
        return format(number, ".15g")
    return str(value)


def write_csv(path: str, table: ResultTable):
    """
    Writes a result table to `path`, replacing any existing file.

    Args:
        path: Target file; missing directories are created.
        table: Header, rows and comment lines.

    Raises:
        ResultFileError: If the directory cannot be created or the write fails.
            No partial file is left at `path`.
    """
    logger.info("Writing %d rows to %s", len(table.rows), path)
    directory = os.path.dirname(os.path.abspath(path))
    temp_path = None
    try:
        if not os.path.isdir(directory):
            logger.info("Result directory '%s' does not exist. Creating it.", directory)
            os.makedirs(directory, exist_ok=True)

        fd, temp_path = tempfile.mkstemp(prefix=".partial-", suffix=".csv", dir=directory)
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            for line in table.comments:
                f.write(f"# {line}\n" if line else "#\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(table.header)
            for row in table.rows:
                writer.writerow([format_value(v) for v in row])
        os.replace(temp_path, path)
        temp_path = None
        logger.debug("Result file %s complete", path)
    except (IOError, OSError) as e:
        msg = f"Failed to write result file '{path}': {e}"
        logger.error(msg, exc_info=True)
        raise ResultFileError(msg) from e
    finally:
        if temp_path is not None and os.path.exists(temp_path):
            os.remove(temp_path)


def read_csv(path: str):
    """
    Reads a result file back as (comments, header, rows of strings).

    Used by the tests and for quick inspection; values are not converted.
    """
    comments, body = [], []
    with open(path, "r", encoding="utf-8", newline="") as f:
        for line in f:
            if line.startswith("#"):
                comments.append(line[1:].strip())
            else:
                body.append(line)
    rows = list(csv.reader(body))
    if not rows:
        return comments, [], []
    return comments, rows[0], rows[1:]
