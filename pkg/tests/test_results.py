#!/usr/bin/env python3
"""
Unit tests for CSV result files (results.py) and grid evaluation (sweep.py).
"""

import math
import os
import sys
import tempfile
import threading
import unittest
from unittest.mock import patch

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
import config
from results import ResultFileError, ResultTable, format_value, read_csv, write_csv
from sweep import map_points, resolve_threads


class TestFormatValue(unittest.TestCase):

    def test_cells(self):
        cases = [
            (True, "1"),
            (False, "0"),
            (3, "3"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333333333"),
            (np.float64(2.5e-7), "2.5e-07"),
            (np.int64(5), "5"),
            (math.nan, "nan"),
            (-math.inf, "-inf"),
            ("two_photon", "two_photon"),
        ]
        for value, expected in cases:
            with self.subTest(value=value):
                self.assertEqual(format_value(value), expected)


class TestResultFiles(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name
        self.table = ResultTable(["t", "n_exc"], [(0.0, 2.0), (0.5, 1.25)])
        self.table.add_comment("scenario: decay")
        self.table.add_comment("fit gamma_star=0: late rate 2\nsecond line")

    def tearDown(self):
        self._tmp.cleanup()

    def test_write_and_read(self):
        path = os.path.join(self.tmp, "nested", "dir", "decay.csv")
        write_csv(path, self.table)
        comments, header, rows = read_csv(path)
        self.assertEqual(comments, ["scenario: decay", "fit gamma_star=0: late rate 2", "second line"])
        self.assertEqual(header, ["t", "n_exc"])
        self.assertEqual(rows, [["0", "2"], ["0.5", "1.25"]])
        self.assertEqual(os.listdir(os.path.dirname(path)), ["decay.csv"])

    def test_file_layout(self):
        path = os.path.join(self.tmp, "decay.csv")
        write_csv(path, self.table)
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
        self.assertTrue(text.startswith("# scenario: decay\n"))
        self.assertTrue(text.endswith("t,n_exc\n0,2\n0.5,1.25\n"))

    def test_failed_write_keeps_previous_file(self):
        path = os.path.join(self.tmp, "decay.csv")
        write_csv(path, self.table)
        with open(path, "rb") as f:
            before = f.read()

        with patch("results.csv.writer", side_effect=OSError("disk full")):
            with self.assertLogs("results", level="ERROR"):
                with self.assertRaises(ResultFileError):
                    write_csv(path, ResultTable(["x"], [(1,)]))

        with open(path, "rb") as f:
            self.assertEqual(f.read(), before)
        self.assertEqual(os.listdir(self.tmp), ["decay.csv"])

    def test_column(self):
        self.assertEqual(self.table.column("n_exc"), [2.0, 1.25])
        with self.assertRaises(ValueError):
            self.table.column("g2")

    def test_result_file_error_is_os_error(self):
        self.assertTrue(issubclass(ResultFileError, OSError))


class TestSweep(unittest.TestCase):

    def test_order_is_preserved(self):
        items = list(range(40))
        for threads in (1, 4):
            with self.subTest(threads=threads):
                self.assertEqual(map_points(lambda x: x * x, items, threads), [x * x for x in items])

    def test_uses_worker_threads(self):
        seen = set()
        barrier = threading.Barrier(2, timeout=5)

        def record(_):
            seen.add(threading.get_ident())
            barrier.wait()

        map_points(record, range(2), threads=2)
        self.assertEqual(len(seen), 2)

    def test_first_error_propagates(self):
        def fail_on_three(x):
            if x == 3:
                raise ArithmeticError("bad point")
            return x

        with self.assertRaises(ArithmeticError):
            map_points(fail_on_three, range(6), threads=3)

    def test_resolve_threads(self):
        self.assertEqual(resolve_threads(None), config.DEFAULT_THREADS)
        self.assertEqual(resolve_threads(3), 3)
        with self.assertRaises(ValueError):
            resolve_threads(0)

    def test_empty_grid(self):
        self.assertEqual(map_points(lambda x: x, [], threads=4), [])


if __name__ == '__main__':
    unittest.main()
