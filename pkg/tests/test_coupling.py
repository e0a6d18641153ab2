#!/usr/bin/env python3
"""
Unit tests for the dyadic Green's function and coupling rates in coupling.py
"""

import math
import os
import sys
import unittest

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from coupling import (Geometry, GeometryError, NotAchievableError, coupling_rates, coupling_sweep,
                      distance_for_coupling, dyadic_green, green_scalar)

ALPHA = 0.3


class TestGreenFunction(unittest.TestCase):
    """'H' configuration: both dipoles along z, separation along x"""

    def test_standard_pair_coupling(self):
        omega12, gamma12 = coupling_rates(green_scalar(Geometry.h_configuration(0.0357), ALPHA))
        self.assertLess(abs(omega12 - 20.0) / 20.0, 0.03)
        self.assertLess(abs(gamma12 - 0.3) / 0.3, 0.05)
        self.assertGreater(omega12, 0.0)

    def test_near_field_limits(self):
        geom = Geometry.h_configuration(1e-4)
        green = green_scalar(geom, ALPHA)
        _, gamma12 = coupling_rates(green)
        self.assertAlmostEqual(gamma12, ALPHA, delta=1e-3)
        self.assertAlmostEqual(green.real * geom.kr**3 / (0.75 * ALPHA), 1.0, delta=1e-3)

    def test_cross_decay_bounded(self):
        for separation in np.geomspace(1e-3, 2.0, 60):
            with self.subTest(separation=separation):
                _, gamma12 = coupling_rates(green_scalar(Geometry.h_configuration(separation), ALPHA))
                self.assertLessEqual(abs(gamma12), ALPHA + 1e-9)

    def test_symmetric_in_dipoles(self):
        d1, d2 = (0.0, 0.0, 1.0), (0.0, 0.6, 0.8)
        forward = green_scalar(Geometry(0.1, d1, d2), ALPHA)
        backward = green_scalar(Geometry(0.1, d2, d1), ALPHA)
        self.assertAlmostEqual(abs(forward - backward), 0.0, places=12)

    def test_dyad_is_symmetric(self):
        dyad = dyadic_green(1.3, (1.0, 0.0, 0.0), ALPHA)
        np.testing.assert_allclose(dyad, dyad.T, atol=1e-15)

    def test_invalid_geometry(self):
        with self.assertRaises(GeometryError):
            dyadic_green(0.0, (1.0, 0.0, 0.0), ALPHA)
        with self.assertRaises(GeometryError):
            Geometry(0.0)
        with self.assertRaises(GeometryError):
            Geometry(0.1, dipole1=(0.0, 0.0, 2.0))
        with self.assertRaises(GeometryError):
            Geometry(0.1, axis=(1.0, 0.0))

    def test_geometry_error_is_value_error(self):
        with self.assertRaises(ValueError):
            Geometry(-1.0)


class TestDistanceSearch(unittest.TestCase):

    def setUp(self):
        self.template = Geometry.h_configuration(0.1)

    def test_standard_coupling_distance(self):
        separation = distance_for_coupling(20.0, self.template, ALPHA)
        self.assertLess(abs(separation - 0.0357) / 0.0357, 0.02)
        omega12, _ = coupling_rates(green_scalar(self.template.with_separation(separation), ALPHA))
        self.assertLess(abs(omega12 - 20.0), 1e-6 * 20.0)

    def test_unreachable_target(self):
        with self.assertRaises(NotAchievableError):
            distance_for_coupling(1e10, self.template, ALPHA)

    def test_sweep_rows(self):
        rows = coupling_sweep(self.template, [0.02, 0.0357, 0.1], ALPHA)
        self.assertEqual(len(rows), 3)
        separation, kr, green_re, green_im, omega12, gamma12 = rows[1]
        self.assertAlmostEqual(kr, 2 * math.pi * 0.0357)
        self.assertEqual(omega12, green_re)
        self.assertAlmostEqual(gamma12, -2 * green_im)


if __name__ == '__main__':
    unittest.main()
