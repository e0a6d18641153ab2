#!/usr/bin/env python3
"""
Checks the closed forms in analytic.py against the numeric engine.
"""

import math
import os
import sys
import unittest

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from analytic import (AnalyticError, Excitation, analytic_eigensystem, classify_E_regime, closed_form_G2,
                      exact_populations_two_photon, free_decay_rates, large_dephasing_S_line,
                      lorentzian_E_amplitude, lorentzian_S_peak, projection_coefficients_from_E,
                      saturation_expansion_coefficients, superradiant_g2_estimate, superradiant_populations_estimate,
                      threshold_gamma_star, threshold_rabi, two_photon_populations_estimate)
from dynamics import FreeEvolution
from liouvillian import build_liouvillian, propagate_ode, spectral_decompose, vec
from model import DetectionGeometry, named_state
from stationary import g2_zero, n_exc, solve_steady_state
from tests.fixtures import standard_params

# Undriven pairs away from the doubly-excited exceptional point.
FREE_PAIRS = [
    {"gamma12": 0.3, "gamma_star": 0.0},
    {"gamma12": 0.3, "gamma_star": 2.0},
    {"gamma12": -0.2, "gamma_star": 0.7, "omega12": -3.0},
    {"alpha": 1.0, "gamma12": 0.8, "gamma_star": 5.0, "omega12": 1.5},
    {"gamma12": 0.05, "gamma_star": 0.2, "omega12": 0.0},
]


class TestThresholds(unittest.TestCase):

    def setUp(self):
        self.p = standard_params()

    def test_standard_values(self):
        self.assertAlmostEqual(threshold_gamma_star(self.p, "two_photon"), 1600.0 ** (1.0 / 3.0), places=12)
        self.assertAlmostEqual(threshold_gamma_star(self.p, "superradiant"), 80.0)
        self.assertAlmostEqual(threshold_rabi(self.p, "two_photon"), math.sqrt(20.0), places=12)
        self.assertAlmostEqual(threshold_rabi(self.p, Excitation.SUPERRADIANT), 40.0)

    def test_uncoupled_pair_has_no_threshold(self):
        p = self.p.replace(omega12=0.0)
        for func in (threshold_gamma_star, threshold_rabi):
            with self.subTest(func=func.__name__):
                with self.assertRaises(AnalyticError):
                    func(p, "two_photon")

    def test_unknown_excitation(self):
        with self.assertRaises(AnalyticError):
            threshold_rabi(self.p, "three_photon")
        with self.assertRaises(ValueError):
            Excitation.parse("")

    def test_laser_detuning_of_schemes(self):
        self.assertEqual(Excitation.parse(" Two_Photon ").laser_detuning(self.p), 0.0)
        self.assertEqual(Excitation.SUPERRADIANT.laser_detuning(self.p), 20.0)


class TestSpectralLines(unittest.TestCase):

    def test_two_photon_amplitude_without_dephasing(self):
        p = standard_params(rabi=5.0)
        numeric = n_exc(solve_steady_state(p))
        self.assertLess(abs(lorentzian_E_amplitude(p) - numeric) / numeric, 0.01)
        self.assertEqual(lorentzian_E_amplitude(p.replace(rabi=0.0)), 0.0)

    def test_regimes(self):
        cases = {0.5: "linear", 4.0: "quadratic", 20.0: "saturated", 30.0: "saturated"}
        for rabi, regime in cases.items():
            with self.subTest(rabi=rabi):
                self.assertEqual(classify_E_regime(standard_params(rabi=rabi)), regime)

    def test_superradiant_peak_weak_drive(self):
        """Weak-drive peak is 2 Omega_R^2 / (gamma0 + gamma12)^2 at gamma_star = 0"""
        p = standard_params(rabi=0.3)
        self.assertAlmostEqual(lorentzian_S_peak(p), 2 * 0.09 / 1.69, places=12)
        self.assertLess(lorentzian_S_peak(p, weak_drive=False), lorentzian_S_peak(p))

    def test_large_dephasing_line(self):
        amplitude, width = large_dephasing_S_line(standard_params(rabi=2.0, gamma_star=40.0))
        self.assertAlmostEqual(amplitude, 0.2)
        self.assertAlmostEqual(width, 20.0)
        with self.assertRaises(AnalyticError):
            large_dephasing_S_line(standard_params(rabi=2.0))


class TestLowIntensityCoefficients(unittest.TestCase):

    def test_linear_coefficient_at_zero_dephasing(self):
        linear, quadratic = saturation_expansion_coefficients(standard_params())
        self.assertAlmostEqual(linear / 1.24869e-3, 1.0, delta=1e-3)
        self.assertEqual(quadratic, math.inf)

    def test_quadratic_sign(self):
        p = standard_params()
        flip = threshold_gamma_star(p, "two_photon")
        _, below = saturation_expansion_coefficients(p.replace(gamma_star=0.5 * flip))
        _, above = saturation_expansion_coefficients(p.replace(gamma_star=2.0 * flip))
        self.assertGreater(below, 0.0)
        self.assertLess(above, 0.0)
        _, uncoupled = saturation_expansion_coefficients(p.replace(omega12=0.0))
        self.assertEqual(uncoupled, -math.inf)


class TestExactPopulations(unittest.TestCase):

    def test_strong_drive_limit(self):
        doubly, single = exact_populations_two_photon(standard_params(rabi=10.0))
        self.assertAlmostEqual(2 * single, 0.957, delta=1e-3)

    def test_two_photon_threshold_identity(self):
        """At Omega_R^2 = gamma0 |Omega12| the pair reaches rho_ee,ee = 2 rho_ee^2"""
        p = standard_params()
        doubly, single = exact_populations_two_photon(p.replace(rabi=threshold_rabi(p, "two_photon")))
        self.assertLess(abs(doubly / (2.0 * single**2) - 1.0), p.gamma0 / abs(p.omega12))
        self.assertEqual(exact_populations_two_photon(p.replace(rabi=0.0)), (0.0, 0.0))

    def test_preconditions(self):
        for changes in ({"gamma_star": 0.1}, {"delta": 1.0}, {"rabi": (1.0, 2.0)}, {"laser_detuning": 1.0}):
            with self.subTest(changes=changes):
                with self.assertRaises(AnalyticError):
                    exact_populations_two_photon(standard_params(rabi=1.0).replace(**changes))

    def test_superradiant_g2_limits(self):
        p = standard_params()
        self.assertAlmostEqual(superradiant_g2_estimate(p), 1.69 / 6400.0, places=15)
        self.assertLess(abs(superradiant_g2_estimate(p.replace(rabi=1e4)) - 1.0), 1e-3)

    def test_dephased_estimates_cross_at_thresholds(self):
        """The doubly-to-single population ratio of each estimate reaches its contour level at the threshold"""
        p = standard_params(rabi=0.1)
        cases = [(two_photon_populations_estimate, "two_photon", 2.0),
                 (superradiant_populations_estimate, "superradiant", 0.5)]
        for estimate, excitation, level in cases:
            with self.subTest(excitation=excitation):
                doubly, single = estimate(p.replace(gamma_star=threshold_gamma_star(p, excitation)))
                self.assertAlmostEqual(doubly / single**2, level, places=9)
                with self.assertRaises(AnalyticError):
                    estimate(p)


class TestFreeEigensystem(unittest.TestCase):

    def test_free_decay_rates(self):
        slow, fast = free_decay_rates(standard_params())
        self.assertAlmostEqual(slow, 0.7, places=14)
        self.assertAlmostEqual(fast, 1.3, places=14)
        slow, fast = free_decay_rates(standard_params(gamma_star=2.0))
        self.assertAlmostEqual(slow, 2.0 - 0.5 * math.hypot(2.0, 0.6), places=12)
        self.assertAlmostEqual(fast, 2.0 + 0.5 * math.hypot(2.0, 0.6), places=12)

    def test_modes_are_eigenoperators(self):
        for changes in FREE_PAIRS:
            p = standard_params(**changes)
            liouvillian = build_liouvillian(p)
            modes = analytic_eigensystem(p)
            for mode in modes:
                with self.subTest(pair=changes, mode=mode.label):
                    right, left = vec(mode.right), vec(mode.left).conj()
                    self.assertLess(np.max(np.abs(liouvillian @ right - mode.eigenvalue * right)), 1e-9)
                    self.assertLess(np.max(np.abs(left @ liouvillian - mode.eigenvalue * left)), 1e-9)
            overlaps = np.array([[np.vdot(vec(a.left), vec(b.right)) for b in modes] for a in modes])
            np.testing.assert_allclose(overlaps, np.eye(4), atol=1e-9)

    def test_random_pairs(self):
        rng = np.random.default_rng(23)
        pairs = []
        while len(pairs) < 10:
            gamma_star, gamma12 = rng.uniform(0.0, 10.0), rng.uniform(-0.3, 0.3)
            # keep clear of the doubly-excited exceptional point gamma_star = 1 - gamma12^2
            if abs(gamma12) > 0.01 and abs(1.0 - gamma12**2 - gamma_star) > 0.05:
                pairs.append((gamma_star, gamma12))
        for gamma_star, gamma12 in pairs:
            p = standard_params(gamma_star=gamma_star, gamma12=gamma12)
            liouvillian = build_liouvillian(p)
            for mode in analytic_eigensystem(p):
                with self.subTest(gamma_star=gamma_star, gamma12=gamma12, mode=mode.label):
                    right, left = vec(mode.right), vec(mode.left)
                    self.assertLess(np.linalg.norm(liouvillian @ right - mode.eigenvalue * right), 1e-9)
                    self.assertLess(np.linalg.norm(liouvillian.conj().T @ left - np.conj(mode.eigenvalue) * left),
                                    1e-9)

    def test_doubly_excited_trajectory_from_modes(self):
        times = np.linspace(0.0, 10.0, 41)
        rho0 = named_state("E")
        for gamma_star in (0.0, 0.5, 2.0):
            with self.subTest(gamma_star=gamma_star):
                p = standard_params(gamma_star=gamma_star)
                rebuilt = np.zeros((times.size, 4, 4), dtype=complex)
                for mode in analytic_eigensystem(p):
                    weight = np.vdot(vec(mode.left), vec(rho0))
                    rebuilt += weight * np.exp(mode.eigenvalue * times)[:, None, None] * mode.right
                ode = propagate_ode(build_liouvillian(p), rho0, times)
                self.assertLess(np.max(np.abs(rebuilt - ode)), 1e-8)

    def test_eigenvalues_in_numeric_spectrum(self):
        p = standard_params(gamma_star=2.0)
        numeric = spectral_decompose(build_liouvillian(p)).eigenvalues
        for mode in analytic_eigensystem(p):
            self.assertLess(np.min(np.abs(numeric - mode.eigenvalue)), 1e-9)

    def test_projection_from_E(self):
        coefficients = projection_coefficients_from_E(standard_params())
        self.assertEqual(coefficients["G"], 1.0)
        self.assertEqual(coefficients["E"], 1.0)

    def test_exceptional_point(self):
        with self.assertRaises(AnalyticError):
            analytic_eigensystem(standard_params(alpha=1.0, gamma12=0.5, gamma_star=0.75))

    def test_preconditions(self):
        for changes in ({"rabi": 1.0}, {"delta": 2.0}, {"gamma12": 0.0}):
            with self.subTest(changes=changes):
                with self.assertRaises(AnalyticError):
                    analytic_eigensystem(standard_params(**changes))


class TestClosedFormG2(unittest.TestCase):

    def setUp(self):
        self.t = np.array([0.0, 0.4, 1.5, 3.0])[:, None]
        self.tau = np.array([0.0, 0.2, 1.0, 2.5])[None, :]

    def test_matches_regression(self):
        for gamma_star in (0.0, 0.5, 2.0):
            p = standard_params(gamma_star=gamma_star)
            evolution = FreeEvolution(p)
            for phi in (0.0, 2 * math.pi * 0.0357, math.pi / 2):
                with self.subTest(gamma_star=gamma_star, phi=phi):
                    geom = DetectionGeometry(phi)
                    numeric = np.real(evolution.G2("E", geom, *np.broadcast_arrays(self.t, self.tau)))
                    np.testing.assert_allclose(closed_form_G2(p, geom, self.t, self.tau), numeric, atol=1e-8)

    def test_unit_at_origin(self):
        for phi in (0.0, 1.0, math.pi):
            self.assertAlmostEqual(closed_form_G2(standard_params(gamma_star=1.0), DetectionGeometry(phi), 0.0, 0.0),
                                   1.0, places=12)

    def test_scalar_returns_float(self):
        self.assertIsInstance(closed_form_G2(standard_params(), DetectionGeometry(0.0), 0.5, 0.5), float)


if __name__ == '__main__':
    unittest.main()
