#!/usr/bin/env python3
"""
Unit tests for the master-equation engine in liouvillian.py
"""

import os
import sys
import unittest

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from liouvillian import (DegenerateSteadyStateError, FlaggedDecompositionError, StepRefinementError,
                         build_hamiltonian, build_liouvillian, propagate, propagate_ode, propagate_spectral,
                         spectral_decompose, steady_state, three_op_correlation, two_time_correlation,
                         unvec, vec)
from model import EE, DetectionGeometry, detection_operator, named_state, sigma
from stationary import n_exc
from tests.fixtures import random_density_matrix, random_operator, standard_params


class TestGenerator(unittest.TestCase):
    """Structural properties of H and L"""

    def setUp(self):
        self.rng = np.random.default_rng(11)
        self.params = [
            standard_params(),
            standard_params(gamma_star=2.0, rabi=(3.0, 1.5), delta=5.0, laser_detuning=-4.0),
            standard_params(gamma12=-0.2, omega12=-3.0, gamma_star=0.7, rabi=10.0),
        ]

    def test_vectorization_convention(self):
        a, b, rho = random_operator(self.rng), random_operator(self.rng), random_operator(self.rng)
        np.testing.assert_allclose(np.kron(b.T, a) @ vec(rho), vec(a @ rho @ b), atol=1e-12)
        np.testing.assert_allclose(unvec(vec(rho)), rho)

    def test_hamiltonian_is_hermitian(self):
        for p in self.params:
            h = build_hamiltonian(p)
            np.testing.assert_allclose(h, h.conj().T, atol=1e-15)

    def test_detunings(self):
        h = build_hamiltonian(standard_params(delta=4.0, laser_detuning=1.0, omega12=0.0))
        np.testing.assert_allclose(np.diag(h).real, [0.0, 1.0, -3.0, -2.0], atol=1e-15)

    def test_coupled_pair_levels(self):
        """Undriven, resonant pair: G and E at 0, S at +Omega12 and A at -Omega12"""
        levels = np.linalg.eigvalsh(build_hamiltonian(standard_params()))
        np.testing.assert_allclose(levels, [-20.0, 0.0, 0.0, 20.0], atol=1e-12)

    def test_trace_preservation(self):
        identity = vec(np.eye(4))
        for p in self.params:
            with self.subTest(p=p):
                self.assertLess(np.max(np.abs(identity @ build_liouvillian(p))), 1e-12)

    def test_hermiticity_preservation(self):
        for p in self.params:
            rho = random_density_matrix(self.rng)
            image = unvec(build_liouvillian(p) @ vec(rho))
            np.testing.assert_allclose(image, image.conj().T, atol=1e-12)

    def test_symmetric_state_decays_at_superradiant_rate(self):
        rho = named_state("S")
        image = unvec(build_liouvillian(standard_params()) @ vec(rho))
        s = np.array([0, 1, 1, 0]) / np.sqrt(2)
        self.assertAlmostEqual((s @ image @ s).real, -1.3, places=12)


class TestSteadyState(unittest.TestCase):

    def test_undriven_pair_relaxes_to_ground(self):
        rho = steady_state(build_liouvillian(standard_params(gamma_star=1.0)))
        np.testing.assert_allclose(rho, named_state("G"), atol=1e-10)

    def test_driven_state_is_valid(self):
        rho = steady_state(build_liouvillian(standard_params(rabi=4.0, gamma_star=3.0, delta=5.0)))
        self.assertAlmostEqual(np.trace(rho).real, 1.0, places=12)
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-14)
        self.assertGreater(np.min(np.linalg.eigvalsh(rho)), -1e-10)

    def test_two_photon_saturation(self):
        rho = steady_state(build_liouvillian(standard_params(rabi=10.0)))
        self.assertLess(abs(n_exc(rho) - 1.0), 0.1)

    def test_dark_state_makes_kernel_degenerate(self):
        p = standard_params(alpha=1.0, gamma12=1.0)
        with self.assertRaises(DegenerateSteadyStateError) as ctx:
            steady_state(build_liouvillian(p))
        self.assertGreaterEqual(ctx.exception.dimension, 2)
        self.assertIn("dimension", str(ctx.exception))


class TestSpectralDecomposition(unittest.TestCase):

    def setUp(self):
        self.liouvillian = build_liouvillian(standard_params(gamma_star=0.5, rabi=2.0, delta=5.0))
        self.dec = spectral_decompose(self.liouvillian)

    def test_biorthonormal_and_complete(self):
        identity = np.eye(16)
        np.testing.assert_allclose(self.dec.left @ self.dec.right, identity, atol=1e-8)
        np.testing.assert_allclose(self.dec.right @ self.dec.left, identity, atol=1e-8)
        self.assertFalse(self.dec.flagged)

    def test_spectrum_is_stable(self):
        eigenvalues = self.dec.eigenvalues
        self.assertTrue(np.all(eigenvalues.real <= 1e-10))
        self.assertEqual(np.count_nonzero(np.abs(eigenvalues) < 1e-9), 1)
        self.assertTrue(np.all(np.diff(eigenvalues.real) <= 1e-9))

    def test_zero_mode_is_steady_state(self):
        rho = self.dec.right_operator(self.dec.steady_index)
        np.testing.assert_allclose(rho, steady_state(self.liouvillian), atol=1e-9)

    def test_free_pair_rates(self):
        eigenvalues = spectral_decompose(build_liouvillian(standard_params())).eigenvalues
        for rate in (-1.3, -0.7, -2.0):
            with self.subTest(rate=rate):
                self.assertLess(np.min(np.abs(eigenvalues - rate)), 1e-9)


class TestPropagation(unittest.TestCase):

    def setUp(self):
        self.times = np.linspace(0.0, 10.0, 41)

    def test_spectral_matches_ode(self):
        for tag in ("A", "E"):
            for gamma_star in (0.0, 0.5, 2.0):
                with self.subTest(tag=tag, gamma_star=gamma_star):
                    rho0 = named_state(tag)
                    liouvillian = build_liouvillian(standard_params(gamma_star=gamma_star))
                    spectral = propagate_spectral(spectral_decompose(liouvillian), rho0, self.times)
                    ode = propagate_ode(liouvillian, rho0, self.times)
                    self.assertLess(np.max(np.abs(spectral - ode)), 1e-6)

    def test_scalar_time_shape(self):
        dec = spectral_decompose(build_liouvillian(standard_params()))
        self.assertEqual(propagate_spectral(dec, named_state("E"), 0.3).shape, (4, 4))
        self.assertEqual(propagate_spectral(dec, named_state("E"), self.times).shape, (41, 4, 4))

    def test_doubly_excited_population_decays_at_two_gamma0(self):
        dec = spectral_decompose(build_liouvillian(standard_params(gamma_star=1.5)))
        states = propagate_spectral(dec, named_state("E"), self.times)
        np.testing.assert_allclose(states[:, EE, EE].real, np.exp(-2.0 * self.times), atol=1e-10)

    def test_flagged_decomposition(self):
        liouvillian = build_liouvillian(standard_params(gamma_star=0.5))
        flagged = spectral_decompose(liouvillian, condition_limit=1.0)
        self.assertTrue(flagged.flagged)
        with self.assertRaises(FlaggedDecompositionError):
            propagate_spectral(flagged, named_state("S"), 1.0)
        reference = propagate(spectral_decompose(liouvillian), named_state("S"), self.times[:9])
        fallback = propagate(flagged, named_state("S"), self.times[:9])
        self.assertLess(np.max(np.abs(reference - fallback)), 1e-6)

    def test_decreasing_grid_rejected(self):
        with self.assertRaises(ValueError):
            propagate_ode(build_liouvillian(standard_params()), named_state("E"), [0.0, 1.0, 0.5])

    def test_step_refinement(self):
        liouvillian = build_liouvillian(standard_params(gamma_star=0.5))
        propagate_ode(liouvillian, named_state("A"), [0.0, 0.5, 1.0], check_step=True)
        with self.assertRaises(StepRefinementError):
            propagate_ode(liouvillian, named_state("E"), [0.0, 1.0], step=0.5, check_step=True)


class TestRegressionCorrelations(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(3)
        self.p = standard_params(gamma_star=0.8, delta=2.0)
        self.dec = spectral_decompose(build_liouvillian(self.p))
        self.rho0 = random_density_matrix(self.rng)

    def test_zero_delay_limits(self):
        a, b, c = (random_operator(self.rng) for _ in range(3))
        t = 0.7
        rho_t = propagate_spectral(self.dec, self.rho0, t)
        self.assertAlmostEqual(two_time_correlation(self.dec, self.rho0, a, b, t, 0.0),
                               np.trace(a @ b @ rho_t), places=9)
        self.assertAlmostEqual(three_op_correlation(self.dec, self.rho0, a, np.eye(4), c, t, 0.0),
                               np.trace(a @ c @ rho_t), places=9)

    def test_broadcasting(self):
        d = detection_operator(DetectionGeometry(0.4))
        taus = np.linspace(0.0, 2.0, 7)
        values = two_time_correlation(self.dec, self.rho0, d.conj().T, d, 0.5, taus)
        self.assertEqual(values.shape, (7,))
        self.assertIsInstance(two_time_correlation(self.dec, self.rho0, d.conj().T, d, 0.5, 0.1), complex)

    def test_symmetric_coherence_decay(self):
        """From |S> at phi = 0 the field correlation decays at (gamma0 + gamma12)/2"""
        p = standard_params()
        dec = spectral_decompose(build_liouvillian(p))
        d = detection_operator(DetectionGeometry(0.0))
        taus = np.linspace(0.0, 5.0, 11)
        values = two_time_correlation(dec, named_state("S"), d.conj().T, d, 0.0, taus)
        np.testing.assert_allclose(np.abs(values), np.exp(-0.65 * taus), atol=1e-8)

    def test_ode_path_matches_spectral(self):
        flagged = spectral_decompose(build_liouvillian(self.p), condition_limit=1.0)
        d = detection_operator(DetectionGeometry(0.0))
        t = np.array([0.0, 0.5, 0.5])
        tau = np.array([0.2, 0.0, 1.0])
        spectral = three_op_correlation(self.dec, self.rho0, d.conj().T, d.conj().T @ d, d, t, tau)
        fallback = three_op_correlation(flagged, self.rho0, d.conj().T, d.conj().T @ d, d, t, tau)
        np.testing.assert_allclose(fallback, spectral, atol=1e-6)

    def test_negative_times_rejected(self):
        d = sigma(1)
        with self.assertRaises(ValueError):
            two_time_correlation(self.dec, self.rho0, d.conj().T, d, -0.1, 0.0)


if __name__ == '__main__':
    unittest.main()
