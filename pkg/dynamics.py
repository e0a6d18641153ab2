# File: dynamics.py
"""
Free evolution of the emitter pair.

Time-resolved excitation number, first-order field correlation and its
spectrogram, second-order correlation g2(t, t+tau), plus rate fits and the
shape detector used on g2(t, t). All observables read a single cached
decomposition of the undriven Liouvillian and fall back to the RK4 path when
that decomposition is flagged as ill-conditioned.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.integrate import simpson
from scipy.optimize import least_squares
from scipy.signal import find_peaks

from analytic import analytic_eigensystem, closed_form_G2  # noqa: F401 (re-exported)
from liouvillian import (NumericalError, build_liouvillian, propagate, regression_weights,
                         spectral_decompose, three_op_correlation, two_time_correlation)
from model import DetectionGeometry, ParameterError, SystemParams, detection_operator, named_state
from stationary import UndefinedCorrelationError, g2_zero, n_exc

logger = logging.getLogger(__name__)

_ZERO_MODE_TOL = 1e-10
_INTENSITY_FLOOR = 1e-15
QUADRATURE_TAU_MAX = 40.0
QUADRATURE_STEP = 2.5e-3
_OMEGA_CHUNK = 64


class FitError(NumericalError):
    """A decay-rate fit could not be performed or did not converge."""
    pass


@dataclass(frozen=True)
class Spectrogram:
    """G1 spectrum; values[i, k] belongs to t_grid[i], omega_grid[k]."""
    t_grid: np.ndarray
    omega_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        for name in ("t_grid", "omega_grid"):
            grid = np.asarray(getattr(self, name), dtype=float)
            if grid.ndim != 1 or (grid.size > 1 and np.any(np.diff(grid) <= 0)):
                raise ParameterError(f"{name} must be one-dimensional and strictly increasing")
            object.__setattr__(self, name, grid)


def _initial_state(rho0) -> np.ndarray:
    if isinstance(rho0, np.ndarray):
        return np.asarray(rho0, dtype=complex)
    return named_state(rho0)


class FreeEvolution:
    """
    Cached generator and eigen-decomposition for one parameter set.

    Safe to share between threads once constructed.
    """

    def __init__(self, params: SystemParams, condition_limit: Optional[float] = None):
        self.params = params
        self.generator = build_liouvillian(params)
        self.decomposition = spectral_decompose(self.generator, condition_limit)

    @property
    def uses_ode(self) -> bool:
        return self.decomposition.flagged

    def states(self, rho0, t_grid) -> np.ndarray:
        return propagate(self.decomposition, _initial_state(rho0), np.asarray(t_grid, dtype=float))

    def n_exc(self, rho0, t_grid) -> np.ndarray:
        states = self.states(rho0, np.atleast_1d(t_grid))
        return np.array([n_exc(state) for state in states.reshape(-1, 4, 4)])

    def g1(self, rho0, geom: DetectionGeometry, t, tau):
        d = detection_operator(geom)
        return two_time_correlation(self.decomposition, _initial_state(rho0), d.conj().T, d, t, tau)

    def intensity(self, rho0, geom: DetectionGeometry, t) -> np.ndarray:
        return np.real(self.g1(rho0, geom, t, np.zeros_like(np.asarray(t, dtype=float))))

    def G2(self, rho0, geom: DetectionGeometry, t, tau):
        """Unnormalized <D^dag(t) D^dag D(t+tau) D(t)>."""
        d = detection_operator(geom)
        dag = d.conj().T
        return three_op_correlation(self.decomposition, _initial_state(rho0), dag, dag @ d, d, t, tau)

    def g2(self, rho0, geom: DetectionGeometry, t, tau, undefined: str = "raise"):
        """
        Normalized g2(t, t+tau).

        With undefined="nan" the points where either intensity vanishes are
        set to nan instead of raising UndefinedCorrelationError.
        """
        if undefined not in ("raise", "nan"):
            raise ParameterError(f"undefined must be 'raise' or 'nan', got '{undefined}'")
        t_arr, tau_arr = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(tau, dtype=float))
        numerator = np.real(self.G2(rho0, geom, t_arr, tau_arr))
        early = self.intensity(rho0, geom, t_arr)
        late = self.intensity(rho0, geom, t_arr + tau_arr)
        dark = (early <= _INTENSITY_FLOOR) | (late <= _INTENSITY_FLOOR)
        if np.any(dark) and undefined == "raise":
            raise UndefinedCorrelationError("Detected intensity vanishes; g2(t, t+tau) is undefined")
        with np.errstate(divide="ignore", invalid="ignore"):
            result = np.where(dark, np.nan, numerator / np.where(dark, 1.0, early * late))
        return float(result) if result.ndim == 0 else result

    def g2_equal_time(self, rho0, geom: DetectionGeometry, t_grid) -> np.ndarray:
        states = self.states(rho0, np.atleast_1d(t_grid))
        return np.array([g2_zero(state, geom) for state in states])

    def g1_spectrum(self, rho0, geom: DetectionGeometry, t_grid, omega_grid,
                    method: str = "resolvent", tau_max: float = QUADRATURE_TAU_MAX,
                    tau_step: float = QUADRATURE_STEP) -> Spectrogram:
        t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
        omega_grid = np.atleast_1d(np.asarray(omega_grid, dtype=float))
        if method == "resolvent" and self.uses_ode:
            logger.warning("Decomposition is flagged; computing the G1 spectrum by quadrature")
            method = "quadrature"
        if method == "resolvent":
            values = self._resolvent_spectrum(_initial_state(rho0), geom, t_grid, omega_grid)
        elif method == "quadrature":
            values = self._quadrature_spectrum(rho0, geom, t_grid, omega_grid, tau_max, tau_step)
        else:
            raise ParameterError(f"Unknown spectrum method '{method}', expected 'resolvent' or 'quadrature'")
        return Spectrogram(t_grid, omega_grid, values)

    def _resolvent_spectrum(self, rho0, geom, t_grid, omega_grid) -> np.ndarray:
        dec = self.decomposition
        d = detection_operator(geom)
        coefficients, sandwich, readout = regression_weights(dec, rho0, d.conj().T, d)
        early = np.exp(np.outer(t_grid, dec.eigenvalues)) * coefficients
        weights = (early @ sandwich.T) * readout

        keep = np.abs(dec.eigenvalues) > _ZERO_MODE_TOL
        dropped = np.max(np.abs(weights[:, ~keep])) if np.any(~keep) else 0.0
        if dropped > 1e-12:
            logger.warning("Dropping delta(omega) contribution of weight %.3g from stationary modes", dropped)
        resolvent = 1.0 / (1j * omega_grid[:, None] + dec.eigenvalues[None, keep])
        return -np.real(weights[:, keep] @ resolvent.T)

    def _quadrature_spectrum(self, rho0, geom, t_grid, omega_grid, tau_max, tau_step) -> np.ndarray:
        steps = int(round(tau_max / tau_step))
        taus = np.linspace(0.0, tau_max, steps + 1)
        values = np.empty((t_grid.size, omega_grid.size))
        for i, t in enumerate(t_grid):
            correlation = np.asarray(self.g1(rho0, geom, t, taus))
            for start in range(0, omega_grid.size, _OMEGA_CHUNK):
                chunk = omega_grid[start:start + _OMEGA_CHUNK]
                integrand = np.exp(1j * np.outer(chunk, taus)) * correlation[None, :]
                values[i, start:start + chunk.size] = np.real(simpson(integrand, x=taus, axis=1))
        return values


# --- Module-level operations ---
def n_exc_trajectory(p: SystemParams, rho0, t_grid) -> np.ndarray:
    return FreeEvolution(p).n_exc(rho0, t_grid)


def g1(p: SystemParams, rho0, geom: DetectionGeometry, t, tau):
    """G1(t, t+tau) = <D^dag(t) D(t+tau)>."""
    return FreeEvolution(p).g1(rho0, geom, t, tau)


def g1_spectrum(p: SystemParams, rho0, geom: DetectionGeometry, t_grid, omega_grid,
                method: str = "resolvent") -> Spectrogram:
    """
    Spectrogram Re int_0^inf e^{i omega tau} G1(t, t+tau) dtau.

    "resolvent" sums -Re e^{lambda_mu t} C_mu,mu' / (i omega + lambda_mu') over
    the modes, so a mode with eigenvalue lambda peaks at omega = -Im lambda.
    "quadrature" integrates numerically up to tau = 40.
    """
    return FreeEvolution(p).g1_spectrum(rho0, geom, t_grid, omega_grid, method)


def spectrogram_peaks(spec: Spectrogram, t_index: int = 0, prominence: float = 1e-3) -> np.ndarray:
    """Frequencies of the spectral lines at one time slice."""
    indices, _ = find_peaks(spec.values[t_index], prominence=prominence)
    return spec.omega_grid[indices]


def g2_time(p: SystemParams, rho0, geom: DetectionGeometry, t, tau):
    """
    Normalized g2(t, t+tau) = G2 / (I(t) I(t+tau)).

    Raises:
        UndefinedCorrelationError: If an intensity vanishes.
    """
    return FreeEvolution(p).g2(rho0, geom, t, tau)


def g2_equal_time(p: SystemParams, rho0, geom: DetectionGeometry, t_grid) -> np.ndarray:
    return FreeEvolution(p).g2_equal_time(rho0, geom, t_grid)


def g2_equal_time_population_form(rho_t: np.ndarray, geom: DetectionGeometry):
    """
    g2(t, t) from populations: rho_EE / (rho_EE + rho_SS cos^2(phi/2) + rho_AA sin^2(phi/2))^2.

    Valid for states without emitter-antisymmetric coherence (free evolution
    of the G, S, A, E populations). Accepts one matrix or a stack.
    """
    states = np.asarray(rho_t, dtype=complex)
    single = states.ndim == 2
    states = states.reshape(-1, 4, 4)
    sym, anti = named_state("S"), named_state("A")
    doubly = np.real(states[:, 3, 3])
    bright = (np.real(np.einsum("ij,nji->n", sym, states)) * math.cos(0.5 * geom.phi) ** 2
              + np.real(np.einsum("ij,nji->n", anti, states)) * math.sin(0.5 * geom.phi) ** 2)
    intensity = doubly + bright
    if np.any(intensity**2 <= 1e-30):
        raise UndefinedCorrelationError("Detected intensity vanishes; g2(t, t) is undefined")
    result = doubly / intensity**2
    return float(result[0]) if single else result


def independent_reference(p: SystemParams) -> SystemParams:
    """Same emitters without dipole-dipole coupling."""
    return p.replace(omega12=0.0, gamma12=0.0)


def has_dip_then_peak(values: Sequence[float], threshold: float = 0.05) -> bool:
    """True if the series drops below 1 - threshold and later rises above 1 + threshold."""
    series = np.asarray(values, dtype=float)
    below = np.nonzero(series < 1.0 - threshold)[0]
    if below.size == 0:
        return False
    return bool(np.any(series[below[0]:] > 1.0 + threshold))


# --- Rate fits ---
def fit_decay_rate(t, values, window: Optional[Tuple[float, float]] = None) -> float:
    """
    Single exponential rate from a log-linear least-squares fit.

    Raises:
        FitError: If fewer than two points fall in the window or any value is non-positive.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = np.ones(t.shape, dtype=bool) if window is None else (t >= window[0]) & (t <= window[1])
    if np.count_nonzero(mask) < 2:
        raise FitError("Need at least two points in the fit window")
    if np.any(values[mask] <= 0):
        raise FitError("Log-linear fit needs strictly positive values")
    slope, _ = np.polyfit(t[mask], np.log(values[mask]), 1)
    return float(-slope)


def fit_biexponential(t, values, seeds: Tuple[float, float]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Fits a e^{-r1 t} + b e^{-r2 t} by variable projection.

    The rates are optimized with least_squares; for each trial pair the
    amplitudes follow from a linear least-squares solve.

    Returns:
        (rates ascending, matching amplitudes)
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)

    def amplitudes(rates):
        basis = np.exp(-np.outer(t, rates))
        coefficients, *_ = scipy.linalg.lstsq(basis, values)
        return basis, coefficients

    def residual(rates):
        basis, coefficients = amplitudes(rates)
        return basis @ coefficients - values

    result = least_squares(residual, np.asarray(seeds, dtype=float), bounds=(0.0, np.inf),
                           xtol=1e-12, ftol=1e-12, gtol=1e-12)
    if not result.success:
        raise FitError(f"Bi-exponential fit did not converge: {result.message}")
    order = np.argsort(result.x)
    rates = result.x[order]
    _, coefficients = amplitudes(rates)
    logger.debug("Bi-exponential fit rates %s (cost %.3g)", rates, result.cost)
    return rates, coefficients
