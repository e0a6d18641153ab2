# File: stationary.py
"""
Steady-state observables of the driven emitter pair.

Excitation spectra, saturation curves and zero-delay photon statistics,
obtained from the null space of the Liouvillian, plus the numeric low-intensity
expansion and contour finders used to check the closed forms in `analytic`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import brentq
from scipy.signal import find_peaks

from analytic import Excitation, threshold_gamma_star, threshold_rabi  # noqa: F401 (threshold_rabi re-exported)
from liouvillian import NumericalError, build_liouvillian, lindblad_superoperator, steady_state, unvec, vec
from model import EE, EG, GE, GG, DetectionGeometry, ParameterError, SystemParams, detection_operator, sigma
from sweep import map_points

logger = logging.getLogger(__name__)

_INTENSITY_FLOOR = 1e-30
# n_exc reached by two emitters under infinite drive.
SATURATED_N_EXC = 1.0


class UndefinedCorrelationError(NumericalError):
    """The detected intensity vanishes, so a normalized correlation is undefined."""
    pass


# --- Result containers ---
@dataclass(frozen=True)
class SpectrumResult:
    """An observable sampled along one swept parameter."""
    axis_name: str
    axis: np.ndarray
    values: np.ndarray
    params: SystemParams
    slopes: Optional[np.ndarray] = None

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        if axis.ndim != 1 or (axis.size > 1 and np.any(np.diff(axis) <= 0)):
            raise ParameterError(f"{self.axis_name} grid must be one-dimensional and strictly increasing")
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "values", np.asarray(self.values))

    @property
    def detuning_grid(self) -> np.ndarray:
        return self.axis


@dataclass(frozen=True)
class SaturationResult:
    rabi: np.ndarray
    intensity: np.ndarray
    n_exc: np.ndarray
    log_slope: np.ndarray
    intensity_over_saturation: np.ndarray
    saturation_intensity: float
    params: SystemParams


@dataclass(frozen=True)
class G2Map:
    """g2(0) on a (gamma_star, rabi) grid; values[i, j] belongs to gamma_star[i], rabi[j]."""
    rabi_grid: np.ndarray
    gamma_star_grid: np.ndarray
    values: np.ndarray
    excitation: Excitation
    params: SystemParams


# --- Single-state observables ---
def n_exc(rho: np.ndarray) -> float:
    """Number of excitations 2 rho_ee,ee + rho_eg,eg + rho_ge,ge."""
    return float(np.real(2.0 * rho[EE, EE] + rho[EG, EG] + rho[GE, GE]))


def redshifted_emission_rate(rho: np.ndarray, p: SystemParams) -> float:
    """
    Rate of phonon-sideband photons, <G|J_vib[rho]|G> - <E|J_vib[rho]|E>.

    J_vib is the incoherent, emitter-local part (1 - alpha) of the decay.
    """
    j_vib = sum(lindblad_superoperator(sigma(i), sigma(i)) for i in (1, 2))
    j_vib = 0.5 * (1.0 - p.alpha) * p.gamma0 * j_vib
    image = unvec(j_vib @ vec(rho))
    return float(np.real(image[GG, GG] - image[EE, EE]))


def solve_steady_state(p: SystemParams) -> np.ndarray:
    return steady_state(build_liouvillian(p))


def g2_zero(rho: np.ndarray, geom: Optional[DetectionGeometry] = None) -> float:
    """
    Zero-delay second-order correlation <D^dag D^dag D D>/<D^dag D>^2.

    Raises:
        UndefinedCorrelationError: If <D^dag D>^2 <= 1e-30.
    """
    d = detection_operator(geom or DetectionGeometry.perpendicular())
    dd = d.conj().T @ d
    intensity = float(np.real(np.trace(dd @ rho)))
    if intensity**2 <= _INTENSITY_FLOOR:
        raise UndefinedCorrelationError(f"Detected intensity {intensity:.3g} vanishes; g2(0) is undefined")
    pairs = float(np.real(np.trace(d.conj().T @ d.conj().T @ d @ d @ rho)))
    return pairs / intensity**2


def g2_zero_population_form(rho: np.ndarray) -> float:
    """g2(0) for perpendicular detection written with density-matrix elements."""
    intensity = np.real(2.0 * rho[EE, EE] + rho[EG, EG] + rho[GE, GE] + rho[EG, GE] + rho[GE, EG])
    if intensity**2 <= 4.0 * _INTENSITY_FLOOR:
        raise UndefinedCorrelationError("Detected intensity vanishes; g2(0) is undefined")
    return float(4.0 * np.real(rho[EE, EE]) / intensity**2)


def population_ratio(rho: np.ndarray) -> float:
    """rho_ee,ee / rho_ee^2 with rho_ee the mean single-emitter excited population."""
    single = np.real(rho[EE, EE] + 0.5 * (rho[EG, EG] + rho[GE, GE]))
    if single**2 <= _INTENSITY_FLOOR:
        raise UndefinedCorrelationError("Excited population vanishes; population ratio is undefined")
    return float(np.real(rho[EE, EE]) / single**2)


# --- Sweeps ---
def excitation_spectrum(p: SystemParams, detuning_grid: Sequence[float],
                        threads: Optional[int] = None) -> SpectrumResult:
    """n_exc of the steady state as the laser detuning is swept."""
    grid = np.asarray(detuning_grid, dtype=float)

    def point(detuning):
        return n_exc(solve_steady_state(p.replace(laser_detuning=float(detuning))))

    values = map_points(point, grid, threads, label="excitation spectrum")
    return SpectrumResult("detuning", grid, np.array(values), p)


def find_spectral_peaks(result: SpectrumResult, prominence: float = 1e-3) -> np.ndarray:
    """Axis positions of local maxima with at least the given absolute prominence."""
    indices, _ = find_peaks(np.real(result.values), prominence=prominence)
    return result.axis[indices]


def _saturation_intensity(intensity: np.ndarray, values: np.ndarray) -> float:
    """Intensity where the curve first reaches half the infinite-drive n_exc."""
    half = 0.5 * SATURATED_N_EXC
    above = np.nonzero(values >= half)[0]
    if above.size == 0 or above[0] == 0:
        return math.nan
    k = above[0]
    x0, x1 = np.log(intensity[k - 1]), np.log(intensity[k])
    y0, y1 = np.log(values[k - 1]), np.log(values[k])
    return float(np.exp(x0 + (np.log(half) - y0) * (x1 - x0) / (y1 - y0)))


def saturation_curve(p: SystemParams, rabi_grid: Sequence[float],
                     threads: Optional[int] = None) -> SaturationResult:
    """
    n_exc versus drive intensity Omega_R^2 at the laser detuning of p.

    Args:
        p: Parameters; the rabi field is replaced by each grid value (equal drive).
        rabi_grid: Positive, strictly increasing Rabi frequencies.
    """
    rabi = np.asarray(rabi_grid, dtype=float)
    if rabi.size < 2 or np.any(rabi <= 0) or np.any(np.diff(rabi) <= 0):
        raise ParameterError("Saturation curve needs at least two positive, increasing Rabi frequencies")

    def point(value):
        return n_exc(solve_steady_state(p.replace(rabi=float(value))))

    values = np.array(map_points(point, rabi, threads, label="saturation curve"))
    intensity = rabi**2
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.gradient(np.log(values), np.log(intensity))
    saturation = _saturation_intensity(intensity, values)
    if math.isnan(saturation):
        logger.warning("Saturation curve never reaches n_exc = %.2f; I/I_sat left undefined",
                       0.5 * SATURATED_N_EXC)
    return SaturationResult(rabi, intensity, values, slope, intensity / saturation, saturation, p)


def g2_zero_map(p: SystemParams, rabi_grid: Sequence[float], gamma_star_grid: Sequence[float],
                excitation=Excitation.TWO_PHOTON, geom: Optional[DetectionGeometry] = None,
                threads: Optional[int] = None) -> G2Map:
    """g2(0) of the steady state over a (gamma_star, rabi) grid for one drive scheme."""
    excitation = Excitation.parse(excitation)
    rabi = np.asarray(rabi_grid, dtype=float)
    dephasing = np.asarray(gamma_star_grid, dtype=float)
    base = p.replace(laser_detuning=excitation.laser_detuning(p))
    points = [(gs, r) for gs in dephasing for r in rabi]

    def point(item):
        gs, r = item
        return g2_zero(solve_steady_state(base.replace(gamma_star=float(gs), rabi=float(r))), geom)

    values = map_points(point, points, threads, label=f"g2(0) map ({excitation.value})")
    return G2Map(rabi, dephasing, np.array(values).reshape(dephasing.size, rabi.size), excitation, p)


# --- Low-intensity expansion ---
def saturation_coefficients_numeric(p: SystemParams) -> Tuple[float, float]:
    """
    Taylor coefficients of n_exc in Omega_R^2 and Omega_R^4 at the laser detuning of p.

    Expands the steady state in powers of the (equal) drive: L0 rho_k = -L1 rho_{k-1}
    with Tr rho_k = 0 for k >= 1, solved by least squares on the augmented system.
    """
    undriven = p.replace(rabi=0.0)
    l0 = build_liouvillian(undriven)
    l1 = build_liouvillian(p.replace(rabi=1.0)) - l0
    trace_row = vec(np.eye(4)).conj()[None, :]
    augmented = np.vstack([l0, trace_row])

    orders = [vec(steady_state(l0))]
    for _ in range(4):
        rhs = np.concatenate([-l1 @ orders[-1], [0.0]])
        solution, *_ = scipy.linalg.lstsq(augmented, rhs)
        orders.append(solution)
    return n_exc(unvec(orders[2])), n_exc(unvec(orders[4]))


def quadratic_sign_flip(p: SystemParams, bracket: Optional[Tuple[float, float]] = None) -> float:
    """
    Dephasing rate at which the Omega_R^4 coefficient of n_exc changes sign.

    The default bracket spans a factor 4 either side of the closed-form
    two-photon threshold.

    Raises:
        AnalyticError: If no bracket is given and Omega12 = 0.
        NumericalError: If the coefficient has the same sign at both bracket ends.
    """
    def quadratic(gamma_star):
        return saturation_coefficients_numeric(p.replace(gamma_star=float(gamma_star)))[1]

    if bracket is None:
        estimate = threshold_gamma_star(p, Excitation.TWO_PHOTON)
        bracket = (0.25 * estimate, 4.0 * estimate)
    lo, hi = bracket
    f_lo, f_hi = quadratic(lo), quadratic(hi)
    if f_lo * f_hi > 0:
        raise NumericalError(f"Quadratic coefficient does not change sign on gamma_star in [{lo}, {hi}]")
    return float(brentq(quadratic, lo, hi, xtol=1e-10, rtol=1e-12))


def g2_contour_crossing(p: SystemParams, excitation, level: float, axis: str,
                        bracket: Tuple[float, float], geom: Optional[DetectionGeometry] = None) -> float:
    """
    Value of gamma_star or rabi (the `axis`) where steady-state g2(0) crosses `level`.

    Raises:
        ParameterError: For an unknown axis.
        NumericalError: If g2(0) - level does not change sign over the bracket.
    """
    if axis not in ("gamma_star", "rabi"):
        raise ParameterError(f"Contour axis must be 'gamma_star' or 'rabi', got '{axis}'")
    excitation = Excitation.parse(excitation)
    base = p.replace(laser_detuning=excitation.laser_detuning(p))

    def offset(x):
        return g2_zero(solve_steady_state(base.replace(**{axis: float(x)})), geom) - level

    lo, hi = bracket
    if offset(lo) * offset(hi) > 0:
        raise NumericalError(f"g2(0) does not cross {level} for {axis} in [{lo}, {hi}]")
    crossing = float(brentq(offset, lo, hi, xtol=1e-8, rtol=1e-10))
    logger.debug("g2(0) = %s contour (%s) at %s = %.6g", level, excitation.value, axis, crossing)
    return crossing
