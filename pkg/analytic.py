# File: analytic.py
"""
Closed-form results for the dephased emitter pair.

Thresholds, spectral Lorentzians, low-intensity expansion coefficients, exact
and approximate steady-state populations, the free-evolution eigensystem and
the closed-form second-order correlation starting from |ee>.

These formulas are never substituted for solver output; the test suite
compares them against the numeric engine in their stated regimes.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from model import DetectionGeometry, SystemParams

logger = logging.getLogger(__name__)

# Canonical basis index of each entry of the {gg, eg, ge, ee} ordering used
# to write the eigenoperators below.
EIGEN_BASIS_PERMUTATION = (0, 2, 1, 3)


class AnalyticError(ValueError):
    """A closed form was evaluated outside its preconditions."""
    pass


class Excitation(str, enum.Enum):
    """Drive schemes; values are the strings used in run configurations."""
    TWO_PHOTON = "two_photon"
    SUPERRADIANT = "superradiant"

    @classmethod
    def parse(cls, value) -> "Excitation":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError as e:
            choices = ", ".join(member.value for member in cls)
            raise AnalyticError(f"Unknown excitation '{value}', expected one of {choices}") from e

    def laser_detuning(self, p: SystemParams) -> float:
        """Two-photon drive sits at omega0, superradiant drive at omega0 + Omega12."""
        return 0.0 if self is Excitation.TWO_PHOTON else p.omega12


def _require_coupling(p: SystemParams):
    if p.omega12 == 0.0:
        raise AnalyticError("Threshold is undefined for Omega12 = 0")


# --- Thresholds ---
def threshold_gamma_star(p: SystemParams, excitation: str) -> float:
    """Dephasing rate above which the pair behaves like independent emitters."""
    _require_coupling(p)
    if Excitation.parse(excitation) is Excitation.TWO_PHOTON:
        return (4.0 * p.omega12**2 * p.gamma0) ** (1.0 / 3.0)
    return 4.0 * abs(p.omega12)


def threshold_rabi(p: SystemParams, excitation: str) -> float:
    """Rabi frequency above which the drive washes out the coupling signature."""
    _require_coupling(p)
    if Excitation.parse(excitation) is Excitation.TWO_PHOTON:
        return math.sqrt(abs(p.omega12) * p.gamma0)
    return 2.0 * abs(p.omega12)


# --- Spectral Lorentzians ---
def _lorentzian_s_terms(p: SystemParams, detuning):
    g0, gs, g12 = p.gamma0, p.gamma_star, p.gamma12
    rabi = p.rabi_mean
    numerator = 2.0 * rabi**2 * (g0 + gs - g12) * (g0 + gs + g12)
    a_s = 4.0 * rabi**2 * (g0 + 0.75 * gs - g12) * (g0 + gs + g12)
    determinant = g0**2 + g0 * gs - g12**2
    b_s = 4.0 * (np.asarray(detuning, dtype=float) - p.omega12) ** 2 * determinant
    c_s = (g0 + gs + g12) ** 2 * determinant
    return numerator, a_s, b_s, c_s


def lorentzian_S(p: SystemParams, omega_grid, weak_drive: bool = False):
    """
    Superradiant-peak Lorentzian of n_exc versus laser detuning (delta = 0 regime).

    Args:
        p: Parameters; the drive amplitude is the mean of p.rabi.
        omega_grid: Laser detunings (omega - omega0), strictly increasing.
        weak_drive: Drop the power-broadening term A_S.
    """
    from stationary import SpectrumResult

    grid = np.asarray(omega_grid, dtype=float)
    numerator, a_s, b_s, c_s = _lorentzian_s_terms(p, grid)
    denominator = b_s + c_s + (0.0 if weak_drive else a_s)
    return SpectrumResult("detuning", grid, numerator / denominator, p)


def lorentzian_S_peak(p: SystemParams, weak_drive: bool = True) -> float:
    """Value of the superradiant Lorentzian at omega - omega0 = Omega12."""
    numerator, a_s, _, c_s = _lorentzian_s_terms(p, p.omega12)
    return float(numerator / (c_s + (0.0 if weak_drive else a_s)))


def large_dephasing_S_line(p: SystemParams) -> Tuple[float, float]:
    """(amplitude, half width) of the superradiant line when gamma_star dominates."""
    if p.gamma_star <= 0.0:
        raise AnalyticError("Large-dephasing line requires gamma_star > 0")
    return 2.0 * p.rabi_mean**2 / (p.gamma0 * p.gamma_star), 0.5 * p.gamma_star


def lorentzian_E_amplitude(p: SystemParams) -> float:
    """Amplitude of the two-photon peak at omega = omega0 for negligible dephasing."""
    x = p.rabi_mean / p.gamma0
    y = p.omega12 / p.gamma0
    if x == 0.0:
        return 0.0
    return 2.0 * (x**2 + 2.0 * x**4) / (4.0 * (x**2 + x**4 + y**2))


def classify_E_regime(p: SystemParams) -> str:
    """'saturated' (X >= Y), 'quadratic' (1 <= X < Y) or 'linear' (X < 1)."""
    x = abs(p.rabi_mean) / p.gamma0
    y = abs(p.omega12) / p.gamma0
    if x >= y:
        return "saturated"
    if x >= 1.0:
        return "quadratic"
    return "linear"


def saturation_expansion_coefficients(p: SystemParams) -> Tuple[float, float]:
    """
    Coefficients of n_exc = linear * Omega_R^2 + quadratic * Omega_R^4 at omega = omega0.

    The linear coefficient is exact. The quadratic coefficient is the
    large-coupling, large-dephasing form; at gamma_star = 0 it is replaced by
    its sign limit (+inf for a coupled pair, -inf otherwise).
    """
    g0, gs, g12, o12 = p.gamma0, p.gamma_star, p.gamma12, p.omega12
    width = g0 + gs + g12
    linear = 2.0 * width * (g0 + gs - g12) / ((g0**2 + g0 * gs - g12**2) * (4.0 * o12**2 + width**2))
    if gs == 0.0:
        quadratic = math.inf if o12 != 0.0 else -math.inf
    else:
        quadratic = 4.0 * (4.0 * o12**2 * g0 - gs**3) / (g0**2 * gs * (4.0 * o12**2 + gs**2) ** 2)
    return linear, quadratic


# --- Steady-state populations ---
def exact_populations_two_photon(p: SystemParams) -> Tuple[float, float]:
    """
    Exact (rho_ee,ee, rho_ee) under resonant drive without dephasing.

    rho_ee is the single-emitter excited population rho_ee,ee + rho_eg,eg.

    Raises:
        AnalyticError: Unless gamma_star = 0, delta = 0, laser_detuning = 0 and equal drive.
    """
    if p.gamma_star != 0.0 or p.delta != 0.0 or p.laser_detuning != 0.0 or not p.equal_drive:
        raise AnalyticError("Exact two-photon populations need gamma_star = delta = laser_detuning = 0 "
                            "and equal drive")
    g0, rabi = p.gamma0, p.rabi[0]
    denominator = 4.0 * rabi**4 + g0**2 * ((g0 + p.gamma12) ** 2 + 4.0 * rabi**2 + 4.0 * p.omega12**2)
    return rabi**4 / denominator, (g0**2 * rabi**2 + 2.0 * rabi**4) / denominator


def two_photon_populations_estimate(p: SystemParams) -> Tuple[float, float]:
    """Weak-drive, strongly dephased estimate of (rho_ee,ee, rho_ee) under resonant drive."""
    if p.gamma_star <= 0.0:
        raise AnalyticError("Dephased two-photon estimate requires gamma_star > 0")
    g0, gs, rabi2 = p.gamma0, p.gamma_star, p.rabi_mean**2
    spread = 4.0 * p.omega12**2 + gs**2
    doubly = rabi2**2 * (4.0 * p.omega12**2 * g0 * gs + gs**4) / ((g0 * gs) ** 2 * spread**2)
    single = rabi2 * gs**2 / (g0 * gs * spread)
    return doubly, single


def superradiant_populations_estimate(p: SystemParams) -> Tuple[float, float]:
    """Weak-drive, strongly dephased estimate of (rho_ee,ee, rho_ee) under superradiant drive."""
    if p.gamma_star <= 0.0:
        raise AnalyticError("Dephased superradiant estimate requires gamma_star > 0")
    g0, gs, rabi2 = p.gamma0, p.gamma_star, p.rabi_mean**2
    return rabi2**2 / (g0**2 * (16.0 * p.omega12**2 + gs**2)), rabi2 / (g0 * gs)


def superradiant_g2_estimate(p: SystemParams) -> float:
    """g2(0) under superradiant drive without dephasing."""
    rabi2, o2 = p.rabi_mean**2, p.omega12**2
    return (rabi2 * (rabi2 + 4.0 * o2) + (p.gamma0 + p.gamma12) ** 2 * o2) / (rabi2 + 4.0 * o2) ** 2


# --- Free-evolution eigensystem ---
def free_decay_rates(p: SystemParams) -> Tuple[float, float]:
    """(gamma_minus, gamma_plus) = gamma0 + (gamma_star -+ gamma12*)/2."""
    spread = math.hypot(p.gamma_star, 2.0 * p.gamma12)
    return p.gamma0 + 0.5 * (p.gamma_star - spread), p.gamma0 + 0.5 * (p.gamma_star + spread)


@dataclass(frozen=True)
class AnalyticMode:
    label: str
    eigenvalue: complex
    right: np.ndarray
    left: np.ndarray


def _to_canonical(matrix: np.ndarray) -> np.ndarray:
    perm = list(EIGEN_BASIS_PERMUTATION)
    return np.asarray(matrix, dtype=complex)[np.ix_(perm, perm)]


def _require_free_evolution(p: SystemParams):
    if any(r != 0.0 for r in p.rabi) or p.delta != 0.0:
        raise AnalyticError("Free-evolution closed forms need rabi = 0 and delta = 0")
    if p.gamma12 == 0.0:
        raise AnalyticError("Free-evolution closed forms need gamma12 != 0")


def _sector_constants(p: SystemParams) -> Tuple[float, float, float]:
    """(gamma12*, gamma12* + gamma_star, gamma12* - gamma_star) without cancellation."""
    spread = math.hypot(p.gamma_star, 2.0 * p.gamma12)
    plus = spread + p.gamma_star
    minus = 4.0 * p.gamma12**2 / plus
    return spread, plus, minus


def analytic_eigensystem(p: SystemParams) -> List[AnalyticMode]:
    """
    Eigenvalues and eigenoperators of the undriven Liouvillian for the G, S, A
    and E modes, with Tr(rho_L^dag rho_R) = 1 for each.

    Raises:
        AnalyticError: For a driven or detuned pair, or gamma12 = 0.
    """
    _require_free_evolution(p)
    g0, gs, g12 = p.gamma0, p.gamma_star, p.gamma12
    spread, plus, minus = _sector_constants(p)

    def single_sector(diagonal, off_diagonal, corner, scale, excited=0.0):
        m = np.zeros((4, 4))
        m[0, 0] = corner
        m[1, 1] = m[2, 2] = diagonal
        m[1, 2] = m[2, 1] = off_diagonal
        m[3, 3] = excited
        return scale * m

    n = (g0 + g12) * (g0 - g12) - g0 * gs
    if abs(n) < 1e-12 * g0**2:
        raise AnalyticError("Doubly-excited mode is singular at gamma_star = gamma0 - gamma12^2/gamma0")

    right_g = np.zeros((4, 4))
    right_g[0, 0] = 1.0
    left_g = np.eye(4)

    right_s = single_sector(g12, 0.5 * plus, -2.0 * g12, 1.0 / spread)
    right_a = single_sector(g12, -0.5 * minus, -2.0 * g12, 1.0 / spread)
    pe_s = 2.0 * g12 * (2.0 * g0 + gs + spread) / (2.0 * g0 - gs - spread)
    pe_a = 2.0 * g12 * (2.0 * g0 + gs - spread) / (2.0 * g0 - gs + spread)
    left_s = single_sector(g12, 0.5 * plus, 0.0, 1.0 / plus, pe_s)
    left_a = single_sector(g12, -0.5 * minus, 0.0, 1.0 / minus, pe_a)
    c = -2.0 * g0 * g12
    pop = g0 * gs - g0**2 - g12**2
    right_e = single_sector(pop, c, -2.0 * pop - n, 1.0 / n, n)
    left_e = np.zeros((4, 4))
    left_e[3, 3] = 1.0

    modes = [
        AnalyticMode("G", 0.0, right_g, left_g),
        AnalyticMode("S", -(g0 + 0.5 * (gs + spread)), right_s, left_s),
        AnalyticMode("A", -(g0 - 0.5 * minus), right_a, left_a),
        AnalyticMode("E", -2.0 * g0, right_e, left_e),
    ]
    return [AnalyticMode(m.label, complex(m.eigenvalue), _to_canonical(m.right), _to_canonical(m.left))
            for m in modes]


def projection_coefficients_from_E(p: SystemParams) -> Dict[str, float]:
    """Tr(rho_L,mu^dag |E><E|) for mu in G, S, A, E."""
    return {mode.label: float(np.real(mode.left[3, 3].conj())) for mode in analytic_eigensystem(p)}


def _directional_kernel(p: SystemParams, tau: np.ndarray) -> np.ndarray:
    """Decay of the emitter-antisymmetric coherence seeded by D|ee> off the symmetric axis."""
    decay = -(p.gamma0 + 0.5 * p.gamma_star)
    root = np.sqrt(complex(0.25 * p.gamma_star**2 - 4.0 * p.omega12**2))
    envelope = np.exp(decay * tau)
    if abs(root) < 1e-12:
        return envelope * (1.0 - 0.5 * p.gamma_star * tau)
    shape = np.cosh(root * tau) - 0.5 * p.gamma_star * np.sinh(root * tau) / root
    return np.real(envelope * shape)


def closed_form_G2(p: SystemParams, geom: DetectionGeometry, t, tau):
    """
    G2(t, t+tau) = <D^dag(t) D^dag D(t+tau) D(t)> for a pair prepared in |ee>.

    Exact for any detection phase in the undriven, non-detuned case. Only the
    E mode feeds the correlation; it then relaxes through the S and A modes
    and, off the symmetric direction, through the emitter-antisymmetric
    coherence as well.

    Raises:
        AnalyticError: For a driven or detuned pair, or gamma12 = 0.
    """
    _require_free_evolution(p)
    g0, g12 = p.gamma0, p.gamma12
    spread, plus, minus = _sector_constants(p)
    t_arr, tau_arr = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(tau, dtype=float))
    cos_phi, sin_phi = math.cos(geom.phi), math.sin(geom.phi)

    lambda_s = -(g0 + 0.5 * (p.gamma_star + spread))
    lambda_a = -(g0 - 0.5 * minus)
    bracket = (np.exp(lambda_s * tau_arr) * (2.0 * g12 + plus * cos_phi) ** 2 / (4.0 * spread * plus)
               + np.exp(lambda_a * tau_arr) * (2.0 * g12 - minus * cos_phi) ** 2 / (4.0 * spread * minus)
               + 0.5 * sin_phi**2 * _directional_kernel(p, tau_arr))
    result = np.exp(-2.0 * g0 * t_arr) * bracket
    if result.ndim == 0:
        return float(result)
    return result
