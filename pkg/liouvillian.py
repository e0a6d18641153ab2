# File: liouvillian.py
"""
Master-equation engine for the emitter pair.

Builds the Hamiltonian and the 16x16 Liouvillian superoperator, solves for the
steady state, eigen-decomposes the generator and propagates density matrices
either spectrally or with a fixed-step RK4 integrator. Multi-time correlations
are evaluated with the quantum regression theorem.

Vectorization is column stacking: A rho B  ->  kron(B^T, A) vec(rho).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

import numpy as np
import scipy.linalg

import config
from model import SystemParams, number_operator, sigma

logger = logging.getLogger(__name__)

DIM = 4
_I4 = np.eye(DIM, dtype=complex)
_NULL_RCOND = 1e-10
_STEADY_RESIDUAL_TOL = 1e-10
_POSITIVITY_TOL = 1e-10
_MAX_STEP = 1e-3
_STEP_REFINEMENT_TOL = 1e-8

ArrayLike = Union[float, np.ndarray]


# --- Custom Exceptions ---
class NumericalError(Exception):
    """Base exception for numerical failures of the solvers."""
    pass


class DegenerateSteadyStateError(NumericalError):
    """The Liouvillian kernel is not one-dimensional."""

    def __init__(self, dimension: int):
        self.dimension = dimension
        super().__init__(f"Steady state is not unique: Liouvillian kernel has dimension {dimension}")


class SteadyStateError(NumericalError):
    """The steady state failed its residual or positivity check."""
    pass


class FlaggedDecompositionError(NumericalError):
    """Spectral propagation was requested on an ill-conditioned decomposition."""
    pass


class StepRefinementError(NumericalError):
    """Halving the ODE step moved the endpoint by more than the tolerance."""
    pass


# --- Vectorization helpers ---
def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(vector: np.ndarray) -> np.ndarray:
    return np.asarray(vector, dtype=complex).reshape(DIM, DIM, order="F")


def spre(a: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> A rho."""
    return np.kron(_I4, a)


def spost(b: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> rho B."""
    return np.kron(b.T, _I4)


def sprepost(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> A rho B."""
    return np.kron(b.T, a)


def lindblad_superoperator(o1: np.ndarray, o2: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> 2 O1 rho O2^dag - {O2^dag O1, rho}."""
    product = o2.conj().T @ o1
    return 2.0 * sprepost(o1, o2.conj().T) - spre(product) - spost(product)


# --- Generator construction ---
def build_hamiltonian(p: SystemParams) -> np.ndarray:
    """
    Hamiltonian in the frame rotating at the laser frequency.

    Emitter 1 sits at omega0 - delta/2 and emitter 2 at omega0 + delta/2, so
    the bare detunings are -delta/2 - laser_detuning and +delta/2 - laser_detuning.
    """
    s1, s2 = sigma(1), sigma(2)
    detunings = (-0.5 * p.delta - p.laser_detuning, 0.5 * p.delta - p.laser_detuning)
    h = np.zeros((DIM, DIM), dtype=complex)
    for s, detuning, rabi in zip((s1, s2), detunings, p.rabi):
        h += detuning * (s.conj().T @ s) + 0.5 * rabi * (s + s.conj().T)
    h += p.omega12 * (s1.conj().T @ s2 + s2.conj().T @ s1)
    return h


def build_liouvillian(p: SystemParams) -> np.ndarray:
    """
    Full 16x16 generator: coherent part, collective decay with the
    gamma_ij matrix, and pure dephasing gamma_star on each emitter.
    """
    h = build_hamiltonian(p)
    liouvillian = -1j * (spre(h) - spost(h))

    ops = {1: sigma(1), 2: sigma(2)}
    decay = {(1, 1): p.gamma0, (2, 2): p.gamma0, (1, 2): p.gamma12, (2, 1): p.gamma12}
    for (i, j), rate in decay.items():
        if rate != 0.0:
            liouvillian += 0.5 * rate * lindblad_superoperator(ops[i], ops[j])

    if p.gamma_star != 0.0:
        for i in (1, 2):
            n_i = ops[i].conj().T @ ops[i]
            liouvillian += 0.5 * p.gamma_star * lindblad_superoperator(n_i, n_i)
    return liouvillian


def steady_state(liouvillian: np.ndarray) -> np.ndarray:
    """
    Unique trace-one kernel element of the Liouvillian.

    Raises:
        DegenerateSteadyStateError: If the kernel dimension is not 1.
        SteadyStateError: If the result fails the residual or positivity check.
    """
    kernel = scipy.linalg.null_space(liouvillian, rcond=_NULL_RCOND)
    dimension = kernel.shape[1]
    if dimension != 1:
        if dimension == 0:
            raise SteadyStateError("Liouvillian has no numerical kernel; no steady state found")
        raise DegenerateSteadyStateError(dimension)

    rho = unvec(kernel[:, 0])
    trace = np.trace(rho)
    if abs(trace) < 1e-14:
        raise SteadyStateError("Kernel vector is traceless; cannot normalize to a density matrix")
    rho = rho / trace
    rho = 0.5 * (rho + rho.conj().T)

    scale = max(1.0, float(np.linalg.norm(liouvillian, 2)))
    residual = float(np.linalg.norm(liouvillian @ vec(rho)))
    if residual > _STEADY_RESIDUAL_TOL * scale:
        raise SteadyStateError(f"Steady-state residual {residual:.3g} exceeds tolerance")
    lowest = float(np.min(np.linalg.eigvalsh(rho)))
    if lowest < -_POSITIVITY_TOL:
        raise SteadyStateError(f"Steady state has negative eigenvalue {lowest:.3g}")
    return rho


# --- Spectral decomposition ---
@dataclass(frozen=True)
class SpectralDecomposition:
    """
    Eigen-decomposition of a Liouvillian.

    `right` holds right eigenvectors as columns, `left` the dual row vectors
    with left @ right = I. Modes are ordered by descending real part.
    """
    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    condition: float
    flagged: bool
    generator: np.ndarray

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def steady_index(self) -> int:
        return int(np.argmin(np.abs(self.eigenvalues)))

    def right_operator(self, k: int) -> np.ndarray:
        return unvec(self.right[:, k])

    def left_operator(self, k: int) -> np.ndarray:
        """rho_L with Tr(rho_L^dag X) = left[k] . vec(X)."""
        return unvec(self.left[k].conj())


def spectral_decompose(liouvillian: np.ndarray,
                       condition_limit: Optional[float] = None) -> SpectralDecomposition:
    """
    Diagonalizes the generator and builds the biorthonormal dual basis.

    A decomposition whose eigenvector matrix has a condition number above
    `condition_limit` is returned flagged; propagation then uses the ODE path.
    """
    limit = config.CONDITION_LIMIT if condition_limit is None else condition_limit
    eigenvalues, right = scipy.linalg.eig(liouvillian)

    right = right / np.linalg.norm(right, axis=0)
    pivots = right[np.argmax(np.abs(right), axis=0), np.arange(right.shape[1])]
    right = right * (pivots.conj() / np.abs(pivots))

    order = np.lexsort((np.round(eigenvalues.imag, 12), -np.round(eigenvalues.real, 12)))
    eigenvalues = eigenvalues[order]
    right = right[:, order]

    k0 = int(np.argmin(np.abs(eigenvalues)))
    trace = vec(_I4) @ right[:, k0]
    if abs(trace) > 1e-12:
        right[:, k0] = right[:, k0] / trace

    condition = float(np.linalg.cond(right))
    flagged = not math.isfinite(condition) or condition > limit
    try:
        left = scipy.linalg.inv(right)
    except (np.linalg.LinAlgError, ValueError):
        left = np.linalg.pinv(right)
        flagged = True

    if flagged:
        logger.warning("Liouvillian eigenbasis is ill-conditioned (cond=%.3g > %.3g); "
                       "propagation will use the ODE integrator", condition, limit)
    else:
        logger.debug("Spectral decomposition condition number %.3g", condition)

    return SpectralDecomposition(
        eigenvalues=eigenvalues,
        right=right,
        left=left,
        condition=condition,
        flagged=flagged,
        generator=np.array(liouvillian, dtype=complex),
    )


def propagate_spectral(dec: SpectralDecomposition, rho0: np.ndarray, t: ArrayLike) -> np.ndarray:
    """
    rho(t) = sum_mu exp(lambda_mu t) Tr(rho_L^dag rho0) rho_R.

    Returns a 4x4 matrix for scalar t, else an array of shape (len(t), 4, 4).

    Raises:
        FlaggedDecompositionError: If the decomposition is flagged.
    """
    if dec.flagged:
        raise FlaggedDecompositionError(
            f"Decomposition condition number {dec.condition:.3g} is above the limit; use propagate_ode")
    coefficients = dec.left @ vec(rho0)
    times = np.asarray(t, dtype=float)
    weights = coefficients[:, None] * np.exp(np.outer(dec.eigenvalues, times.reshape(-1)))
    vectors = dec.right @ weights
    states = vectors.T.reshape(-1, DIM, DIM).transpose(0, 2, 1)
    if times.ndim == 0:
        return states[0]
    return states.reshape(times.shape + (DIM, DIM))


# --- ODE propagation ---
def default_step(liouvillian: np.ndarray) -> float:
    rate = float(np.linalg.norm(liouvillian, np.inf))
    if rate == 0.0:
        return _MAX_STEP
    return min(_MAX_STEP, 0.01 / rate)


def _rk4_step_matrix(liouvillian: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step for d/dt v = L v, applied to every basis vector at once."""
    identity = np.eye(liouvillian.shape[0], dtype=complex)
    k1 = h * liouvillian
    k2 = h * liouvillian @ (identity + 0.5 * k1)
    k3 = h * liouvillian @ (identity + 0.5 * k2)
    k4 = h * liouvillian @ (identity + k3)
    return identity + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def _integrate(liouvillian: np.ndarray, v0: np.ndarray, times: np.ndarray, h: float) -> np.ndarray:
    out = np.empty((times.size, v0.size), dtype=complex)
    current = np.array(v0, dtype=complex)
    out[0] = current
    cache: Dict[Tuple[int, float], np.ndarray] = {}
    for k in range(1, times.size):
        interval = times[k] - times[k - 1]
        if interval > 0.0:
            substeps = max(1, int(math.ceil(interval / h - 1e-9)))
            key = (substeps, interval)
            if key not in cache:
                step = _rk4_step_matrix(liouvillian, interval / substeps)
                cache[key] = np.linalg.matrix_power(step, substeps)
            current = cache[key] @ current
        out[k] = current
    return out


def propagate_ode(liouvillian: np.ndarray, rho0: np.ndarray, t_grid,
                  step: Optional[float] = None, check_step: bool = False) -> np.ndarray:
    """
    Fixed-step RK4 propagation of rho0 given at t_grid[0].

    Args:
        liouvillian: 16x16 generator.
        rho0: Initial 4x4 density matrix (or any operator, for regression).
        t_grid: Non-decreasing times; rho0 is the state at t_grid[0].
        step: Maximum step length; defaults to min(1e-3, 0.01/||L||_inf).
        check_step: Repeat with half the step and compare endpoints.

    Returns:
        Array of shape (len(t_grid), 4, 4).

    Raises:
        ValueError: If t_grid decreases.
        StepRefinementError: If the half-step run moves the endpoint by 1e-8 or more.
    """
    times = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if times.size > 1 and np.any(np.diff(times) < 0):
        raise ValueError("ODE time grid must be non-decreasing")
    h = default_step(liouvillian) if step is None else float(step)

    vectors = _integrate(liouvillian, vec(rho0), times, h)
    if check_step:
        refined = _integrate(liouvillian, vec(rho0), times, 0.5 * h)
        change = float(np.max(np.abs(refined[-1] - vectors[-1])))
        if change >= _STEP_REFINEMENT_TOL:
            raise StepRefinementError(
                f"Halving the step to {0.5 * h:.3g} moved the endpoint by {change:.3g}")
        logger.debug("Step refinement check passed (change %.3g)", change)
    return vectors.reshape(-1, DIM, DIM).transpose(0, 2, 1)


def _states_at(liouvillian: np.ndarray, rho0: np.ndarray, times: np.ndarray) -> Dict[float, np.ndarray]:
    """ODE states at arbitrary non-negative times, keyed by time."""
    unique = np.unique(np.concatenate(([0.0], times)))
    states = propagate_ode(liouvillian, rho0, unique)
    return {float(t): state for t, state in zip(unique, states)}


def propagate(dec: SpectralDecomposition, rho0: np.ndarray, t: ArrayLike) -> np.ndarray:
    """rho(t) from the spectral form, or from the ODE integrator when `dec` is flagged."""
    if not dec.flagged:
        return propagate_spectral(dec, rho0, t)
    times = np.asarray(t, dtype=float)
    if np.any(times < 0):
        raise ValueError("Propagation times must be non-negative")
    states = _states_at(dec.generator, rho0, times.reshape(-1))
    stacked = np.array([states[float(s)] for s in times.reshape(-1)])
    if times.ndim == 0:
        return stacked[0]
    return stacked.reshape(times.shape + (DIM, DIM))


# --- Regression correlations ---
def regression_weights(dec: SpectralDecomposition, rho0: np.ndarray, a: np.ndarray,
                       b: np.ndarray, c: Optional[np.ndarray] = None):
    """
    Ingredients of sum_{mu,mu'} e^{lambda_mu t} e^{lambda_mu' tau} c_mu P[mu', mu] b_mu'.

    Returns:
        (coefficients, sandwich, readout) with
        coefficients[mu] = Tr(rho_L,mu^dag rho0),
        sandwich[mu', mu] = Tr(rho_L,mu'^dag C rho_R,mu A),
        readout[mu'] = Tr(B rho_R,mu').
    """
    c = _I4 if c is None else c
    coefficients = dec.left @ vec(rho0)
    sandwich = dec.left @ sprepost(c, a) @ dec.right
    readout = vec(b.T) @ dec.right
    return coefficients, sandwich, readout


def _spectral_correlation(dec, rho0, a, b, c, t, tau) -> np.ndarray:
    coefficients, sandwich, readout = regression_weights(dec, rho0, a, b, c)
    t_flat, tau_flat = t.reshape(-1), tau.reshape(-1)
    early = np.exp(np.outer(t_flat, dec.eigenvalues)) * coefficients
    mixed = early @ sandwich.T
    late = np.exp(np.outer(tau_flat, dec.eigenvalues)) * readout
    return np.sum(mixed * late, axis=1).reshape(t.shape)


def _ode_correlation(liouvillian, rho0, a, b, c, t, tau) -> np.ndarray:
    c = _I4 if c is None else c
    result = np.empty(t.shape, dtype=complex)
    states = _states_at(liouvillian, rho0, t.reshape(-1))
    t_flat, tau_flat, out = t.reshape(-1), tau.reshape(-1), result.reshape(-1)
    for t_value in np.unique(t_flat):
        mask = t_flat == t_value
        sandwiched = c @ states[float(t_value)] @ a
        evolved = _states_at(liouvillian, sandwiched, tau_flat[mask])
        out[mask] = [np.trace(b @ evolved[float(s)]) for s in tau_flat[mask]]
    return result


def _correlation(dec, rho0, a, b, c, t, tau):
    t_arr, tau_arr = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(tau, dtype=float))
    if np.any(t_arr < 0) or np.any(tau_arr < 0):
        raise ValueError("Correlation times t and tau must be non-negative")
    if dec.flagged:
        logger.debug("Evaluating correlation on the ODE path (flagged decomposition)")
        values = _ode_correlation(dec.generator, rho0, a, b, c, np.array(t_arr), np.array(tau_arr))
    else:
        values = _spectral_correlation(dec, rho0, a, b, c, np.array(t_arr), np.array(tau_arr))
    if values.ndim == 0:
        return complex(values)
    return values


def two_time_correlation(dec: SpectralDecomposition, rho0: np.ndarray, a: np.ndarray,
                         b: np.ndarray, t: ArrayLike, tau: ArrayLike):
    """<A(t) B(t+tau)> = Tr(B e^{L tau}[rho(t) A]). t and tau broadcast."""
    return _correlation(dec, rho0, a, b, None, t, tau)


def three_op_correlation(dec: SpectralDecomposition, rho0: np.ndarray, a: np.ndarray,
                         b: np.ndarray, c: np.ndarray, t: ArrayLike, tau: ArrayLike):
    """<A(t) B(t+tau) C(t)> = Tr(B e^{L tau}[C rho(t) A]). t and tau broadcast."""
    return _correlation(dec, rho0, a, b, c, t, tau)
