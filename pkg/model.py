# File: model.py
"""
Basis, operators and parameter records for two coupled two-level emitters.

The 4-dimensional Hilbert space uses the product basis
{|gg>, |ge>, |eg>, |ee>} where the first slot belongs to emitter 1.
Every operator and density matrix in the package is expressed in this order.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, replace as dataclass_replace
from typing import Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

BASIS_LABELS = ("gg", "ge", "eg", "ee")
GG, GE, EG, EE = 0, 1, 2, 3

_SIGMA = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


# --- Custom Exceptions ---
class ModelError(Exception):
    """Base exception for model construction errors."""
    pass


class ParameterError(ModelError, ValueError):
    """Raised for invalid physical parameters, geometries or emitter indices."""
    pass


# --- Parameter records ---
@dataclass(frozen=True)
class SystemParams:
    """
    Physical parameters of the driven, dephased emitter pair.

    All rates are in units of gamma0. `rabi` holds the drive amplitude of each
    emitter; a scalar is accepted and expanded to equal drive on both.
    """
    gamma0: float = 1.0
    alpha: float = 0.3
    omega12: float = 20.0
    gamma12: float = 0.3
    gamma_star: float = 0.0
    delta: float = 0.0
    laser_detuning: float = 0.0
    rabi: Tuple[float, float] = field(default=(0.0, 0.0))

    def __post_init__(self):
        rabi = self.rabi
        if isinstance(rabi, (int, float, np.floating, np.integer)):
            rabi = (float(rabi), float(rabi))
        try:
            rabi = tuple(float(r) for r in rabi)
        except (TypeError, ValueError) as e:
            raise ParameterError(f"rabi must be a number or a pair of numbers, got {self.rabi!r}") from e
        if len(rabi) != 2:
            raise ParameterError(f"rabi must hold exactly two amplitudes, got {len(rabi)}")
        object.__setattr__(self, "rabi", rabi)

        for name in ("gamma0", "alpha", "omega12", "gamma12", "gamma_star", "delta", "laser_detuning"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError) as e:
                raise ParameterError(f"{name} must be a real number, got {value!r}") from e
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if not all(math.isfinite(r) for r in rabi):
            raise ParameterError(f"rabi amplitudes must be finite, got {rabi}")

        if self.gamma0 <= 0:
            raise ParameterError(f"gamma0 must be positive, got {self.gamma0}")
        if not 0.0 < self.alpha <= 1.0:
            raise ParameterError(f"alpha must lie in (0, 1], got {self.alpha}")
        # rounding slack for gamma12 taken from the Green's function
        if abs(self.gamma12) > self.alpha * self.gamma0 * (1.0 + 1e-12):
            raise ParameterError(
                f"|gamma12| must not exceed alpha*gamma0 (got gamma12={self.gamma12}, "
                f"alpha*gamma0={self.alpha * self.gamma0})"
            )
        if self.gamma_star < 0:
            raise ParameterError(f"gamma_star must be non-negative, got {self.gamma_star}")

    def replace(self, **changes) -> "SystemParams":
        """Returns a copy with the given fields changed (validated again)."""
        return dataclass_replace(self, **changes)

    @property
    def rabi_mean(self) -> float:
        return 0.5 * (self.rabi[0] + self.rabi[1])

    @property
    def equal_drive(self) -> bool:
        return self.rabi[0] == self.rabi[1]


@dataclass(frozen=True)
class DetectionGeometry:
    """Phase phi accumulated between the two emitters along the detection direction."""
    phi: float = 0.0

    def __post_init__(self):
        try:
            phi = float(self.phi)
        except (TypeError, ValueError) as e:
            raise ParameterError(f"phi must be a real number, got {self.phi!r}") from e
        if not math.isfinite(phi):
            raise ParameterError(f"phi must be finite, got {phi}")
        object.__setattr__(self, "phi", phi)

    @classmethod
    def perpendicular(cls) -> "DetectionGeometry":
        """Detector perpendicular to the emitter axis."""
        return cls(0.0)

    @classmethod
    def parallel(cls, separation_over_lambda: float) -> "DetectionGeometry":
        """Detector on the emitter axis: phi = kr = 2 pi r / lambda."""
        return cls(2.0 * math.pi * float(separation_over_lambda))


class NamedState(enum.Enum):
    """The four eigenstates of the undriven, identical-emitter pair."""
    G = "G"
    S = "S"
    A = "A"
    E = "E"

    @classmethod
    def parse(cls, tag: Union[str, "NamedState"]) -> "NamedState":
        if isinstance(tag, cls):
            return tag
        try:
            return cls(str(tag).strip().upper())
        except ValueError as e:
            raise ParameterError(f"Unknown state tag '{tag}', expected one of G, S, A, E") from e


# --- Operators ---
def sigma(i: int) -> np.ndarray:
    """
    Lowering operator of emitter i (1 or 2) on the 4-dimensional space.

    Raises:
        ParameterError: If i is not 1 or 2.
    """
    if i == 1:
        return np.kron(_SIGMA, _I2)
    if i == 2:
        return np.kron(_I2, _SIGMA)
    raise ParameterError(f"Emitter index must be 1 or 2, got {i!r}")


def number_operator() -> np.ndarray:
    """Total excitation number sigma1^dag sigma1 + sigma2^dag sigma2."""
    s1, s2 = sigma(1), sigma(2)
    return s1.conj().T @ s1 + s2.conj().T @ s2


def detection_operator(geom: DetectionGeometry) -> np.ndarray:
    """Collective lowering operator D = (e^{i phi/2} sigma1 + e^{-i phi/2} sigma2)/sqrt(2)."""
    half = 0.5 * geom.phi
    return (np.exp(1j * half) * sigma(1) + np.exp(-1j * half) * sigma(2)) / math.sqrt(2.0)


def emitter_swap() -> np.ndarray:
    """Permutation exchanging the two emitters (|ge> <-> |eg>)."""
    swap = np.zeros((4, 4), dtype=complex)
    swap[GG, GG] = swap[EE, EE] = 1.0
    swap[GE, EG] = swap[EG, GE] = 1.0
    return swap


def state_vector(tag: Union[str, NamedState]) -> np.ndarray:
    """Ket of a named state in the canonical basis."""
    tag = NamedState.parse(tag)
    ket = np.zeros(4, dtype=complex)
    if tag is NamedState.G:
        ket[GG] = 1.0
    elif tag is NamedState.E:
        ket[EE] = 1.0
    elif tag is NamedState.S:
        ket[GE] = ket[EG] = 1.0 / math.sqrt(2.0)
    else:
        ket[EG] = 1.0 / math.sqrt(2.0)
        ket[GE] = -1.0 / math.sqrt(2.0)
    return ket


def named_state(tag: Union[str, NamedState]) -> np.ndarray:
    """Projector |X><X| for X in {G, S, A, E}."""
    ket = state_vector(tag)
    return np.outer(ket, ket.conj())


def expectation(op: np.ndarray, rho: np.ndarray) -> complex:
    """Tr(op rho)."""
    return complex(np.trace(op @ rho))


def validate_density_matrix(rho: np.ndarray, hermitian_tol: float = 1e-12,
                            trace_tol: float = 1e-10, positivity_tol: float = 1e-10) -> np.ndarray:
    """
    Checks that rho is a valid 4x4 density matrix.

    Returns:
        rho as a complex ndarray.

    Raises:
        ParameterError: If the shape, Hermiticity, trace or positivity is off.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ParameterError(f"Density matrix must be 4x4, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > hermitian_tol:
        raise ParameterError("Density matrix is not Hermitian")
    trace = np.trace(rho)
    if abs(trace - 1.0) > trace_tol:
        raise ParameterError(f"Density matrix trace is {trace.real:.6g}, expected 1")
    lowest = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    if lowest < -positivity_tol:
        raise ParameterError(f"Density matrix has negative eigenvalue {lowest:.3g}")
    return rho
