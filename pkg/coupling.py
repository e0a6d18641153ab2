# File: coupling.py
"""
Dipole-dipole coupling between the two emitters.

Evaluates the free-space dyadic Green's function projected on the dipole
orientations and splits it into the coherent exchange rate Omega12 = Re G and
the cross-decay rate gamma12 = -2 Im G. Also solves the inverse problem:
which separation gives a requested Omega12.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace as dataclass_replace
from typing import List, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

logger = logging.getLogger(__name__)

_UNIT_TOL = 1e-12
_SEARCH_BRACKET = (1e-4, 1.0)
_SEARCH_POINTS = 2000


# --- Custom Exceptions ---
class CouplingError(Exception):
    """Base exception for coupling computations."""
    pass


class GeometryError(CouplingError, ValueError):
    """Raised for a zero separation or non-unit orientation vectors."""
    pass


class NotAchievableError(CouplingError):
    """Raised when no separation in the search bracket reaches the target."""
    pass


def _unit(vector, name: str) -> Tuple[float, float, float]:
    arr = np.asarray(vector, dtype=float).reshape(-1)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise GeometryError(f"{name} must be a finite 3-vector, got {vector!r}")
    if abs(np.linalg.norm(arr) - 1.0) > _UNIT_TOL:
        raise GeometryError(f"{name} must be a unit vector (norm {np.linalg.norm(arr):.15g})")
    return tuple(float(x) for x in arr)


@dataclass(frozen=True)
class Geometry:
    """Placement of the emitter pair: separation in wavelengths, orientations and axis."""
    separation_over_lambda: float
    dipole1: Tuple[float, float, float] = field(default=(0.0, 0.0, 1.0))
    dipole2: Tuple[float, float, float] = field(default=(0.0, 0.0, 1.0))
    axis: Tuple[float, float, float] = field(default=(1.0, 0.0, 0.0))

    def __post_init__(self):
        try:
            separation = float(self.separation_over_lambda)
        except (TypeError, ValueError) as e:
            raise GeometryError(f"separation_over_lambda must be a number, got {self.separation_over_lambda!r}") from e
        if not math.isfinite(separation) or separation <= 0:
            raise GeometryError(f"separation_over_lambda must be positive, got {separation}")
        object.__setattr__(self, "separation_over_lambda", separation)
        object.__setattr__(self, "dipole1", _unit(self.dipole1, "dipole1"))
        object.__setattr__(self, "dipole2", _unit(self.dipole2, "dipole2"))
        object.__setattr__(self, "axis", _unit(self.axis, "axis"))

    @classmethod
    def h_configuration(cls, separation_over_lambda: float) -> "Geometry":
        """Parallel dipoles along z, separated along x."""
        return cls(separation_over_lambda)

    @property
    def kr(self) -> float:
        return 2.0 * math.pi * self.separation_over_lambda

    def with_separation(self, separation_over_lambda: float) -> "Geometry":
        return dataclass_replace(self, separation_over_lambda=separation_over_lambda)


def dyadic_green(kr: float, axis: Sequence[float], alpha: float, gamma0: float = 1.0) -> np.ndarray:
    """
    Free-space dyadic Green's function between two points a distance kr apart.

    Args:
        kr: Dimensionless separation k*r, must be positive.
        axis: Unit vector along the separation.
        alpha: Radiative fraction of gamma0 (zero-phonon line).
        gamma0: Total single-emitter decay rate.

    Raises:
        GeometryError: If kr is not positive.
    """
    if not kr > 0:
        raise GeometryError(f"kr must be positive, got {kr}")
    r_hat = np.asarray(axis, dtype=float)
    prefactor = -0.75 * alpha * gamma0 * np.exp(1j * kr) / kr
    transverse = 1.0 + 1j / kr - 1.0 / kr**2
    longitudinal = -1.0 - 3j / kr + 3.0 / kr**2
    return prefactor * (transverse * np.eye(3) + longitudinal * np.outer(r_hat, r_hat))


def green_scalar(geom: Geometry, alpha: float, gamma0: float = 1.0) -> complex:
    """Projection d1^T G d2 of the dyadic Green's function."""
    dyad = dyadic_green(geom.kr, geom.axis, alpha, gamma0)
    return complex(np.asarray(geom.dipole1) @ dyad @ np.asarray(geom.dipole2))


def coupling_rates(green: complex) -> Tuple[float, float]:
    """Returns (Omega12, gamma12) = (Re G, -2 Im G)."""
    return float(np.real(green)), float(-2.0 * np.imag(green))


def distance_for_coupling(target: float, template: Geometry, alpha: float,
                          gamma0: float = 1.0) -> float:
    """
    Finds the separation r/lambda at which Re G equals the target coupling.

    Scans log-spaced separations from the near-field side and refines the
    first sign change of Re G - target with brentq.

    Raises:
        NotAchievableError: If Re G - target has no sign change in the bracket.
    """
    def residual(separation: float) -> float:
        return np.real(green_scalar(template.with_separation(separation), alpha, gamma0)) - target

    grid = np.geomspace(_SEARCH_BRACKET[0], _SEARCH_BRACKET[1], _SEARCH_POINTS)
    values = np.array([residual(s) for s in grid])
    crossings = np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) <= 0)[0]
    if crossings.size == 0:
        msg = (f"Coupling {target} is not reachable for r/lambda in "
               f"({_SEARCH_BRACKET[0]}, {_SEARCH_BRACKET[1]})")
        logger.error(msg)
        raise NotAchievableError(msg)

    lo, hi = grid[crossings[0]], grid[crossings[0] + 1]
    if values[crossings[0]] == 0.0:
        return float(lo)
    separation = brentq(residual, lo, hi, xtol=1e-15, rtol=1e-13, maxiter=200)
    logger.debug("Coupling %s reached at r/lambda = %.10g", target, separation)
    return float(separation)


def coupling_sweep(template: Geometry, separations: Sequence[float], alpha: float,
                   gamma0: float = 1.0) -> List[Tuple[float, float, float, float, float, float]]:
    """Rows of (r/lambda, kr, Re G, Im G, Omega12, gamma12) over the given separations."""
    rows = []
    for separation in separations:
        geom = template.with_separation(separation)
        green = green_scalar(geom, alpha, gamma0)
        omega12, gamma12 = coupling_rates(green)
        rows.append((geom.separation_over_lambda, geom.kr, green.real, green.imag, omega12, gamma12))
    return rows
