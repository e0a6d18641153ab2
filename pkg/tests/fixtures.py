"""
Shared fixtures for the test suite: the standard emitter pair and random
density matrices.
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from model import SystemParams  # noqa: E402


def standard_params(**changes) -> SystemParams:
    """'H' pair at r = 0.0357 lambda: Omega12 = 20, gamma12 = 0.3, alpha = 0.3."""
    return SystemParams().replace(**changes) if changes else SystemParams()


def random_density_matrix(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    """Full-rank random state from a Ginibre matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_operator(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    return rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
