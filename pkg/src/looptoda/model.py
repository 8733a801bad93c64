"""
First-type abelian Toda system on the loop group of GL_n: order ``n``,
mass ``m``, the constant matrices ``c_-`` and ``c_+``, the affine Cartan
matrix of type A_{n-1}^(1) and its closed-form eigenvectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, InvalidParameters
from .numkit import unity_power

__all__ = ["ModelParams", "c_minus", "c_plus", "cartan", "theta_vector",
           "kappa", "kappa_squared", "twist_matrix"]


@dataclass(frozen=True)
class ModelParams:
    """Lattice order ``n >= 2`` and nonzero complex mass ``m``."""

    n: int
    m: complex = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InvalidParameters(f"n must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", complex(self.m))
        if self.m == 0 or not np.isfinite(self.m):
            raise InvalidParameters("mass m must be finite and nonzero")

    def eps(self, x: float = 1) -> complex:
        """``epsilon_n ** x`` with the principal branch for fractional ``x``."""
        return unity_power(self.n, x)

    def wrap(self, alpha: int) -> int:
        """Reduce a field index to the representative in ``1..n``."""
        return (int(alpha) - 1) % self.n + 1


def c_minus(params: ModelParams) -> np.ndarray:
    """``m`` times the cyclic lower shift: ones at (k+1, k) and (1, n)."""
    n = params.n
    c = np.zeros((n, n), dtype=complex)
    c[np.arange(1, n), np.arange(n - 1)] = 1
    c[0, n - 1] = 1
    return params.m * c


def c_plus(params: ModelParams) -> np.ndarray:
    """``m`` times the cyclic upper shift: ones at (k, k+1) and (n, 1)."""
    n = params.n
    c = np.zeros((n, n), dtype=complex)
    c[np.arange(n - 1), np.arange(1, n)] = 1
    c[n - 1, 0] = 1
    return params.m * c


def cartan(params: ModelParams) -> np.ndarray:
    """
    Affine Cartan matrix of type A_{n-1}^(1) as an integer array.

    For ``n = 2`` the two cyclic off-diagonal bands land on the same entry
    and add up to -2.
    """
    n = params.n
    a = 2 * np.eye(n, dtype=int)
    for i in range(n):
        a[i, (i + 1) % n] -= 1
        a[i, (i - 1) % n] -= 1
    return a


def _check_rho(params: ModelParams, rho: int, lo: int) -> int:
    if int(rho) != rho or not lo <= rho <= params.n - 1:
        raise IndexOutOfRange(f"rho must be an integer in {lo}..{params.n - 1}, got {rho!r}")
    return int(rho)


def theta_vector(params: ModelParams, rho: int) -> np.ndarray:
    """Eigenvector ``(theta_rho)_alpha = eps^((alpha+1) rho)``, ``alpha = 0..n-1``."""
    rho = _check_rho(params, rho, 0)
    return np.array([params.eps((a + 1) * rho) for a in range(params.n)])


def kappa(params: ModelParams, rho: int) -> float:
    """``2 sin(pi rho / n)``; ``rho = 0`` is not a soliton branch."""
    rho = _check_rho(params, rho, 1)
    return 2.0 * math.sin(math.pi * rho / params.n)


def kappa_squared(params: ModelParams, rho: int) -> float:
    """Cartan eigenvalue ``4 sin^2(pi rho / n)`` for any integer ``rho``."""
    return 4.0 * math.sin(math.pi * rho / params.n) ** 2


def twist_matrix(params: ModelParams, power: int = 1) -> np.ndarray:
    """Diagonal twist ``h**power`` with ``h_kk = eps^(n-k+1)``, ``k = 1..n``."""
    n = params.n
    return np.diag([params.eps(power * (n - k + 1)) for k in range(1, n + 1)])
