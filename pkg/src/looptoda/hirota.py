"""
Hirota tau-functions for r-soliton solutions.

The truncated series for ``tau_alpha`` is evaluated by direct enumeration of
soliton subsets; every subset term is a product of exponentials ``E_{alpha i}``
weighted by the pairwise interaction coefficients ``eta``.

Soliton indices are zero-based throughout the Python API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import (AtSolutionPole, IndexOutOfRange, InvalidParameters,
                     ResonantPair, TooManySolitons)
from .model import ModelParams, kappa
from .numkit import unity_power

__all__ = ["Point", "SolitonParams", "exp_E", "eta_pair", "eta_matrix", "tau",
           "gamma_hirota", "delta_field", "gamma_field", "drop_soliton",
           "one_soliton_gamma", "DEFAULT_SOLITON_CAP", "RESONANCE_TOL",
           "POLE_RTOL"]

DEFAULT_SOLITON_CAP = 12
RESONANCE_TOL = 1e-12
POLE_RTOL = 1e-13

# alpha -> (zm, zp) -> complex array, NaN where the field has a pole
FieldEvaluator = Callable[[int, np.ndarray, np.ndarray], np.ndarray]


class Point(NamedTuple):
    zm: float
    zp: float


def _eta_raw(n, rho1, zeta1, rho2, zeta2):
    s = zeta1 / zeta2 + zeta2 / zeta1
    num = s - 2.0 * math.cos(math.pi * (rho1 - rho2) / n)
    den = s - 2.0 * math.cos(math.pi * (rho1 + rho2) / n)
    return num, den


@dataclass(frozen=True)
class SolitonParams:
    """
    Hirota soliton data: for every soliton an integer branch ``rho`` in
    ``1..n-1``, a nonzero complex rapidity ``zeta`` and a complex phase
    ``delta``.

    ``eta_factor`` and ``kappa_factor`` rescale the interaction coefficients
    and the dispersion factors; they exist only to build negative controls
    and default to 1.
    """

    model: ModelParams
    rho: tuple = ()
    zeta: tuple = ()
    delta: tuple = ()
    cap: int = DEFAULT_SOLITON_CAP
    eta_factor: float = 1.0
    kappa_factor: float = 1.0
    _kappa: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rho = tuple(int(p) if int(p) == p else p for p in self.rho)
        zeta = tuple(complex(z) for z in self.zeta)
        delta = tuple(complex(d) for d in self.delta)
        if not len(rho) == len(zeta) == len(delta):
            raise InvalidParameters("rho, zeta and delta must have equal length")
        if len(rho) > self.cap:
            raise TooManySolitons(f"{len(rho)} solitons exceed the cap of {self.cap}")
        n = self.model.n
        for i, p in enumerate(rho):
            if not isinstance(p, int) or not 1 <= p <= n - 1:
                raise IndexOutOfRange(f"soliton {i}: rho must be an integer in 1..{n - 1}, got {p!r}")
        for i, z in enumerate(zeta):
            if z == 0 or not np.isfinite(z):
                raise InvalidParameters(f"soliton {i}: zeta must be finite and nonzero")
        for i, d in enumerate(delta):
            if not np.isfinite(d):
                raise InvalidParameters(f"soliton {i}: delta must be finite")
        for i in range(len(rho)):
            for j in range(i + 1, len(rho)):
                _, den = _eta_raw(n, rho[i], zeta[i], rho[j], zeta[j])
                if abs(den) < RESONANCE_TOL:
                    raise ResonantPair(f"solitons {i} and {j} are resonant "
                                       f"(interaction denominator {abs(den):.3g})")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "zeta", zeta)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "_kappa", tuple(kappa(self.model, p) for p in rho))

    @property
    def r(self) -> int:
        return len(self.rho)

    def kappa(self, i: int) -> float:
        return self._kappa[i] * self.kappa_factor

    @classmethod
    def from_lists(cls, model, solitons: Sequence[tuple], **kw) -> "SolitonParams":
        """Build from ``(rho, zeta, delta)`` triples."""
        rho, zeta, delta = zip(*solitons) if solitons else ((), (), ())
        return cls(model, tuple(rho), tuple(zeta), tuple(delta), **kw)


def _check_index(params: SolitonParams, i: int) -> int:
    if not 0 <= i < params.r:
        raise IndexOutOfRange(f"soliton index {i} outside 0..{params.r - 1}")
    return i


def _exponent(params: SolitonParams, i: int, zm, zp):
    mk = params.model.m * params.kappa(i)
    z = params.zeta[i]
    return mk * (np.asarray(zm) / z + z * np.asarray(zp)) + params.delta[i]


def exp_E(params: SolitonParams, alpha: int, i: int, zm, zp):
    """``E_{alpha i} = eps^((alpha+1) rho_i) exp[m kappa (zm/zeta + zeta zp) + delta]``."""
    _check_index(params, i)
    phase = unity_power(params.model.n, (alpha + 1) * params.rho[i])
    return phase * np.exp(_exponent(params, i, zm, zp))


def eta_pair(params: SolitonParams, i: int, j: int) -> complex:
    """Pairwise interaction coefficient, symmetric in ``(i, j)``."""
    _check_index(params, i)
    _check_index(params, j)
    if i > j:
        i, j = j, i
    num, den = _eta_raw(params.model.n, params.rho[i], params.zeta[i],
                        params.rho[j], params.zeta[j])
    if abs(den) < RESONANCE_TOL:
        raise ResonantPair(f"solitons {i} and {j} are resonant")
    return complex(num / den)


def eta_matrix(params: SolitonParams) -> np.ndarray:
    r = params.r
    eta = np.zeros((r, r), dtype=complex)
    for i in range(r):
        for j in range(i + 1, r):
            eta[i, j] = eta[j, i] = eta_pair(params, i, j) * params.eta_factor
    return eta


def _subset_coefficients(eta: np.ndarray) -> np.ndarray:
    r = eta.shape[0]
    coef = np.ones(1 << r, dtype=complex)
    for mask in range(1, 1 << r):
        low = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        c = coef[rest]
        k, bits = 0, rest
        while bits:
            if bits & 1:
                c *= eta[low, k]
            bits >>= 1
            k += 1
        coef[mask] = c
    return coef


def tau(params: SolitonParams, alpha: int, zm, zp):
    """
    Truncated Hirota tau-function ``tau_alpha`` at ``(zm, zp)``.

    Subsets are visited in Gray-code order so that the summed exponent of
    each subset term is updated by a single addition.
    """
    n = params.model.n
    alpha = int(alpha) % n
    zm, zp = np.broadcast_arrays(np.asarray(zm, float), np.asarray(zp, float))
    r = params.r
    out = np.ones(zm.shape, dtype=complex)
    if r == 0:
        return out if out.ndim else complex(out)
    coef = _subset_coefficients(eta_matrix(params))
    lin = [_exponent(params, i, zm, zp) for i in range(r)]
    running = np.zeros(zm.shape, dtype=complex)
    mask, rho_sum = 0, 0
    for t in range(1, 1 << r):
        i = (t & -t).bit_length() - 1
        mask ^= 1 << i
        if mask >> i & 1:
            running = running + lin[i]
            rho_sum += params.rho[i]
        else:
            running = running - lin[i]
            rho_sum -= params.rho[i]
        c = coef[mask]
        if c != 0:
            out = out + c * unity_power(n, (alpha + 1) * rho_sum) * np.exp(running)
    return out if out.ndim else complex(out)


def _pole_mask(num, den):
    return np.abs(den) <= POLE_RTOL * (1.0 + np.abs(num))


def gamma_hirota(params: SolitonParams, alpha: int, zm, zp, strict: bool = True):
    """
    ``Gamma_alpha = tau_alpha / tau_{alpha-1}``.

    With ``strict`` a vanishing denominator raises :class:`AtSolutionPole`;
    otherwise the affected entries are NaN.
    """
    num = np.asarray(tau(params, alpha, zm, zp))
    den = np.asarray(tau(params, alpha - 1, zm, zp))
    pole = _pole_mask(num, den)
    if strict and np.any(pole):
        raise AtSolutionPole(f"tau_{alpha - 1} vanishes")
    out = np.where(pole, np.nan + 0j, num / np.where(pole, 1.0, den))
    return out if out.ndim else complex(out)


def delta_field(params: SolitonParams, alpha: int, zm, zp):
    """``Delta_alpha = exp(-m^2 zp zm) tau_alpha``."""
    m2 = params.model.m ** 2
    out = np.exp(-m2 * np.asarray(zp) * np.asarray(zm)) * tau(params, alpha, zm, zp)
    return out if np.ndim(out) else complex(out)


def gamma_field(params: SolitonParams) -> FieldEvaluator:
    """Grid evaluator of ``Gamma_alpha`` with NaN at poles."""
    return lambda alpha, zm, zp: gamma_hirota(params, alpha, zm, zp, strict=False)


def drop_soliton(params: SolitonParams, i: int) -> SolitonParams:
    """The ``delta_i -> -inf`` limit: the same data with soliton ``i`` removed."""
    _check_index(params, i)
    keep = [k for k in range(params.r) if k != i]
    return replace(params,
                   rho=tuple(params.rho[k] for k in keep),
                   zeta=tuple(params.zeta[k] for k in keep),
                   delta=tuple(params.delta[k] for k in keep))


def one_soliton_gamma(model: ModelParams, rho: int, zeta: complex, delta: complex,
                      alpha: int, zm, zp):
    """Closed-form one-soliton ``Gamma_alpha`` (ratio of ``1 + E`` at alpha and alpha-1)."""
    k = 2.0 * math.sin(math.pi * rho / model.n)
    e = np.exp(model.m * k * (np.asarray(zm) / zeta + zeta * np.asarray(zp)) + delta)
    num = 1 + unity_power(model.n, rho * (alpha + 1)) * e
    den = 1 + unity_power(model.n, rho * alpha) * e
    return num / den
