"""
Rational dressing of the trivial solution.

The dressing mapping has simple poles at ``eps^s mu_i`` and its inverse at
``eps^s nu_i``.  Its rank-one residues are built from the vectors ``u_i`` and
``y_i``, which solve the linear flows generated by ``c_-`` and ``c_+``.  The
Toda field comes out either as a ratio of determinants of the quasi-periodic
r x r matrices ``R~_alpha`` or as the diagonal of ``psi`` at infinity.

Pole indices ``i`` are zero-based; field indices ``alpha`` and vector
components ``k`` follow the 1..n convention and are reduced modulo ``n``.
Every function accepts scalar or array coordinates ``zm``, ``zp``; array
results carry the coordinate shape in front of the matrix axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import numkit
from .errors import (AtPole, AtSolutionPole, DegenerateSelection,
                     IndexOutOfRange, InvalidParameters, NumericalFailure,
                     SingularMatrix, SingularRk, ZeroPole)
from .hirota import SolitonParams
from .model import ModelParams, c_minus, c_plus
from .numkit import unity_power

__all__ = [
    "DressingData", "SolitonSelection", "Specialization", "z_exponent",
    "uy_vectors", "tilde_vectors", "r_tilde", "r_matrix", "s_matrix",
    "gamma_dressing", "gamma_dressing_lemma", "gamma_field", "pq_matrices",
    "psi_eval", "psi_inv_eval", "gamma_from_psi_infinity",
    "residue_residuals", "specialize_solitons", "t_matrix_from_solitons",
    "SEPARATION_RTOL", "SPECTRAL_POLE_TOL",
]

SEPARATION_RTOL = 1e-10
SPECTRAL_POLE_TOL = 1e-8
SELECTION_RTOL = 1e-12


def _close(a: complex, b: complex, rtol: float) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b))


def _as_complex_table(x, shape, name):
    arr = np.asarray(x, dtype=complex)
    if arr.shape != shape:
        raise InvalidParameters(f"{name} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameters(f"{name} must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class DressingData:
    """
    Pole positions ``mu``, ``nu`` (length ``r``) and coefficient tables
    ``c``, ``d`` of shape ``(r, n)``; column ``rho - 1`` holds the
    coefficient of the eigenvector branch ``rho = 1..n``.
    """

    model: ModelParams
    mu: np.ndarray
    nu: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        n = self.model.n
        mu = np.atleast_1d(np.asarray(self.mu, dtype=complex))
        nu = np.atleast_1d(np.asarray(self.nu, dtype=complex))
        r = mu.shape[0]
        if mu.ndim != 1 or nu.shape != (r,):
            raise InvalidParameters("mu and nu must be vectors of equal length")
        c = _as_complex_table(self.c, (r, n), "c") if r else np.zeros((0, n), complex)
        d = _as_complex_table(self.d, (r, n), "d") if r else np.zeros((0, n), complex)
        for name, pts in (("mu", mu), ("nu", nu)):
            for i, p in enumerate(pts):
                if p == 0 or not np.isfinite(p):
                    raise ZeroPole(f"{name}_{i + 1} must be finite and nonzero")
        mun, nun = mu ** n, nu ** n
        for i in range(r):
            for j in range(i + 1, r):
                if _close(mun[i], mun[j], SEPARATION_RTOL):
                    raise InvalidParameters(
                        f"mu_{i + 1}^n = mu_{j + 1}^n violates pole separation (mu_i^n != mu_j^n)")
                if _close(nun[i], nun[j], SEPARATION_RTOL):
                    raise InvalidParameters(
                        f"nu_{i + 1}^n = nu_{j + 1}^n violates pole separation (nu_i^n != nu_j^n)")
        for i in range(r):
            for j in range(r):
                if _close(nun[i], mun[j], SEPARATION_RTOL):
                    raise InvalidParameters(
                        f"nu_{i + 1}^n = mu_{j + 1}^n violates pole separation (nu_i^n != mu_j^n)")
        for name, val in (("mu", mu), ("nu", nu), ("c", c), ("d", d)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def r(self) -> int:
        return self.mu.shape[0]

    @property
    def n(self) -> int:
        return self.model.n


def z_exponent(model: ModelParams, rho: int, mu: complex, zm, zp):
    """``Z_rho(mu) = m (eps^-rho zm / mu + eps^rho mu zp)``."""
    if mu == 0:
        raise ZeroPole("Z_rho is undefined at mu = 0")
    n = model.n
    rho = int(rho) % n
    return model.m * (unity_power(n, -rho) / mu * np.asarray(zm)
                      + unity_power(n, rho) * mu * np.asarray(zp))


def _branch_phases(n: int) -> np.ndarray:
    # F[k-1, rho-1] = eps^(k rho), k, rho = 1..n
    return np.array([[unity_power(n, k * p) for p in range(1, n + 1)]
                     for k in range(1, n + 1)])


def uy_vectors(data: DressingData, zm, zp):
    """
    Tables ``u[..., i, k-1]`` and ``y[..., i, k-1]``::

        u_ik = sum_rho c_{i rho} eps^(k rho) exp(-Z_rho(mu_i))
        y_ik = sum_rho d_{i rho} eps^(k rho) exp(+Z_{-rho}(nu_i))
    """
    n, r = data.n, data.r
    zm, zp = np.broadcast_arrays(np.asarray(zm, float), np.asarray(zp, float))
    F = _branch_phases(n)
    eu = np.empty(zm.shape + (r, n), dtype=complex)
    ey = np.empty(zm.shape + (r, n), dtype=complex)
    for i in range(r):
        for p in range(1, n + 1):
            eu[..., i, p - 1] = np.exp(-z_exponent(data.model, p, data.mu[i], zm, zp))
            ey[..., i, p - 1] = np.exp(z_exponent(data.model, -p, data.nu[i], zm, zp))
    u = np.einsum("kp,ip,...ip->...ik", F, data.c, eu)
    y = np.einsum("kp,ip,...ip->...ik", F, data.d, ey)
    return u, y


def tilde_vectors(data: DressingData, u, y):
    """Quasi-periodic ``u~_{i beta} = mu_i^beta u_{i beta}``, ``y~ = nu_i^-beta y``."""
    beta = np.arange(1, data.n + 1)
    mu_pow = data.mu[:, None] ** beta[None, :]
    nu_pow = data.nu[:, None] ** (-beta[None, :])
    return u * mu_pow, y * nu_pow


def _r_tilde_base(data: DressingData, ut, yt, alpha: int):
    # Closed form valid for alpha = 1..n+1.
    n = data.n
    mun = data.mu ** n
    nun = data.nu ** n
    low = np.einsum("...ib,...jb->...ij", yt[..., :alpha - 1], ut[..., :alpha - 1])
    high = np.einsum("...ib,...jb->...ij", yt[..., alpha - 1:], ut[..., alpha - 1:])
    denom = nun[:, None] - mun[None, :]
    return (mun[None, :] * low + nun[:, None] * high) / denom


def _r_tilde_from(data: DressingData, ut, yt, alpha: int):
    n = data.n
    alpha = int(alpha)
    a0 = (alpha - 1) % n + 1
    q = (alpha - a0) // n
    base = _r_tilde_base(data, ut, yt, a0)
    if q == 0:
        return base
    return (data.nu[:, None] ** (-q * n)) * base * (data.mu[None, :] ** (q * n))


def r_tilde(data: DressingData, alpha: int, zm, zp):
    """
    The r x r matrix ``R~_alpha``. Indices ``1..n+1`` use the closed sum
    formula directly; other indices go through quasi-periodicity
    ``R~_{alpha+n} = N^-n R~_alpha M^n``.
    """
    u, y = uy_vectors(data, zm, zp)
    ut, yt = tilde_vectors(data, u, y)
    if 1 <= alpha <= data.n + 1:
        return _r_tilde_base(data, ut, yt, int(alpha))
    return _r_tilde_from(data, ut, yt, alpha)


def r_matrix(data: DressingData, k: int, zm, zp):
    """Periodic ``R_k`` straight from its defining sum over ``l = 1..n``."""
    n = data.n
    k = (int(k) - 1) % n + 1
    u, y = uy_vectors(data, zm, zp)
    return _r_matrix(data, u, y, k)


def _r_matrix(data, u, y, k):
    n = data.n
    ell = np.arange(1, n + 1)
    a = (ell - k) % n
    nu_w = data.nu[:, None] ** (n - a[None, :])
    mu_w = data.mu[:, None] ** a[None, :]
    denom = data.nu[:, None] ** n - data.mu[None, :] ** n
    return np.einsum("il,jl,...il,...jl->...ij", nu_w, mu_w, y, u) / denom


def s_matrix(data: DressingData, k: int, zm, zp):
    """``S_k`` from its defining sum; indexed ``(S_k)[j, i]`` (nu index first)."""
    n = data.n
    k = (int(k) - 1) % n + 1
    u, y = uy_vectors(data, zm, zp)
    ell = np.arange(1, n + 1)
    a = (k - ell) % n
    nu_w = data.nu[:, None] ** a[None, :]
    mu_w = data.mu[:, None] ** (n - a[None, :])
    denom = data.nu[:, None] ** n - data.mu[None, :] ** n
    return -np.einsum("jl,il,...jl,...il->...ji", nu_w, mu_w, y, u) / denom


def _scalar(x):
    return complex(x) if np.ndim(x) == 0 else x


def gamma_dressing(data: DressingData, alpha: int, zm, zp, strict: bool = True,
                   check: bool = False):
    """
    ``Gamma_alpha = det R~_{alpha+1} / det R~_alpha``.

    With ``check`` the matrix-determinant-lemma form is computed as well and
    a relative disagreement above 1e-9 raises :class:`NumericalFailure`.
    """
    u, y = uy_vectors(data, zm, zp)
    ut, yt = tilde_vectors(data, u, y)
    ra = _r_tilde_from(data, ut, yt, alpha)
    rb = _r_tilde_from(data, ut, yt, alpha + 1)
    fa = numkit.lu_factor(ra)
    pole = np.asarray(fa.singular)
    if strict and np.any(pole):
        raise AtSolutionPole(f"det R~_{alpha} vanishes")
    det_a = fa.sign * np.prod(np.diagonal(fa.lu, axis1=-2, axis2=-1), axis=-1)
    det_b = np.asarray(numkit.det(rb))
    out = np.where(pole, np.nan + 0j, det_b / np.where(pole, 1.0, det_a))
    if check and not np.all(pole):
        lemma = gamma_dressing_lemma(data, alpha, zm, zp, strict=False)
        ok = ~pole
        err = np.abs(out - lemma)[ok] / np.maximum(np.abs(out)[ok], 1e-300)
        if err.size and err.max() > 1e-9:
            raise NumericalFailure(f"determinant ratio and lemma form differ by {err.max():.3g}")
    return _scalar(out)


def gamma_dressing_lemma(data: DressingData, alpha: int, zm, zp, strict: bool = True):
    """``Gamma_alpha = 1 - u~_alpha^T R~_alpha^-1 y~_alpha``."""
    n = data.n
    u, y = uy_vectors(data, zm, zp)
    ut, yt = tilde_vectors(data, u, y)
    ra = _r_tilde_from(data, ut, yt, alpha)
    a0 = (int(alpha) - 1) % n
    ua = u[..., a0] * data.mu ** alpha
    ya = y[..., a0] * data.nu ** (-alpha)
    f = numkit.lu_factor(ra)
    pole = np.asarray(f.singular)
    if strict and np.any(pole):
        raise AtSolutionPole(f"R~_{alpha} is singular")
    if data.r == 0:
        return _scalar(np.ones(np.shape(pole), dtype=complex))
    safe = np.where(pole[..., None, None], np.eye(data.r), ra)
    sol = numkit.solve(safe, ya)
    out = 1 - np.einsum("...i,...i->...", ua, sol)
    return _scalar(np.where(pole, np.nan + 0j, out))


def gamma_field(data: DressingData):
    """Grid evaluator of ``Gamma_alpha`` (determinant ratio) with NaN at poles."""
    return lambda alpha, zm, zp: gamma_dressing(data, alpha, zm, zp, strict=False)


def _twist_phases(n: int, s: int) -> np.ndarray:
    # (h^s X h^-s)_{kl} = eps^(s (l - k)) X_{kl}
    k = np.arange(n)
    return np.array([[unity_power(n, s * (l - kk)) for l in k] for kk in k])


def pq_matrices(data: DressingData, zm, zp):
    """
    Rank-one residues ``P[..., i]`` and ``Q[..., i]`` (each n x n) solving the
    residue conditions of ``psi^-1 psi = I``.

    Raises :class:`SingularRk` if some ``R_k`` is singular.
    """
    n, r = data.n, data.r
    u, y = uy_vectors(data, zm, zp)
    shape = u.shape[:-2]
    if r == 0:
        empty = np.zeros(shape + (0, n, n), dtype=complex)
        return empty, empty.copy()
    rks = np.stack([_r_matrix(data, u, y, k) for k in range(1, n + 1)], axis=-3)
    try:
        rinv = numkit.inverse(rks)
    except SingularMatrix as exc:
        raise SingularRk("some R_k is singular") from exc
    # w_{i l} = -(1/n) sum_j (R_l^-1)_{ij} y_{jl}
    w = -np.einsum("...lij,...jl->...il", rinv, y) / n
    # x_{i k} = (1/n) nu_i sum_j u_{jk} / mu_j (R_{k+1}^-1)_{ji}
    rnext = np.roll(rinv, -1, axis=-3)
    x = np.einsum("...jk,j,...kji->...ik", u, 1 / data.mu, rnext) * data.nu[:, None] / n
    P = u[..., :, :, None] * w[..., :, None, :]
    Q = x[..., :, :, None] * y[..., :, None, :]
    return P, Q


def _dressing_sum(n, poles, residues, lam):
    # I + sum_i sum_{s=1..n} lam / (lam - eps^s p_i) h^s X_i h^-s
    out = np.broadcast_to(np.eye(n, dtype=complex), residues.shape[:-3] + (n, n)).copy()
    for s in range(1, n + 1):
        ph = _twist_phases(n, s)
        es = unity_power(n, s)
        for i, p in enumerate(poles):
            gap = lam - es * p
            if abs(gap) <= SPECTRAL_POLE_TOL:
                raise AtPole(f"lambda = {lam} sits on the pole eps^{s} * {p}")
            out += (lam / gap) * ph * residues[..., i, :, :]
    return out


def psi_eval(data: DressingData, lam: complex, zm, zp, pq=None):
    """Dressing mapping ``psi(lambda)`` at a finite spectral point, ``psi_0 = I``."""
    P, _ = pq if pq is not None else pq_matrices(data, zm, zp)
    return _dressing_sum(data.n, data.mu, P, complex(lam))


def psi_inv_eval(data: DressingData, lam: complex, zm, zp, pq=None):
    """Inverse dressing mapping ``psi^-1(lambda)`` built from ``Q`` and ``nu``."""
    _, Q = pq if pq is not None else pq_matrices(data, zm, zp)
    return _dressing_sum(data.n, data.nu, Q, complex(lam))


def gamma_from_psi_infinity(data: DressingData, zm, zp, offdiag_tol: float = 1e-11):
    """
    Diagonal of ``gamma = psi(infinity) = I + sum_i sum_s h^s P_i h^-s``.

    The twisted average kills the off-diagonal part of each ``P_i``; a
    remainder above ``offdiag_tol`` (relative to the size of ``P``) raises
    :class:`NumericalFailure`.
    """
    n = data.n
    P, _ = pq_matrices(data, zm, zp)
    acc = np.zeros(P.shape[:-3] + (n, n), dtype=complex)
    for s in range(1, n + 1):
        acc += _twist_phases(n, s) * P.sum(axis=-3)
    off = acc - acc * np.eye(n)
    scale = 1.0 + n * np.abs(P).max(initial=0.0)
    if np.abs(off).max(initial=0.0) > offdiag_tol * scale:
        raise NumericalFailure("twisted average of P is not diagonal")
    return 1 + np.diagonal(acc, axis1=-2, axis2=-1)


def _fd(fun, zm, zp, h, axis):
    # 5-point central first derivative along zm (axis 0) or zp (axis 1)
    if axis == 0:
        f = lambda t: fun(zm + t, zp)
    else:
        f = lambda t: fun(zm, zp + t)
    return (f(-2 * h) - 8 * f(-h) + 8 * f(h) - f(2 * h)) / (12 * h)


def residue_residuals(data: DressingData, zm: float, zp: float, h: float = 1e-5) -> dict:
    """
    Infinity norms of every residue condition at one point.

    The four flow conditions differentiate ``P`` and ``Q`` by central finite
    differences with step ``h``.
    """
    n, r = data.n, data.r
    cm, cp = c_minus(data.model), c_plus(data.model)
    pq = pq_matrices(data, zm, zp)
    P, Q = pq
    dmP = _fd(lambda a, b: pq_matrices(data, a, b)[0], zm, zp, h, 0)
    dpP = _fd(lambda a, b: pq_matrices(data, a, b)[0], zm, zp, h, 1)
    dmQ = _fd(lambda a, b: pq_matrices(data, a, b)[1], zm, zp, h, 0)
    dpQ = _fd(lambda a, b: pq_matrices(data, a, b)[1], zm, zp, h, 1)
    out = {k: 0.0 for k in ("residue_at_nu", "residue_at_mu", "minus_flow_at_nu",
                            "plus_flow_at_nu", "minus_flow_at_mu", "plus_flow_at_mu")}

    def norm(a):
        return float(np.abs(a).sum(axis=-1).max())

    for i in range(r):
        psi_nu = psi_eval(data, data.nu[i], zm, zp, pq)
        psi_inv_mu = psi_inv_eval(data, data.mu[i], zm, zp, pq)
        nu, mu = data.nu[i], data.mu[i]
        vals = {
            "residue_at_nu": Q[i] @ psi_nu,
            "residue_at_mu": psi_inv_mu @ P[i],
            "minus_flow_at_nu": (dmQ[i] - Q[i] @ cm / nu) @ psi_nu,
            "plus_flow_at_nu": (dpQ[i] - nu * Q[i] @ cp) @ psi_nu,
            "minus_flow_at_mu": psi_inv_mu @ (dmP[i] + cm @ P[i] / mu),
            "plus_flow_at_mu": psi_inv_mu @ (dpP[i] + mu * cp @ P[i]),
        }
        for k, v in vals.items():
            out[k] = max(out[k], norm(v))
    return out


# ---------------------------------------------------------------------------
# Soliton specialization


@dataclass(frozen=True)
class SolitonSelection:
    """
    Per pole ``i``: the single nonzero ``c`` branch ``I_i`` and the two nonzero
    ``d`` branches ``J_i != K_i`` with amplitudes ``dJ_i``, ``dK_i``.
    """

    I: tuple
    J: tuple
    K: tuple
    dJ: tuple
    dK: tuple

    def __post_init__(self):
        fields = [tuple(v) for v in (self.I, self.J, self.K, self.dJ, self.dK)]
        r = len(fields[0])
        if any(len(f) != r for f in fields):
            raise DegenerateSelection("selection lists must have equal length")
        for name, f in zip(("I", "J", "K", "dJ", "dK"), fields):
            object.__setattr__(self, name, f)
        for i in range(r):
            if self.J[i] == self.K[i]:
                raise DegenerateSelection(f"pole {i + 1}: J = K gives rho = 0, which is excluded")
            if self.dJ[i] == 0 or self.dK[i] == 0:
                raise DegenerateSelection(f"pole {i + 1}: amplitudes dJ, dK must be nonzero")

    def validate(self, n: int):
        for name in ("I", "J", "K"):
            for i, v in enumerate(getattr(self, name)):
                if int(v) != v or not 1 <= v <= n:
                    raise IndexOutOfRange(f"pole {i + 1}: {name} must be an integer in 1..{n}")

    @property
    def r(self) -> int:
        return len(self.I)


@dataclass(frozen=True, eq=False)
class Specialization:
    """
    Soliton specialization of dressing data.

    ``data`` holds the general coefficient tables realising the selection,
    ``params`` the equivalent Hirota data and ``prefactor`` the constant by
    which the dressing field exceeds the Hirota field.
    """

    data: DressingData
    selection: SolitonSelection
    params: SolitonParams
    d: np.ndarray
    prefactor: complex

    def t_matrix(self, alpha: int, zm, zp):
        """``(T_alpha)_ij`` in terms of the pole data."""
        data, sel = self.data, self.selection
        n, r = data.n, data.r
        nu = data.nu
        J = np.array(sel.J)
        K = np.array(sel.K)
        ftil = nu * np.array([unity_power(n, -k) for k in K])
        f = nu * np.array([unity_power(n, -j) for j in J])
        zm_a, zp_a = np.broadcast_arrays(np.asarray(zm, float), np.asarray(zp, float))
        out = np.broadcast_to(np.eye(r, dtype=complex), zm_a.shape + (r, r)).copy()
        for i in range(r):
            expo = (z_exponent(data.model, -K[i], nu[i], zm_a, zp_a)
                    - z_exponent(data.model, -J[i], nu[i], zm_a, zp_a))
            amp = self.d[i] * unity_power(n, (K[i] - J[i]) * alpha) * np.exp(expo)
            out[..., i, :] += amp[..., None] * ((ftil[i] - f[i]) / (ftil[i] - f))
        return out

    def det_t(self, alpha: int, zm, zp):
        return _scalar(np.asarray(numkit.det(self.t_matrix(alpha, zm, zp))))


def _selection_d(n, mu, nu, sel: SolitonSelection) -> np.ndarray:
    r = len(mu)
    e = lambda x: unity_power(n, x)
    fJ = np.array([nu[i] * e(-sel.J[i]) for i in range(r)])
    fK = np.array([nu[i] * e(-sel.K[i]) for i in range(r)])
    g = np.array([mu[i] * e(sel.I[i]) for i in range(r)])
    out = np.empty(r, dtype=complex)
    for i in range(r):
        others = [l for l in range(r) if l != i]
        num = (sel.dK[i] * e(sel.J[i]) * np.prod([fK[i] - fJ[l] for l in others])
               * np.prod(fJ[i] - g))
        den_factors = [sel.dJ[i] * e(sel.K[i])] + [fJ[i] - fJ[l] for l in others] + list(fK[i] - g)
        scale = max(abs(nu[i]), max(abs(mu)), 1e-300)
        for fac in den_factors[1:]:
            if abs(fac) < SELECTION_RTOL * scale:
                raise DegenerateSelection(f"pole {i + 1}: vanishing factor in the soliton amplitude")
        out[i] = num / np.prod(den_factors)
    return out


def specialize_solitons(model: ModelParams, mu: Sequence[complex], nu: Sequence[complex],
                        selection: SolitonSelection) -> Specialization:
    """
    Restrict the dressing data to soliton form and derive the equivalent
    Hirota parameters ``rho_i = K_i - J_i`` (reduced into ``1..n-1``),
    ``zeta_i = -i eps^(-(K_i+J_i)/2) nu_i`` and ``delta_i = log d_i``.

    When ``K_i < J_i`` the reduction of ``rho_i`` by ``n`` flips the sign of
    ``kappa``, so ``zeta_i`` is negated to keep ``kappa * zeta`` fixed.
    """
    n = model.n
    selection.validate(n)
    r = selection.r
    mu = np.asarray(mu, dtype=complex)
    nu = np.asarray(nu, dtype=complex)
    if mu.shape != (r,) or nu.shape != (r,):
        raise DegenerateSelection("mu, nu and the selection must all have length r")
    c = np.zeros((r, n), dtype=complex)
    d = np.zeros((r, n), dtype=complex)
    for i in range(r):
        c[i, selection.I[i] - 1] = 1.0
        d[i, selection.J[i] - 1] = selection.dJ[i]
        d[i, selection.K[i] - 1] = selection.dK[i]
    data = DressingData(model, mu, nu, c, d)
    dvals = _selection_d(n, mu, nu, selection)
    rho, zeta = [], []
    for i in range(r):
        J, K = selection.J[i], selection.K[i]
        z = -1j * unity_power(n, -(K + J) / 2) * nu[i]
        if K < J:
            z = -z
        rho.append((K - J) % n)
        zeta.append(z)
    delta = [complex(np.log(v)) for v in dvals]
    params = SolitonParams(model, tuple(rho), tuple(zeta), tuple(delta))
    pref = complex(np.prod([mu[i] / nu[i] * unity_power(n, selection.I[i] + selection.J[i])
                            for i in range(r)]))
    return Specialization(data, selection, params, dvals, pref)


def t_matrix_from_solitons(params: SolitonParams, alpha: int, zm, zp, branch: int = 0):
    """
    ``T_alpha`` written with Hirota data::

        delta_ij + eps^(rho_i alpha) exp[m kappa_i (zm/zeta_i + zeta_i zp) + delta_i]
                   * (eps^(-rho_i/2) - eps^(rho_i/2)) zeta_i
                   / (eps^(-rho_i/2) zeta_i - eps^(rho_j/2) zeta_j)

    ``branch = 1`` takes the other square root for every half-integer power,
    flipping ``eps^(rho/2)``, ``kappa`` and ``zeta`` together.
    """
    n, r = params.model.n, params.r
    s = -1.0 if branch % 2 else 1.0
    half = np.array([s * unity_power(n, p / 2) for p in params.rho])
    zeta = s * np.array(params.zeta)
    kap = -1j * (half - 1 / half)
    ftil = zeta / half
    f = zeta * half
    zm_a, zp_a = np.broadcast_arrays(np.asarray(zm, float), np.asarray(zp, float))
    out = np.broadcast_to(np.eye(r, dtype=complex), zm_a.shape + (r, r)).copy()
    m = params.model.m
    for i in range(r):
        expo = m * kap[i] * (zm_a / zeta[i] + zeta[i] * zp_a) + params.delta[i]
        amp = unity_power(n, params.rho[i] * alpha) * np.exp(expo)
        out[..., i, :] += amp[..., None] * ((ftil[i] - f[i]) / (ftil[i] - f))
    return out
