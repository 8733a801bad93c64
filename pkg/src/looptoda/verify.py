"""
Independent correctness oracles.

Finite-difference residuals of the field equations (Toda, bilinear, affine
Cartan form, zero curvature), a spot check of the perturbative Hirota
recursion, and closed-form identities for Cauchy-like matrices, roots of
unity and the multi-soliton interaction coefficients.

First derivatives use 5-point central stencils (fourth order); the mixed
derivative uses the 4-corner cross stencil (second order), so every field
residual converges like ``h**2``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import dressing, hirota, numkit
from .errors import (AtPole, AtUnityPole, DegenerateNodes, EmptyGrid, InvalidParameters,
                     TooManyIndices)
from .hirota import Point, SolitonParams
from .model import ModelParams, c_minus, c_plus, cartan, kappa_squared
from .numkit import unity_power

__all__ = [
    "GridSpec", "ResidualReport", "Convergence", "convergence",
    "toda_residual", "bilinear_residual", "affine_residual",
    "zero_curvature_residual", "conditioning", "hirota_recursion_check", "recursion_rhs",
    "d_matrix", "d_inverse_closed", "d_residue_sum", "d_mixed_product",
    "partial_fraction_identity", "eta_multi_bruteforce", "identity_suite",
    "NODE_RTOL",
]

NODE_RTOL = 1e-10


@dataclass(frozen=True)
class GridSpec:
    """Rectangular ``(zm, zp)`` grid with ``nz x np`` points and FD step ``h``."""

    zm_min: float = -1.0
    zm_max: float = 1.0
    zp_min: float = -1.0
    zp_max: float = 1.0
    nz: int = 21
    np: int = 21
    h: float = 1e-3

    def __post_init__(self):
        if not (self.zm_max > self.zm_min and self.zp_max > self.zp_min):
            raise InvalidParameters("grid bounds must satisfy max > min")
        if int(self.nz) != self.nz or int(self.np) != self.np or self.nz < 2 or self.np < 2:
            raise InvalidParameters("grid steps must be integers >= 2")
        span = min(self.zm_max - self.zm_min, self.zp_max - self.zp_min)
        if not 0 < self.h < 0.1 * span:
            raise InvalidParameters("finite-difference step h must satisfy 0 < h < 0.1 * range")

    def axes(self):
        return (np.linspace(self.zm_min, self.zm_max, int(self.nz)),
                np.linspace(self.zp_min, self.zp_max, int(self.np)))

    def points(self):
        """Mesh arrays ``(ZM, ZP)`` of shape ``(nz, np)``, zm-major."""
        zm, zp = self.axes()
        return np.meshgrid(zm, zp, indexing="ij")

    def with_h(self, h: float) -> "GridSpec":
        return replace(self, h=h)


@dataclass(frozen=True)
class ResidualReport:
    max_abs: float
    mean_abs: float
    worst_point: Point
    skipped_cells: int
    h_used: float

    def to_dict(self) -> dict:
        return {
            "max_abs": self.max_abs,
            "mean_abs": self.mean_abs,
            "worst_zm": self.worst_point.zm,
            "worst_zp": self.worst_point.zp,
            "skipped_cells": self.skipped_cells,
            "h": self.h_used,
        }


@dataclass(frozen=True)
class Convergence:
    coarse: ResidualReport
    fine: ResidualReport

    @property
    def ratio(self) -> float:
        if self.fine.max_abs == 0:
            return math.inf if self.coarse.max_abs > 0 else math.nan
        return self.coarse.max_abs / self.fine.max_abs

    def second_order(self, lo: float = 3.2, hi: float = 4.8) -> bool:
        return lo <= self.ratio <= hi

    def to_dict(self) -> dict:
        return {"coarse": self.coarse.to_dict(), "fine": self.fine.to_dict(),
                "ratio": self.ratio}


def convergence(check: Callable[[GridSpec], ResidualReport], grid: GridSpec) -> Convergence:
    """Run ``check`` at ``grid.h`` and at ``grid.h / 2``."""
    return Convergence(check(grid), check(grid.with_h(grid.h / 2)))


# ---------------------------------------------------------------------------
# finite-difference machinery

_OFFSETS = [(0, 0), (-2, 0), (-1, 0), (1, 0), (2, 0), (0, -2), (0, -1), (0, 1),
            (0, 2), (1, 1), (1, -1), (-1, 1), (-1, -1)]


class _Stencil:
    """Samples of ``fun(zm, zp)`` on the 13-point stencil around every grid node."""

    def __init__(self, fun, ZM, ZP, h):
        self.h = h
        self.s = {o: np.asarray(fun(ZM + o[0] * h, ZP + o[1] * h)) for o in _OFFSETS}
        extra = tuple(range(ZM.ndim, self.s[(0, 0)].ndim))
        bad = np.zeros(ZM.shape, dtype=bool)
        for v in self.s.values():
            bad |= ~np.all(np.isfinite(v), axis=extra) if extra else ~np.isfinite(v)
        self.bad = bad

    @property
    def f(self):
        return self.s[(0, 0)]

    def _d1(self, axis):
        s, h = self.s, self.h
        key = (lambda t: (t, 0)) if axis == 0 else (lambda t: (0, t))
        return (s[key(-2)] - 8 * s[key(-1)] + 8 * s[key(1)] - s[key(2)]) / (12 * h)

    @property
    def dm(self):
        return self._d1(0)

    @property
    def dp(self):
        return self._d1(1)

    @property
    def dmp(self):
        s, h = self.s, self.h
        return (s[(1, 1)] - s[(1, -1)] - s[(-1, 1)] + s[(-1, -1)]) / (4 * h * h)


def _report(res, bad, ZM, ZP, h) -> ResidualReport:
    """``res`` has shape (components, nz, np); cells flagged ``bad`` are skipped."""
    if ZM.size == 0:
        raise EmptyGrid("grid has no cells")
    with np.errstate(invalid="ignore"):
        absr = np.abs(res)
    bad = bad | ~np.all(np.isfinite(absr), axis=0)
    good = ~bad
    if not good.any():
        raise EmptyGrid("every grid cell was skipped as pole-adjacent")
    cell = np.where(good, absr.max(axis=0), -np.inf)
    idx = np.unravel_index(np.argmax(cell), cell.shape)
    return ResidualReport(
        max_abs=float(cell[idx]),
        mean_abs=float(absr[:, good].mean()),
        worst_point=Point(float(ZM[idx]), float(ZP[idx])),
        skipped_cells=int(bad.sum()),
        h_used=float(h),
    )


def _log_laplacian(st: _Stencil):
    # d+ (f^-1 d- f) = (f d+d- f - d+ f d- f) / f^2
    f = st.f
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        return (f * st.dmp - st.dp * st.dm) / (f * f)


def conditioning(field, model: ModelParams, grid: GridSpec) -> dict:
    """
    Size of the field on the grid: the largest ``|Gamma|``, ``|Gamma|^-1`` and
    ``|d+- log Gamma|`` over all grid nodes and ``alpha``. Residual bounds at
    a fixed step are only meaningful when all three are O(1); infinite
    entries mean a pole was hit.
    """
    ZM, ZP = grid.points()
    big = small = slope = 0.0
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        for al in range(1, model.n + 1):
            st = _Stencil(lambda a, b: field(al, a, b), ZM, ZP, grid.h)
            if st.bad.any():
                return {"max_abs": math.inf, "max_inv_abs": math.inf, "max_log_slope": math.inf}
            g = st.f
            big = max(big, float(np.abs(g).max()))
            small = max(small, float((1 / np.abs(g)).max()))
            slope = max(slope, float(np.abs(st.dm / g).max()), float(np.abs(st.dp / g).max()))
    return {"max_abs": big, "max_inv_abs": small, "max_log_slope": slope}


# ---------------------------------------------------------------------------
# field residuals


def toda_residual(field, model: ModelParams, grid: GridSpec) -> ResidualReport:
    """
    Residual of ``d+(G_a^-1 d- G_a) + m^2 (G_a^-1 G_{a+1} - G_{a-1}^-1 G_a)``
    maximised over the grid and ``a = 1..n``.
    """
    n, m2 = model.n, model.m ** 2
    ZM, ZP = grid.points()
    st = [_Stencil(lambda a, b, al=al: field(al, a, b), ZM, ZP, grid.h)
          for al in range(1, n + 1)]
    bad = np.zeros(ZM.shape, dtype=bool)
    res = []
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        for a in range(n):
            g, gn, gp = st[a].f, st[(a + 1) % n].f, st[(a - 1) % n].f
            res.append(_log_laplacian(st[a]) + m2 * (gn / g - g / gp))
            bad |= st[a].bad
    return _report(np.array(res), bad, ZM, ZP, grid.h)


def bilinear_residual(params: SolitonParams, grid: GridSpec) -> ResidualReport:
    """Residual of ``tau tau_{+-} - tau_+ tau_- - m^2 (tau^2 - tau_{a-1} tau_{a+1})``."""
    n, m2 = params.model.n, params.model.m ** 2
    ZM, ZP = grid.points()
    st = [_Stencil(lambda a, b, al=al: hirota.tau(params, al, a, b), ZM, ZP, grid.h)
          for al in range(n)]
    res = []
    for a in range(n):
        t = st[a].f
        res.append(t * st[a].dmp - st[a].dp * st[a].dm
                   - m2 * (t * t - st[(a - 1) % n].f * st[(a + 1) % n].f))
    return _report(np.array(res), np.zeros(ZM.shape, bool), ZM, ZP, grid.h)


def affine_residual(params: SolitonParams, grid: GridSpec,
                    cartan_matrix: np.ndarray | None = None) -> ResidualReport:
    """
    Residual of ``d+(D_a^-1 d- D_a) + m^2 prod_b D_b^(-a_ab)`` for the fields
    ``D_a = exp(-m^2 zp zm) tau_a``, ``a = 0..n-1``.

    The Gaussian factor contributes exactly ``-m^2`` to the left term, so only
    ``tau`` is differenced; the product term uses the ``D`` values themselves.
    ``cartan_matrix`` replaces the affine Cartan matrix (negative controls).
    """
    model = params.model
    n, m2 = model.n, model.m ** 2
    a_mat = cartan(model) if cartan_matrix is None else np.asarray(cartan_matrix)
    ZM, ZP = grid.points()
    st = [_Stencil(lambda a, b, al=al: hirota.tau(params, al, a, b), ZM, ZP, grid.h)
          for al in range(n)]
    delta = [hirota.delta_field(params, al, ZM, ZP) for al in range(n)]
    bad = np.zeros(ZM.shape, dtype=bool)
    res = []
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        for a in range(n):
            prod = np.ones(ZM.shape, dtype=complex)
            for b in range(n):
                if a_mat[a, b]:
                    prod = prod * delta[b] ** (-float(a_mat[a, b]))
            res.append(_log_laplacian(st[a]) - m2 + m2 * prod)
            bad |= st[a].bad
    return _report(np.array(res), bad, ZM, ZP, grid.h)


def _gamma_diag(data, route):
    if route == "det":
        return lambda zm, zp: np.stack(
            [dressing.gamma_dressing(data, al, zm, zp, strict=False)
             for al in range(1, data.n + 1)], axis=-1)
    if route == "psi":
        return lambda zm, zp: dressing.gamma_from_psi_infinity(data, zm, zp)
    raise ValueError(f"unknown route {route!r}")


def zero_curvature_residual(data: "dressing.DressingData", lambdas, grid: GridSpec,
                            route: str = "det") -> ResidualReport:
    """
    Infinity norm of ``d- w+ - d+ w- + [w-, w+]`` for the connection
    ``w- = g^-1 d- g + c_-/lambda``, ``w+ = lambda g^-1 c_+ g`` with
    ``g = diag(Gamma_1..Gamma_n)`` from the dressing solution.

    ``route`` selects the determinant ratio (``"det"``) or ``psi`` at
    infinity (``"psi"``) as the source of ``g``.
    """
    model = data.model
    n = model.n
    cm, cp = c_minus(model), c_plus(model)
    ZM, ZP = grid.points()
    for lam in lambdas:
        for p in list(data.mu) + list(data.nu):
            for s in range(n):
                if abs(lam - unity_power(n, s) * p) <= dressing.SPECTRAL_POLE_TOL:
                    raise AtPole(f"lambda = {lam} is a pole of the dressing mapping")
    gd = _gamma_diag(data, route)
    st = _Stencil(gd, ZM, ZP, grid.h)
    # conjugated shift g^-1 c_+ g at every stencil sample
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        conj = {o: (1 / v)[..., :, None] * cp * v[..., None, :] for o, v in st.s.items()}
        g = st.f
        gi = 1 / g
        # diagonal matrices reduce to vectors
        log_dm = gi * st.dm
        dp_log_dm = -gi * st.dp * gi * st.dm + gi * st.dmp
        h = grid.h
        d_conj = (conj[(-2, 0)] - 8 * conj[(-1, 0)] + 8 * conj[(1, 0)] - conj[(2, 0)]) / (12 * h)
        eye = np.eye(n)
        out = []
        for lam in lambdas:
            lam = complex(lam)
            wm = log_dm[..., :, None] * eye + cm / lam
            wp = lam * conj[(0, 0)]
            d_wp = lam * d_conj
            d_wm = dp_log_dm[..., :, None] * eye
            curv = d_wp - d_wm + wm @ wp - wp @ wm
            out.append(np.abs(curv).sum(axis=-1).max(axis=-1))
    return _report(np.array(out), st.bad, ZM, ZP, grid.h)


# ---------------------------------------------------------------------------
# perturbative recursion


def _first_order(params: SolitonParams, alpha, zm, zp):
    if params.r == 0:
        return np.zeros(np.broadcast(zm, zp).shape, dtype=complex)
    return sum(hirota.exp_E(params, alpha, i, zm, zp) for i in range(params.r))


def recursion_rhs(params: SolitonParams, alpha: int, zm, zp):
    """
    Second-order source term from ``tau^(1) = sum_i E_i`` computed two ways:
    ``(bracket, direct)``. ``bracket`` is the symmetrised double sum with the
    kappa-bracket coefficients; ``direct`` evaluates
    ``-t d+d- t + d+ t d- t + m^2 (t t - t_{a-1} t_{a+1})`` using the exact
    derivatives of the exponentials.
    """
    m = params.model.m
    r = params.r
    shape = np.broadcast(np.asarray(zm), np.asarray(zp)).shape
    E = [np.broadcast_to(hirota.exp_E(params, alpha, i, zm, zp), shape) for i in range(r)]
    kap = [params.kappa(i) for i in range(r)]
    zeta = params.zeta
    bracket = np.zeros(shape, dtype=complex)
    for i in range(r):
        for j in range(r):
            coef = (kap[i] * kap[j] * (zeta[i] / zeta[j] + zeta[j] / zeta[i])
                    - kap[i] ** 2 - kap[j] ** 2
                    + kappa_squared(params.model, params.rho[i] - params.rho[j]))
            bracket = bracket + 0.5 * m * m * coef * E[i] * E[j]
    t = sum(E, np.zeros(shape, complex))
    dm_t = sum((m * kap[i] / zeta[i] * E[i] for i in range(r)), np.zeros(shape, complex))
    dp_t = sum((m * kap[i] * zeta[i] * E[i] for i in range(r)), np.zeros(shape, complex))
    dpm_t = sum((m * m * kap[i] ** 2 * E[i] for i in range(r)), np.zeros(shape, complex))
    t_prev = _first_order(params, alpha - 1, zm, zp)
    t_next = _first_order(params, alpha + 1, zm, zp)
    direct = -t * dpm_t + dp_t * dm_t + m * m * (t * t - t_prev * t_next)
    return bracket, direct


def hirota_recursion_check(params: SolitonParams, k: int, grid: GridSpec) -> ResidualReport:
    """
    ``k = 1``: finite-difference residual of
    ``d+d- tau1_a - m^2 sum_b a_ab tau1_b`` with ``tau1 = sum_i E_i``.
    ``k = 2``: pointwise relative gap between the two forms of
    :func:`recursion_rhs`, scaled by ``|m|^2 (sum_i |E_i|)^2``.
    """
    if params.r < 1:
        raise InvalidParameters("the recursion check needs at least one soliton")
    model = params.model
    n, m2 = model.n, model.m ** 2
    ZM, ZP = grid.points()
    if k == 1:
        a_mat = cartan(model)
        st = [_Stencil(lambda a, b, al=al: _first_order(params, al, a, b), ZM, ZP, grid.h)
              for al in range(n)]
        res = []
        for a in range(n):
            lin = sum(a_mat[a, b] * st[b].f for b in range(n))
            res.append(st[a].dmp - m2 * lin)
        return _report(np.array(res), np.zeros(ZM.shape, bool), ZM, ZP, grid.h)
    if k == 2:
        res = []
        for a in range(n):
            bracket, direct = recursion_rhs(params, a, ZM, ZP)
            scale = abs(m2) * sum(np.abs(hirota.exp_E(params, a, i, ZM, ZP))
                                  for i in range(params.r)) ** 2
            res.append(np.abs(bracket - direct) / scale)
        return _report(np.array(res), np.zeros(ZM.shape, bool), ZM, ZP, 0.0)
    raise InvalidParameters("recursion order k must be 1 or 2")


# ---------------------------------------------------------------------------
# closed-form identities


def _check_nodes(f, g, ftil=None):
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if f.shape != g.shape or f.ndim != 1:
        raise DegenerateNodes("f and g must be vectors of equal length")

    def close(a, b):
        return abs(a - b) <= NODE_RTOL * max(abs(a), abs(b))

    r = f.size
    for i in range(r):
        if f[i] == 0:
            raise DegenerateNodes("f nodes must be nonzero")
        for j in range(r):
            if close(f[i], g[j]):
                raise DegenerateNodes(f"f_{i + 1} coincides with g_{j + 1}")
            if j > i and close(f[i], f[j]):
                raise DegenerateNodes(f"f_{i + 1} coincides with f_{j + 1}")
            if j > i and close(g[i], g[j]):
                raise DegenerateNodes(f"g_{i + 1} coincides with g_{j + 1}")
            if ftil is not None and close(ftil[i], g[j]):
                raise DegenerateNodes(f"f~_{i + 1} coincides with g_{j + 1}")
    return f, g


def d_matrix(f, g) -> np.ndarray:
    """``D_ij(f, g) = f_i / (f_i - g_j)``."""
    f, g = _check_nodes(f, g)
    return f[:, None] / (f[:, None] - g[None, :])


def _prod_except(vals, skip):
    return np.prod([v for l, v in enumerate(vals) if l != skip]) if len(vals) > 1 else 1.0


def d_inverse_closed(f, g) -> np.ndarray:
    """Product formula for the inverse of ``D(f, g)``."""
    f, g = _check_nodes(f, g)
    r = f.size
    out = np.empty((r, r), dtype=complex)
    for i in range(r):
        for j in range(r):
            num = _prod_except(f - g[i], j) * np.prod(f[j] - g)
            den = f[j] * _prod_except(g - g[i], i) * _prod_except(f[j] - f, j)
            out[i, j] = num / den
    return out


def d_residue_sum(f, g) -> np.ndarray:
    """
    The sum over ``k`` that proves the inverse formula, evaluated term by
    term; it should equal the identity matrix.
    """
    f, g = _check_nodes(f, g)
    r = f.size
    out = np.zeros((r, r), dtype=complex)
    for i in range(r):
        for j in range(r):
            pre = np.prod(f[j] - g) / (f[j] * _prod_except(f[j] - f, j))
            for k in range(r):
                out[i, j] += (f[i] * _prod_except(f - g[k], j) * pre
                              / ((f[i] - g[k]) * _prod_except(g - g[k], k)))
    return out


def d_mixed_product(ftil, f, g):
    """
    ``(D(f~, g) @ D(f, g)^-1, closed form)``; the numeric product uses the
    LU inverse.
    """
    ftil = np.asarray(ftil, dtype=complex)
    f, g = _check_nodes(f, g, ftil)
    r = f.size
    prod = d_matrix(ftil, g) @ numkit.inverse(d_matrix(f, g)) if r else np.zeros((0, 0))
    closed = np.empty((r, r), dtype=complex)
    for i in range(r):
        for j in range(r):
            num = ftil[i] * _prod_except(ftil[i] - f, j) * np.prod(f[j] - g)
            den = f[j] * np.prod(ftil[i] - g) * _prod_except(f[j] - f, j)
            closed[i, j] = num / den
    return prod, closed


def partial_fraction_identity(n: int, j: int, z: complex):
    """
    ``(lhs, rhs)`` of
    ``sum_{k=0}^{n-1} z eps^(-jk) / (z - eps^k) = n z^(n - |j|_n) / (z^n - 1)``.
    """
    z = complex(z)
    if abs(z ** n - 1) <= 1e-8:
        raise AtUnityPole(f"z = {z} is an n-th root of unity")
    lhs = sum(z * unity_power(n, -j * k) / (z - unity_power(n, k)) for k in range(n))
    rhs = n * z ** (n - j % n) / (z ** n - 1)
    return complex(lhs), complex(rhs)


def _perm_sign(p):
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def eta_multi_bruteforce(params: SolitonParams, indices, max_len: int = 8):
    """
    ``(perm_sum, product)`` for the soliton subset ``indices`` (zero-based,
    increasing): the signed permutation sum defining the multi-index
    coefficient against the product of pairwise ``eta``.
    """
    idx = list(indices)
    if len(idx) > max_len:
        raise TooManyIndices(f"{len(idx)} indices exceed the enumeration cap of {max_len}")
    if sorted(set(idx)) != idx:
        raise InvalidParameters("indices must be strictly increasing")
    n = params.model.n
    ftil = np.array([unity_power(n, -params.rho[i] / 2) * params.zeta[i] for i in idx])
    f = np.array([unity_power(n, params.rho[i] / 2) * params.zeta[i] for i in idx])
    ell = len(idx)
    for a in range(ell):
        for b in range(ell):
            if abs(ftil[a] - f[b]) <= NODE_RTOL * max(abs(ftil[a]), abs(f[b])):
                raise DegenerateNodes(f"f~_{idx[a]} coincides with f_{idx[b]}")
    total = 0j
    for p in itertools.permutations(range(ell)):
        term = complex(_perm_sign(p))
        for a in range(ell):
            term *= (ftil[a] - f[a]) / (ftil[a] - f[p[a]])
        total += term
    product = 1 + 0j
    for a, b in itertools.combinations(idx, 2):
        product *= hirota.eta_pair(params, a, b)
    return total, product


# ---------------------------------------------------------------------------
# randomized identity suite


def _rel(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))


def _separated(rng, k, lo=0.5, hi=2.0, min_gap=0.05):
    while True:
        z = rng.uniform(lo, hi, k) * np.exp(2j * np.pi * rng.uniform(size=k))
        gaps = np.abs(z[:, None] - z[None, :]) + np.eye(k) * 1e9
        if gaps.min() > min_gap * hi:
            return z


def identity_suite(seed: int = 42, instances: int = 100, tol: float = 1e-9) -> dict:
    """
    Randomized check of the Cauchy-matrix inverse, its residue-sum proof, the
    mixed product, the interaction-coefficient product law and the
    root-of-unity partial-fraction identity.

    Draws come from ``numpy.random.default_rng(seed)`` (PCG64).
    """
    rng = np.random.default_rng(seed)
    errs = {"d_inverse": [], "d_residue_sum": [], "d_mixed_product": [],
            "eta_product": [], "partial_fraction": []}
    for _ in range(instances):
        r = int(rng.integers(1, 6))
        nodes = _separated(rng, 3 * r)
        f, g, ft = nodes[:r], nodes[r:2 * r], nodes[2 * r:]
        errs["d_inverse"].append(_rel(d_inverse_closed(f, g), numkit.inverse(d_matrix(f, g))))
        errs["d_residue_sum"].append(_rel(d_residue_sum(f, g), np.eye(r)))
        prod, closed = d_mixed_product(ft, f, g)
        errs["d_mixed_product"].append(_rel(prod, closed))

        n = int(rng.integers(2, 7))
        ell = int(rng.integers(2, 5))
        model = ModelParams(n)
        while True:
            rho = rng.integers(1, n, ell)
            zeta = rng.uniform(0.5, 2.0, ell) * np.exp(2j * np.pi * rng.uniform(size=ell))
            try:
                sp = SolitonParams(model, tuple(int(p) for p in rho), tuple(zeta),
                                   (0j,) * ell)
                perm_sum, product = eta_multi_bruteforce(sp, range(ell))
            except (InvalidParameters, ArithmeticError):
                continue
            break
        errs["eta_product"].append(abs(perm_sum - product) / max(abs(product), 1e-300))

        n = int(rng.integers(2, 9))
        j = int(rng.integers(-3 * n, 3 * n))
        z = _separated(rng, 1, 0.3, 3.0)[0]
        while abs(z ** n - 1) < 1e-2:
            z = _separated(rng, 1, 0.3, 3.0)[0]
        lhs, rhs = partial_fraction_identity(n, j, z)
        errs["partial_fraction"].append(abs(lhs - rhs) / (1 + abs(rhs)))
    out = {}
    for name, e in errs.items():
        e = np.asarray(e)
        out[name] = {"instances": int(e.size), "passed": int((e <= tol).sum()),
                     "max_error": float(e.max()), "tol": tol, "ok": bool((e <= tol).all())}
    return out
