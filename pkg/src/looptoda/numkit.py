"""
Small dense complex linear algebra kernel.

All routines accept a single square matrix of shape ``(d, d)`` or a stack of
them with shape ``(..., d, d)``; stacked inputs are factorized independently
so that whole grids of points can be processed in one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrix

__all__ = ["LuFactors", "unity_power", "lu_factor", "det", "solve", "inverse",
           "SINGULAR_RTOL"]

#: Pivot magnitudes below ``SINGULAR_RTOL * max|entry|`` flag a singular matrix.
SINGULAR_RTOL = 1e-14

_EXACT_QUARTERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def unity_power(n: int, x: float) -> complex:
    """
    Return ``exp(2 pi i x / n)``, the ``x``-th power of the principal
    ``n``-th root of unity.

    Fractional ``x`` uses the principal branch.  The exponent is reduced
    modulo ``n`` first, and multiples of a quarter turn are returned exactly.
    """
    if n < 1:
        raise ValueError("n must be positive")
    t = math.fmod(x, n)
    if t < 0:
        t += n
    q = 4.0 * t / n
    if q == int(q):
        return _EXACT_QUARTERS[int(q) % 4]
    return complex(np.exp(2j * np.pi * t / n))


@dataclass(frozen=True)
class LuFactors:
    """
    Packed LU factors with row permutation, ``A[perm] = L @ U``.

    ``L`` is unit lower triangular and stored below the diagonal of ``lu``.
    ``sign`` is the parity of ``perm`` and ``singular`` marks factorizations
    in which some pivot underflowed.
    """

    lu: np.ndarray
    perm: np.ndarray
    sign: np.ndarray
    singular: np.ndarray

    @property
    def dim(self) -> int:
        return self.lu.shape[-1]

    def lower(self) -> np.ndarray:
        d = self.dim
        return np.tril(self.lu, -1) + np.eye(d)

    def upper(self) -> np.ndarray:
        return np.triu(self.lu)


def _as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    return a


def lu_factor(a) -> LuFactors:
    """LU factorization with partial pivoting of one or many square matrices."""
    a = _as_square(a)
    batch = a.shape[:-2]
    d = a.shape[-1]
    nb = int(np.prod(batch, dtype=int))
    lu = a.reshape((nb, d, d)).copy()
    perm = np.tile(np.arange(d), (nb, 1))
    sign = np.ones(nb)
    scale = np.abs(lu).max(axis=(1, 2), initial=0.0) if d else np.zeros(nb)
    tol = SINGULAR_RTOL * scale
    singular = np.zeros(nb, dtype=bool)
    rows = np.arange(nb)
    for k in range(d):
        p = k + np.argmax(np.abs(lu[:, k:, k]), axis=1)
        swap = p != k
        if swap.any():
            idx = rows[swap]
            pk = p[swap]
            lu[idx, k], lu[idx, pk] = lu[idx, pk], lu[idx, k].copy()
            perm[idx, k], perm[idx, pk] = perm[idx, pk], perm[idx, k].copy()
            sign[swap] = -sign[swap]
        piv = lu[:, k, k]
        bad = ~(np.abs(piv) > tol)
        singular |= bad
        safe = np.where(bad, 1.0, piv)
        mult = np.where(bad[:, None], 0.0, lu[:, k + 1:, k] / safe[:, None])
        lu[:, k + 1:, k] = mult
        lu[:, k + 1:, k + 1:] -= mult[:, :, None] * lu[:, k, None, k + 1:]
    return LuFactors(
        lu=lu.reshape(a.shape),
        perm=perm.reshape(batch + (d,)),
        sign=sign.reshape(batch),
        singular=singular.reshape(batch),
    )


def det(a):
    """
    Determinant via LU. Singular matrices are not an error; their
    determinant comes out as (numerically) zero.
    """
    f = lu_factor(a)
    diag = np.diagonal(f.lu, axis1=-2, axis2=-1)
    out = f.sign * np.prod(diag, axis=-1)
    if np.ndim(out) == 0:
        return complex(out)
    return out


def _lu_solve(f: LuFactors, b: np.ndarray) -> np.ndarray:
    d = f.dim
    lu = f.lu
    x = np.take_along_axis(b, f.perm[..., :, None], axis=-2).copy()
    for i in range(d):
        if i:
            x[..., i, :] -= np.einsum("...k,...kj->...j", lu[..., i, :i], x[..., :i, :])
    for i in range(d - 1, -1, -1):
        if i < d - 1:
            x[..., i, :] -= np.einsum("...k,...kj->...j", lu[..., i, i + 1:], x[..., i + 1:, :])
        x[..., i, :] /= lu[..., i, i, None]
    return x


def solve(a, b, *, factors: LuFactors | None = None) -> np.ndarray:
    """
    Solve ``A X = B``. ``B`` may be a matrix or a vector (trailing dimension
    matching ``A``). Raises :class:`SingularMatrix` if any matrix of the
    stack is singular.
    """
    a = _as_square(a)
    f = factors if factors is not None else lu_factor(a)
    if np.any(f.singular):
        raise SingularMatrix("matrix is singular to working precision")
    b = np.asarray(b, dtype=complex)
    vector = b.ndim == a.ndim - 1
    if vector:
        b = b[..., None]
    b = np.broadcast_to(b, a.shape[:-2] + b.shape[-2:])
    x = _lu_solve(f, b)
    return x[..., 0] if vector else x


def inverse(a) -> np.ndarray:
    a = _as_square(a)
    eye = np.broadcast_to(np.eye(a.shape[-1], dtype=complex), a.shape)
    return solve(a, eye)
