import math

import numpy as np
import pytest

from looptoda.errors import IndexOutOfRange, InvalidParameters
from looptoda.model import (ModelParams, c_minus, c_plus, cartan, kappa, kappa_squared,
                            theta_vector, twist_matrix)


def test_params_validation():
    for bad in (1, 0, -3, 2.5):
        with pytest.raises(InvalidParameters):
            ModelParams(bad)
    with pytest.raises(InvalidParameters):
        ModelParams(3, 0)
    assert ModelParams(3).m == 1


def test_wrap():
    p = ModelParams(4)
    assert [p.wrap(a) for a in (0, 1, 4, 5, -1)] == [4, 1, 4, 1, 3]


def test_cartan_small_orders():
    assert cartan(ModelParams(2)).tolist() == [[2, -2], [-2, 2]]
    assert cartan(ModelParams(3)).tolist() == [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]


@pytest.mark.parametrize("n", [2, 3, 4, 6, 9])
def test_cartan_row_sums_vanish(n):
    a = cartan(ModelParams(n))
    assert (a.sum(axis=1) == 0).all()
    assert (a == a.T).all()


@pytest.mark.parametrize("n", [2, 3, 5])
def test_shift_matrices(n):
    p = ModelParams(n, 0.7 - 0.2j)
    cm, cp = c_minus(p), c_plus(p)
    v = np.arange(1, n + 1) + 0j
    assert np.allclose(cm @ v, p.m * np.roll(v, 1))
    assert np.allclose(cp @ v, p.m * np.roll(v, -1))
    assert np.allclose(cm @ cp, cp @ cm)
    assert np.allclose(cm @ cp, p.m ** 2 * np.eye(n))


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_theta_eigenvectors(n):
    p = ModelParams(n)
    a = cartan(p)
    for rho in range(n):
        th = theta_vector(p, rho)
        assert np.allclose(a @ th, kappa_squared(p, rho) * th, atol=1e-13)
    for rho in range(1, n):
        assert math.isclose(kappa(p, rho) ** 2, kappa_squared(p, rho), rel_tol=1e-14)


def test_kappa_range():
    p = ModelParams(4)
    assert kappa(p, 2) == pytest.approx(2.0)
    for bad in (0, 4, -1, 1.5):
        with pytest.raises(IndexOutOfRange):
            kappa(p, bad)
    assert kappa_squared(p, -1) == pytest.approx(kappa_squared(p, 1))


@pytest.mark.parametrize("n", [2, 3, 4, 7])
def test_twist_conjugation(n):
    p = ModelParams(n)
    h = twist_matrix(p)
    hinv = twist_matrix(p, -1)
    assert np.allclose(h @ hinv, np.eye(n))
    assert np.allclose(np.linalg.matrix_power(h, n), np.eye(n))
    assert np.allclose(h @ c_minus(p) @ hinv, p.eps(-1) * c_minus(p))
    assert np.allclose(h @ c_plus(p) @ hinv, p.eps(1) * c_plus(p))
    x = np.arange(n * n).reshape(n, n) + 0j
    k, l = np.indices((n, n))
    for s in range(-2, 3):
        conj = twist_matrix(p, s) @ x @ twist_matrix(p, -s)
        assert np.allclose(conj, p.eps(1) ** (s * (l - k)) * x)
