import numpy as np
import pytest

from looptoda import numkit
from looptoda.errors import SingularMatrix


def rand_matrix(rng, d, *batch):
    shape = batch + (d, d)
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 7, 12])
def test_unity_power_periodic(n):
    for x in (0.0, 0.5, 1.3, -2.25, 7.0):
        assert abs(numkit.unity_power(n, x + n) - numkit.unity_power(n, x)) < 1e-14
        assert abs(numkit.unity_power(n, x) - np.exp(2j * np.pi * x / n)) < 1e-14


def test_unity_power_exact_quarters():
    assert numkit.unity_power(4, 1) == 1j
    assert numkit.unity_power(4, 2) == -1
    assert numkit.unity_power(8, -2) == -1j
    assert numkit.unity_power(3, 3) == 1
    assert numkit.unity_power(2, 0.5) == 1j


def test_unity_power_rejects_bad_order():
    with pytest.raises(ValueError):
        numkit.unity_power(0, 1)


def test_solve_identity_and_diagonal():
    rng = np.random.default_rng(0)
    b = rand_matrix(rng, 3)
    assert np.allclose(numkit.solve(np.eye(3), b), b, atol=0)
    x = numkit.solve(np.diag([2.0, 4.0]), np.eye(2))
    assert np.array_equal(x, np.diag([0.5, 0.25]))


def test_solve_random_residual():
    rng = np.random.default_rng(1)
    a = rand_matrix(rng, 6)
    b = rand_matrix(rng, 6)
    x = numkit.solve(a, b)
    assert np.abs(a @ x - b).sum(axis=1).max() < 1e-10


def test_solve_vector_rhs_and_batches():
    rng = np.random.default_rng(2)
    a = rand_matrix(rng, 4, 5, 3)
    b = rng.normal(size=(5, 3, 4)) + 0j
    x = numkit.solve(a, b)
    assert x.shape == (5, 3, 4)
    assert np.abs(np.einsum("...ij,...j->...i", a, x) - b).max() < 1e-10


@pytest.mark.parametrize("d", range(2, 9))
def test_det_multiplicative(d):
    rng = np.random.default_rng(d)
    a, b = rand_matrix(rng, d), rand_matrix(rng, d)
    lhs = numkit.det(a @ b)
    rhs = numkit.det(a) * numkit.det(b)
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)
    assert abs(numkit.det(a) - np.linalg.det(a)) <= 1e-10 * abs(np.linalg.det(a))


def test_inverse_roundtrip():
    rng = np.random.default_rng(3)
    for d in range(1, 9):
        a = rand_matrix(rng, d)
        assert np.abs(numkit.inverse(a) @ a - np.eye(d)).sum(axis=1).max() < 1e-10


def test_lu_reconstructs_permuted_matrix():
    rng = np.random.default_rng(4)
    a = rand_matrix(rng, 5)
    f = numkit.lu_factor(a)
    assert np.allclose(a[f.perm], f.lower() @ f.upper(), atol=1e-12)
    assert not f.singular


def test_singular_matrix():
    a = np.array([[1.0, 2.0], [2.0, 4.0]])
    assert numkit.lu_factor(a).singular
    assert abs(numkit.det(a)) < 1e-14
    with pytest.raises(SingularMatrix):
        numkit.solve(a, np.eye(2))


def test_singular_flag_is_per_matrix():
    a = np.stack([np.eye(2), np.zeros((2, 2))])
    f = numkit.lu_factor(a)
    assert list(f.singular) == [False, True]
    assert np.allclose(numkit.det(a), [1, 0])


def test_empty_matrix():
    assert numkit.det(np.zeros((0, 0))) == 1
    assert numkit.det(np.zeros((3, 0, 0))).shape == (3,)


def test_non_square_rejected():
    with pytest.raises(ValueError):
        numkit.det(np.zeros((2, 3)))
