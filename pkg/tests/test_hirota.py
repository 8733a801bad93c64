import itertools
from dataclasses import replace

import numpy as np
import pytest

from looptoda import hirota
from looptoda.errors import (AtSolutionPole, IndexOutOfRange, InvalidParameters,
                             ResonantPair, TooManySolitons)
from looptoda.hirota import SolitonParams
from looptoda.model import ModelParams
from looptoda.numkit import unity_power

import _draws


def brute_tau(p, alpha, zm, zp):
    # plain subset sum, no Gray code and no shared products
    total = 0j
    for k in range(p.r + 1):
        for sub in itertools.combinations(range(p.r), k):
            term = 1 + 0j
            for i in sub:
                term *= hirota.exp_E(p, alpha, i, zm, zp)
            for i, j in itertools.combinations(sub, 2):
                term *= hirota.eta_pair(p, i, j)
            total += term
    return total


def test_trivial_solution():
    p = SolitonParams(ModelParams(3))
    assert hirota.tau(p, 1, 0.3, -0.2) == 1
    assert hirota.gamma_hirota(p, 2, 0.0, 0.0) == 1
    assert hirota.delta_field(p, 0, 0.5, 0.4) == pytest.approx(np.exp(-0.2))
    assert hirota.delta_field(p, 0, 0.0, 0.0) == 1


@pytest.mark.parametrize("n,r", [(2, 3), (3, 4), (4, 5), (6, 3)])
def test_tau_matches_brute_force(n, r):
    rng = np.random.default_rng(10 * n + r)
    p = _draws.soliton_params(rng, n, r)
    for alpha in range(n):
        zm, zp = rng.uniform(-1, 1, 2)
        got = hirota.tau(p, alpha, zm, zp)
        want = brute_tau(p, alpha, zm, zp)
        assert abs(got - want) <= 1e-12 * max(1, abs(want))


def test_tau_vectorized_and_periodic():
    rng = np.random.default_rng(5)
    p = _draws.soliton_params(rng, 4, 3)
    zm = rng.uniform(-1, 1, (3, 4))
    zp = rng.uniform(-1, 1, (3, 4))
    for a in range(4):
        t = hirota.tau(p, a, zm, zp)
        assert t.shape == (3, 4)
        assert np.array_equal(t, hirota.tau(p, a + 4, zm, zp))
        assert t[1, 2] == pytest.approx(hirota.tau(p, a, zm[1, 2], zp[1, 2]), rel=1e-14)


def test_exp_E_one_soliton():
    p = SolitonParams(ModelParams(3), (1,), (1.0,), (0.0,))
    k = np.sqrt(3)
    assert hirota.exp_E(p, 0, 0, 0.1, 0.2) == pytest.approx(unity_power(3, 1) * np.exp(k * 0.3))


def test_eta_symmetric_and_known_value():
    p = SolitonParams(ModelParams(4), (1, 2), (1.0, 2.0), (0, 0))
    assert hirota.eta_pair(p, 0, 1) == hirota.eta_pair(p, 1, 0)
    s = 2.5
    want = (s - 2 * np.cos(-np.pi / 4)) / (s - 2 * np.cos(3 * np.pi / 4))
    assert hirota.eta_pair(p, 0, 1) == pytest.approx(want)


def test_validation():
    m = ModelParams(3)
    with pytest.raises(IndexOutOfRange):
        SolitonParams(m, (3,), (1.0,), (0,))
    with pytest.raises(IndexOutOfRange):
        SolitonParams(m, (0,), (1.0,), (0,))
    with pytest.raises(InvalidParameters):
        SolitonParams(m, (1,), (0.0,), (0,))
    with pytest.raises(InvalidParameters):
        SolitonParams(m, (1, 2), (1.0,), (0, 0))
    with pytest.raises(TooManySolitons):
        SolitonParams(m, (1,) * 3, (1, 2, 3), (0,) * 3, cap=2)
    # zeta ratio on the unit circle at the resonant angle
    w = np.exp(2j * np.pi / 3)
    with pytest.raises(ResonantPair):
        SolitonParams(m, (1, 1), (1.0, w), (0, 0))
    with pytest.raises(IndexOutOfRange):
        hirota.exp_E(SolitonParams(m, (1,), (1.0,), (0,)), 0, 1, 0, 0)


def test_drop_soliton_matches_smaller_tau():
    rng = np.random.default_rng(8)
    p = _draws.soliton_params(rng, 3, 3)
    q = hirota.drop_soliton(p, 1)
    ref = SolitonParams(p.model, (p.rho[0], p.rho[2]), (p.zeta[0], p.zeta[2]),
                        (p.delta[0], p.delta[2]))
    zm, zp = rng.uniform(-1, 1, (2, 5))
    for a in range(3):
        assert np.array_equal(hirota.tau(q, a, zm, zp), hirota.tau(ref, a, zm, zp))
    # a very negative phase approaches the same limit
    far = replace(p, delta=(p.delta[0], -60.0, p.delta[2]))
    assert np.allclose(hirota.tau(far, 1, zm, zp), hirota.tau(ref, 1, zm, zp), rtol=1e-14)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_one_soliton_closed_form(n):
    rng = np.random.default_rng(n)
    zm, zp = rng.uniform(-1, 1, (2, 30))
    for rho in range(1, n):
        zeta, delta = 0.8 * np.exp(0.3j), 0.2 + 0.7j
        p = SolitonParams(ModelParams(n), (rho,), (zeta,), (delta,))
        for a in range(1, n + 1):
            got = hirota.gamma_hirota(p, a, zm, zp)
            want = hirota.one_soliton_gamma(p.model, rho, zeta, delta, a, zm, zp)
            assert np.allclose(got, want, rtol=1e-12)


def test_gamma_product_and_period():
    rng = np.random.default_rng(9)
    p = _draws.soliton_params(rng, 4, 3)
    zm, zp = rng.uniform(-1, 1, (2, 40))
    prod = np.ones(40, complex)
    for a in range(1, 5):
        g = hirota.gamma_hirota(p, a, zm, zp)
        assert np.array_equal(g, hirota.gamma_hirota(p, a + 4, zm, zp))
        prod *= g
    assert np.abs(prod - 1).max() < 1e-10


def test_pole_handling():
    # n = 2, rho = 1, zeta = 1: tau_0 = 1 - exp(2 (zm + zp)) vanishes on zm = -zp
    p = SolitonParams(ModelParams(2), (1,), (1.0,), (0.0,))
    with pytest.raises(AtSolutionPole):
        hirota.gamma_hirota(p, 1, 0.25, -0.25)
    g = hirota.gamma_hirota(p, 1, np.array([0.25, 0.3]), np.array([-0.25, 0.0]), strict=False)
    assert np.isnan(g[0]) and np.isfinite(g[1])
    assert np.isnan(hirota.gamma_field(p)(1, 0.5, -0.5))


def test_kappa_factor_scales_dispersion():
    p = SolitonParams(ModelParams(3), (1,), (1.0,), (0,), kappa_factor=1.01)
    assert p.kappa(0) == pytest.approx(1.01 * np.sqrt(3))
