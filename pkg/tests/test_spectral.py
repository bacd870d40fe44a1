import math

import numpy as np
import pytest
from scipy.linalg import expm

from actionbound import hamiltonian as H
from actionbound import spectral as S
from actionbound.errors import DegenerateGap
from actionbound.scenarios import rotating_z_path, rotating_z_projections

from conftest import X, Y, Z, random_hermitian


def test_decompose_clusters_and_gap():
    dec = S.spectral_decompose(np.diag([1.0, 1.0, 2.0, 3.5]))
    assert dec.m == 3
    assert list(dec.multiplicities) == [2, 1, 1]
    assert dec.eta == pytest.approx(1.0)
    assert np.allclose(dec.reconstruct(), np.diag([1.0, 1.0, 2.0, 3.5]))


def test_decompose_unitary_chord_gap():
    dec = S.spectral_decompose(expm(-0.5j * math.pi * Z), kind="unitary")
    assert dec.m == 2
    assert dec.eta == pytest.approx(2.0)


def test_decompose_degenerate_gap_raises():
    with pytest.raises(DegenerateGap):
        S.spectral_decompose(np.diag([0.0, 5e-9]), cluster_tol=1e-9)


def test_zeno_hamiltonian_trivial_cases():
    dec = S.spectral_decompose(Z)
    assert np.allclose(S.zeno_hamiltonian(X, dec), 0)
    assert np.allclose(S.zeno_hamiltonian(Z, dec), Z)


def test_zeno_hamiltonian_block_mask(rng):
    h1 = random_hermitian(rng, 4)
    dec = S.spectral_decompose(np.diag([1.0, 1.0, 2.0, 3.0]))
    mask = np.zeros((4, 4), bool)
    mask[:2, :2] = True
    mask[2, 2] = mask[3, 3] = True
    hz = S.zeno_hamiltonian(h1, dec)
    assert np.allclose(hz, np.where(mask, h1, 0))
    for p in dec.projections:
        assert np.linalg.norm(hz @ p - p @ hz) < 1e-9


def test_continuous_ergodic_full_period():
    em = S.continuous_ergodic_mean(S.spectral_decompose(Z), X, math.pi)
    assert np.allclose(em.mean, 0, atol=1e-15)
    assert em.bound == pytest.approx(2 * math.sqrt(2) / (2 * math.pi), rel=1e-12)


def test_continuous_ergodic_matches_quadrature(rng):
    h0 = random_hermitian(rng, 3)
    a = random_hermitian(rng, 3)
    t = 2.3
    s = np.linspace(0, t, 4001)
    vals = np.stack([expm(1j * x * h0) @ a @ expm(-1j * x * h0) for x in s])
    w = np.full(len(s), 2.0)
    w[1:-1:2] = 4.0
    w[0] = w[-1] = 1.0
    ref = np.tensordot(w, vals, axes=1) * (s[1] - s[0]) / 3 / t
    em = S.continuous_ergodic_mean(S.spectral_decompose(h0), a, t)
    assert np.allclose(em.mean, ref, atol=1e-10)


def test_discrete_ergodic_enumeration():
    u = expm(-0.5j * math.pi * Z)
    em = S.discrete_ergodic_mean(S.spectral_decompose(u, kind="unitary"), X, 4)
    direct = sum(np.linalg.matrix_power(u.conj().T, j) @ X @ np.linalg.matrix_power(u, j) for j in range(4)) / 4
    assert np.allclose(em.mean, direct, atol=1e-14)
    assert np.allclose(em.mean, 0, atol=1e-14)
    assert em.bound == pytest.approx(2 * math.sqrt(2) / 8)


def test_discrete_ergodic_n1_and_commuting():
    dec = S.spectral_decompose(expm(-0.3j * Z), kind="unitary")
    assert np.allclose(S.discrete_ergodic_mean(dec, X, 1).mean, X)
    assert np.allclose(S.discrete_ergodic_mean(dec, Z, 17).mean, Z)


def test_projected_sum_trivial():
    dec = S.spectral_decompose(np.diag([0.0, 1.0, 2.0]))
    a = np.arange(9).reshape(3, 3) + np.arange(9).reshape(3, 3).T
    value, bound = S.projected_sum_bound(dec, a, np.ones((3, 3)))
    assert value == pytest.approx(np.linalg.norm(a, 2))
    assert bound == pytest.approx(math.sqrt(3) * np.linalg.norm(a, 2))
    assert S.projected_sum_bound(dec, a, np.zeros((3, 3))) == (0.0, 0.0)


def test_adiabatic_connection_rotating_z():
    h0 = rotating_z_path(1.0)
    for t in (0.1, 0.5, 0.9):
        a = S.adiabatic_connection(h0, t, 1.0)
        assert np.allclose(a, 0.5 * math.pi * Y, atol=1e-5)
    ana = S.adiabatic_connection(h0, 0.5, 1.0, analytic=rotating_z_projections(1.0))
    fd = S.adiabatic_connection(h0, 0.5, 1.0)
    assert np.allclose(ana, fd, atol=1e-6)


def test_adiabatic_connection_is_block_off_diagonal():
    h0 = H.TermSum([(H.Envelope.constant(1.0), np.diag([0.0, 1.0, 3.0]).astype(complex)),
                    (H.Envelope.sine(0.3, 2.0), np.ones((3, 3), complex))])
    a = S.adiabatic_connection(h0, 0.4, 1.0)
    dec = S.spectral_decompose(h0(0.4))
    for p in dec.projections:
        assert np.linalg.norm(p @ a @ p) < 1e-6
    assert np.allclose(a, a.conj().T)


def test_gap_profile_rotating_z():
    gp = S.gap_profile(rotating_z_path(1.0), H.TimeWindow(1.0, 101))
    assert gp.m == 2
    assert gp.eta == pytest.approx(2.0)
    assert abs(gp.eta_prime) < 1e-8
