import numpy as np
import pytest
from scipy.linalg import expm, logm

from actionbound import linalg
from actionbound.errors import BranchAmbiguity, NotHermitian, NotUnitary

from conftest import X, Y, Z, random_hermitian, random_unitary


def test_pauli_algebra():
    assert np.allclose(linalg.pauli("X") @ linalg.pauli("Y"), 1j * Z)
    assert linalg.pauli("ZZ").shape == (4, 4)
    assert np.allclose(linalg.pauli("XI"), np.kron(X, np.eye(2)))


def test_spectral_norm_matches_svd(rng):
    for d in (2, 3, 5):
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        assert linalg.spectral_norm(a) == pytest.approx(np.linalg.svd(a, compute_uv=False)[0], rel=1e-12)


def test_spectral_norms_stack_closed_form_2x2(rng):
    stack = rng.normal(size=(50, 2, 2)) + 1j * rng.normal(size=(50, 2, 2))
    ref = np.linalg.svd(stack, compute_uv=False)[:, 0]
    assert np.allclose(linalg.spectral_norms(stack), ref, rtol=1e-10)


def test_spectral_norms_hermitian_flag(rng):
    stack = np.stack([random_hermitian(rng, 4) for _ in range(10)])
    ref = np.abs(np.linalg.eigvalsh(stack)).max(axis=1)
    assert np.allclose(linalg.spectral_norms(stack, hermitian=True), ref)


def test_hs_norm():
    assert linalg.hs_norm(X) == pytest.approx(np.sqrt(2))


def test_expm_hermitian_matches_scipy(rng):
    h = random_hermitian(rng, 4)
    assert np.allclose(linalg.expm_hermitian(h, 0.7), expm(-0.7j * h), atol=1e-12)


def test_logm_unitary_principal_branch(rng):
    h = random_hermitian(rng, 3, 0.5)
    u = expm(-1j * h)
    k = linalg.logm_unitary(u)
    assert np.allclose(expm(-1j * k), u, atol=1e-10)
    assert np.allclose(k, 1j * logm(u), atol=1e-8)


def test_logm_unitary_branch_cut_raises():
    with pytest.raises(BranchAmbiguity):
        linalg.logm_unitary(-np.eye(2, dtype=complex))


def test_require_checks(rng):
    with pytest.raises(NotHermitian):
        linalg.require_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NotUnitary):
        linalg.require_unitary(2 * np.eye(2))
    assert linalg.is_unitary(random_unitary(rng, 3))


def test_commutator():
    assert np.allclose(linalg.commutator(X, Y), 2j * Z)
