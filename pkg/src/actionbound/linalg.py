"""Dense complex linear algebra for small Hermitian and unitary matrices.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``. The
helpers here validate shapes and the Hermitian or unitary property, and
provide the exponential and logarithm conventions used everywhere else:
``expm_hermitian(h, t)`` is ``exp(-i t h)`` and ``logm_unitary(u)`` returns
``k`` with ``exp(-i k) = u``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from .errors import BranchAmbiguity, DimMismatch, NotHermitian, NotUnitary

#: Alias used in signatures; any square complex ``ndarray``.
ComplexMatrix = np.ndarray

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-9

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(label: str) -> np.ndarray:
    """Tensor product of Pauli matrices, e.g. ``pauli("ZX")`` is Z ⊗ X."""
    if not label or any(c not in PAULI for c in label):
        raise ValueError(f"not a Pauli string: {label!r}")
    out = np.ones((1, 1), dtype=complex)
    for c in label:
        out = np.kron(out, PAULI[c])
    return out


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a square, finite ``complex128`` array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimMismatch(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(a, -1, -2))


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dagger(a))


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    """Check ``max|a - a^†| <= tol * max(1, max|a|)``."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    return bool(np.max(np.abs(m - m.conj().T)) <= tol * scale)


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    """Check ``max|u^† u - 1| <= tol``."""
    m = np.asarray(u, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= tol)


def require_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(a)
    if not is_hermitian(m, tol):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    return m


def require_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    m = as_matrix(u)
    if not is_unitary(m, tol):
        raise NotUnitary("matrix is not unitary within tolerance")
    return m


def spectral_norm(a) -> float:
    """Largest singular value (operator 2-norm)."""
    m = np.asarray(a, dtype=complex)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def spectral_norms(stack: np.ndarray, hermitian: bool = False) -> np.ndarray:
    """Spectral norms of a stack of matrices with shape ``(n, d, d)``.

    With ``hermitian=True`` the eigenvalues are used, which is faster. 2x2
    stacks use closed forms in both cases.
    """
    s = np.asarray(stack)
    if s.shape[0] == 0:
        return np.zeros(0)
    if hermitian:
        if s.shape[-1] == 2:
            a0 = 0.5 * (s[:, 0, 0].real + s[:, 1, 1].real)
            az = 0.5 * (s[:, 0, 0].real - s[:, 1, 1].real)
            r = np.sqrt(az * az + np.abs(s[:, 1, 0]) ** 2)
            return np.abs(a0) + r
        return np.max(np.abs(np.linalg.eigvalsh(s)), axis=-1)
    if s.shape[-1] == 2 and s.shape[-2] == 2:
        # largest singular value from the Frobenius norm and |det|
        fro2 = np.sum(np.abs(s) ** 2, axis=(-2, -1))
        det = np.abs(s[:, 0, 0] * s[:, 1, 1] - s[:, 0, 1] * s[:, 1, 0])
        disc = np.sqrt(np.maximum(fro2 * fro2 - 4 * det * det, 0.0))
        return np.sqrt(0.5 * (fro2 + disc))
    return np.linalg.norm(s, ord=2, axis=(-2, -1))


def hs_norm(a) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(np.asarray(a, dtype=complex)))


def herm_eig(h, tol: float = HERMITIAN_TOL):
    """Eigen-decomposition of a Hermitian matrix.

    Returns
    -------
    values : ndarray
        Real eigenvalues in ascending order.
    vectors : ndarray
        Unitary matrix whose columns are the matching eigenvectors.
    """
    m = require_hermitian(h, tol)
    return np.linalg.eigh(hermitian_part(m))


def expm_hermitian(h, t: float = 1.0) -> np.ndarray:
    """``exp(-i t h)`` for Hermitian ``h`` via its eigen-decomposition."""
    w, v = herm_eig(h)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def unitary_eig(u, tol: float = UNITARY_TOL):
    """Eigenphases and eigenvectors of a unitary, ``u = V diag(exp(-i phi)) V^†``.

    The complex Schur form of a normal matrix is diagonal, so the Schur
    vectors form an orthonormal eigenbasis even for degenerate spectra.
    Phases lie in ``(-pi, pi]``.
    """
    m = require_unitary(u, tol)
    tri, vecs = sla.schur(m, output="complex")
    phases = -np.angle(np.diag(tri))
    phases = np.where(phases <= -np.pi, phases + 2 * np.pi, phases)
    return phases, vecs


def logm_unitary(u, branch_tol: float = 1e-8) -> np.ndarray:
    """Principal generator ``k`` with ``exp(-i k) = u``.

    The eigenphases of ``k`` lie in ``(-pi, pi]``. An eigenphase within
    ``branch_tol`` of ``pi`` makes the branch ambiguous.

    Raises
    ------
    NotUnitary
        If ``u`` is not unitary.
    BranchAmbiguity
        If an eigenvalue of ``u`` is within ``branch_tol`` of ``-1``.
    """
    phases, vecs = unitary_eig(u)
    if np.any(np.pi - np.abs(phases) < branch_tol):
        raise BranchAmbiguity("an eigenvalue of the unitary is at -1; the logarithm branch is ambiguous")
    k = (vecs * phases) @ vecs.conj().T
    return hermitian_part(k)


def commutator(a, b) -> np.ndarray:
    """``[a, b] = ab - ba``; works on stacks with matching trailing shapes."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[-2:] != b.shape[-2:] or a.shape[-1] != a.shape[-2]:
        raise DimMismatch(f"cannot commute shapes {a.shape} and {b.shape}")
    return a @ b - b @ a
