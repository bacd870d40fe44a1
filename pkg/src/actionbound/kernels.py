"""Backend selection for the ordered-exponential kernels.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``ACTIONBOUND_PURE_PYTHON`` is set to a non-empty value,
the NumPy twin is used. ``BACKEND`` names the active one.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

if os.environ.get("ACTIONBOUND_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "compiled"


def backend_module(name: str | None = None):
    """Return the kernel module for ``"compiled"``, ``"python"`` or the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")


def expm_stack(g: np.ndarray, impl=None) -> np.ndarray:
    """``exp(-i g_k)`` for a stack of Hermitian matrices of shape ``(n, d, d)``."""
    impl = impl or _impl
    g = np.ascontiguousarray(g, dtype=np.complex128)
    if g.shape[0] == 0:
        return g.copy()
    if g.shape[-1] == 2:
        return impl.expm_su2(g)
    w, v = np.linalg.eigh(0.5 * (g + np.conj(np.swapaxes(g, -1, -2))))
    return (v * np.exp(-1j * w)[:, None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def ordered_product(g: np.ndarray, stops, u0: np.ndarray | None = None, impl=None) -> np.ndarray:
    """Running products of ``exp(-i g_k)``, later factors on the left.

    Parameters
    ----------
    g : ndarray, shape (n, d, d)
        Hermitian generators, each already multiplied by its time step.
    stops : sequence of int
        Non-decreasing counts ``s``; the product of the first ``s`` factors
        applied to ``u0`` is recorded for each.
    u0 : ndarray, optional
        Initial unitary, identity by default.

    Returns
    -------
    ndarray, shape (len(stops), d, d)
    """
    impl = impl or _impl
    g = np.ascontiguousarray(g, dtype=np.complex128)
    d = g.shape[-1]
    u0 = np.eye(d, dtype=np.complex128) if u0 is None else np.ascontiguousarray(u0, dtype=np.complex128)
    stops = np.ascontiguousarray(stops, dtype=np.intp)
    if d == 2:
        return impl.chain_su2(g, stops, u0)
    return impl.chain(expm_stack(g, impl), stops, u0)


def chain_unitaries(e: np.ndarray, stops, u0: np.ndarray | None = None, impl=None) -> np.ndarray:
    """Running products of given unitaries ``e_k``, later factors on the left."""
    impl = impl or _impl
    e = np.ascontiguousarray(e, dtype=np.complex128)
    d = e.shape[-1]
    u0 = np.eye(d, dtype=np.complex128) if u0 is None else np.ascontiguousarray(u0, dtype=np.complex128)
    return impl.chain(e, np.ascontiguousarray(stops, dtype=np.intp), u0)
