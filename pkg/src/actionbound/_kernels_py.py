"""NumPy implementation of the ordered-exponential kernels.

Same functions and signatures as the compiled ``_kernels`` module. Products
are formed with batched matrix multiplication: each segment between two
recorded stops is reduced pairwise, then the segment products are combined
with a log-depth prefix scan.
"""

import numpy as np


def expm_su2(g):
    """``exp(-i g_k)`` for a stack of Hermitian 2x2 matrices."""
    g = np.asarray(g)
    a0 = 0.5 * (g[:, 0, 0].real + g[:, 1, 1].real)
    az = 0.5 * (g[:, 0, 0].real - g[:, 1, 1].real)
    ax = g[:, 1, 0].real
    ay = g[:, 1, 0].imag
    r = np.sqrt(ax * ax + ay * ay + az * az)
    c = np.cos(r)
    safe = np.where(r > 0, r, 1.0)
    s = np.where(r > 0, np.sin(r) / safe, 1.0)
    ph = np.exp(-1j * a0)
    mi = -1j * s
    out = np.empty(g.shape, dtype=np.complex128)
    out[:, 0, 0] = ph * (c + mi * az)
    out[:, 1, 1] = ph * (c - mi * az)
    out[:, 0, 1] = ph * mi * (ax - 1j * ay)
    out[:, 1, 0] = ph * mi * (ax + 1j * ay)
    return out


def _reduce(block):
    # block: (m, L, d, d); returns block[:, L-1] @ ... @ block[:, 0]
    eye = np.eye(block.shape[-1], dtype=np.complex128)
    while block.shape[1] > 1:
        if block.shape[1] % 2:
            pad = np.broadcast_to(eye, (block.shape[0], 1) + eye.shape)
            block = np.concatenate([block, pad], axis=1)
        block = block[:, 1::2] @ block[:, 0::2]
    return block[:, 0]


def _segment_products(e, bounds):
    lengths = np.diff(bounds)
    d = e.shape[-1]
    out = np.empty((len(lengths), d, d), dtype=np.complex128)
    out[:] = np.eye(d)
    for length in np.unique(lengths):
        if length == 0:
            continue
        idx = np.nonzero(lengths == length)[0]
        rows = bounds[idx][:, None] + np.arange(length)[None, :]
        out[idx] = _reduce(e[rows])
    return out


def _prefix(seg):
    # seg[k] <- seg[k] @ seg[k-1] @ ... @ seg[0]
    p = seg.copy()
    off = 1
    while off < len(p):
        p[off:] = p[off:] @ p[:-off].copy()
        off *= 2
    return p


def chain(e, stops, u0):
    """Running products ``e[s-1] ... e[0] u0`` recorded at each ``s`` in ``stops``."""
    e = np.asarray(e, dtype=np.complex128)
    stops = np.asarray(stops, dtype=np.intp)
    bounds = np.concatenate([[0], stops])
    seg = _segment_products(e, bounds)
    return _prefix(seg) @ np.asarray(u0, dtype=np.complex128)


def chain_su2(g, stops, u0):
    """``chain(expm_su2(g), stops, u0)``."""
    return chain(expm_su2(g), stops, u0)
