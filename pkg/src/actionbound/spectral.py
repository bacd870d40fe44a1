"""Spectral projections, gaps, ergodic means and adiabatic transport.

Eigenvalues closer than ``cluster_tol`` are merged into one cluster; the
projection onto a cluster is the sum of its eigenvector projectors. For a
unitary ``U = sum_l exp(-i phi_l) P_l`` the gap is the smallest chord
``|exp(-i phi_k) - exp(-i phi_l)|``; for a Hermitian matrix it is the
smallest distance between distinct eigenvalues. A single cluster has an
infinite gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundViolation, DegenerateGap, LevelCrossing
from .hamiltonian import Sampler, TimeDepHamiltonian, TimeWindow
from .linalg import (
    as_matrix,
    dagger,
    herm_eig,
    require_hermitian,
    spectral_norm,
    spectral_norms,
    unitary_eig,
)

CLUSTER_TOL = 1e-8


@dataclass
class Decomposition:
    """Spectral decomposition ``A = sum_l lambda_l P_l`` into distinct clusters.

    Attributes
    ----------
    values : ndarray, shape (m,)
        Cluster eigenvalues (Hermitian) or eigenphases ``phi_l`` with
        eigenvalue ``exp(-i phi_l)`` (unitary).
    projections : ndarray, shape (m, d, d)
    multiplicities : ndarray of int
    eta : float
        Spectral gap; ``inf`` when ``m == 1``.
    kind : {"hermitian", "unitary"}
    """

    values: np.ndarray
    projections: np.ndarray
    multiplicities: np.ndarray
    eta: float
    kind: str

    @property
    def m(self) -> int:
        return len(self.values)

    @property
    def eigenvalues(self) -> np.ndarray:
        if self.kind == "unitary":
            return np.exp(-1j * self.values)
        return self.values.astype(complex)

    def reconstruct(self) -> np.ndarray:
        return np.tensordot(self.eigenvalues, self.projections, axes=(0, 0))


def _clusters(sorted_vals, tol, circular=False):
    """Group indices of sorted values whose neighbours are within ``tol``."""
    groups = [[0]]
    for i in range(1, len(sorted_vals)):
        if sorted_vals[i] - sorted_vals[i - 1] < tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    if circular and len(groups) > 1 and (sorted_vals[0] + 2 * np.pi - sorted_vals[-1]) < tol:
        groups[0] = groups[-1] + groups[0]
        groups.pop()
    return groups


def _circular_mean(phases):
    z = np.mean(np.exp(-1j * np.asarray(phases)))
    phi = -np.angle(z)
    return np.pi if phi <= -np.pi else phi


def spectral_decompose(a, kind: str = "hermitian", cluster_tol: float = CLUSTER_TOL) -> Decomposition:
    """Cluster the spectrum of a Hermitian or unitary matrix.

    Raises
    ------
    DegenerateGap
        If two neighbouring eigenvalues in different clusters are closer than
        ``10 * cluster_tol``, so the grouping is not robust.
    """
    if kind == "hermitian":
        w, v = herm_eig(a)
        groups = _clusters(w, cluster_tol)
        vals = np.array([np.mean(w[g]) for g in groups])
        for x, y in zip(groups[:-1], groups[1:]):
            if w[y[0]] - w[x[-1]] < 10 * cluster_tol:
                raise DegenerateGap("eigenvalue clusters are within 10*cluster_tol")
        eta = float(np.min(np.diff(vals))) if len(vals) > 1 else math.inf
    elif kind == "unitary":
        phases, v = unitary_eig(a)
        order = np.argsort(phases)
        phases, v = phases[order], v[:, order]
        groups = _clusters(phases, cluster_tol, circular=True)
        vals = np.array([_circular_mean(phases[g]) for g in groups])
        for x, y in zip(groups, groups[1:] + groups[:1]):
            if len(groups) == 1:
                break
            gap = (phases[y[0]] - phases[x[-1]]) % (2 * np.pi)
            if gap < 10 * cluster_tol:
                raise DegenerateGap("eigenphase clusters are within 10*cluster_tol")
        if len(vals) > 1:
            z = np.exp(-1j * vals)
            dist = np.abs(z[:, None] - z[None, :])
            eta = float(np.min(dist[~np.eye(len(z), dtype=bool)]))
        else:
            eta = math.inf
    else:
        raise ValueError("kind must be 'hermitian' or 'unitary'")
    projs = np.stack([v[:, g] @ dagger(v[:, g]) for g in groups])
    mults = np.array([len(g) for g in groups])
    return Decomposition(vals, projs, mults, eta, kind)


def block_diagonal_part(dec: Decomposition, a) -> np.ndarray:
    """``sum_l P_l A P_l``."""
    a = as_matrix(a)
    return np.einsum("lij,jk,lkm->im", dec.projections, a, dec.projections)


def zeno_hamiltonian(h1, dec: Decomposition) -> np.ndarray:
    """Zeno generator ``H_Z = sum_l P_l H_1 P_l``."""
    return block_diagonal_part(dec, require_hermitian(h1))


def projected_sum(dec: Decomposition, a, coeffs) -> np.ndarray:
    """``sum_{k,l} c_{kl} P_k A P_l``."""
    a = as_matrix(a)
    coeffs = np.asarray(coeffs)
    return np.einsum("kl,kij,jm,lmn->in", coeffs, dec.projections, a, dec.projections)


def projected_sum_bound(dec: Decomposition, a, coeffs) -> tuple[float, float]:
    """Norm of ``sum c_{kl} P_k A P_l`` and its bound ``sqrt(m) max|c| ||A||``.

    Raises
    ------
    BoundViolation
        If the norm exceeds the bound (it never should).
    """
    value = spectral_norm(projected_sum(dec, a, coeffs))
    bound = math.sqrt(dec.m) * float(np.max(np.abs(coeffs))) * spectral_norm(a)
    if value > bound * (1 + 1e-12) + 1e-14:
        raise BoundViolation(f"projected sum {value} exceeds {bound}")
    return value, bound


@dataclass
class ErgodicMean:
    """Finite-time ergodic mean, its infinite-time limit and the deviation bound."""

    mean: np.ndarray
    limit: np.ndarray
    deviation: float
    bound: float


def _phase_coeffs(diff, n=None, t=None):
    # continuous: (exp(i t d) - 1)/(i t d); discrete: (1/n)(1 - exp(i n d))/(1 - exp(i d))
    c = np.zeros(diff.shape, dtype=complex)
    zero = np.abs(diff) < 1e-300
    if t is not None:
        x = t * diff
        small = np.abs(x) < 1e-8
        c = np.where(small, 1.0 + 0.5j * x, (np.exp(1j * x) - 1) / np.where(small, 1.0, 1j * x))
        return np.where(zero, 1.0, c)
    den = 1 - np.exp(1j * diff)
    ok = np.abs(den) > 1e-14
    c = np.where(ok, (1 - np.exp(1j * n * diff)) / (n * np.where(ok, den, 1.0)), 1.0)
    return c


def continuous_ergodic_mean(h0dec: Decomposition, a, t: float) -> ErgodicMean:
    """``(1/t) int_0^t exp(i s H_0) A exp(-i s H_0) ds`` versus its block-diagonal limit.

    The deviation is at most ``2 sqrt(m) ||A|| / (eta t)``.
    """
    a = as_matrix(a)
    e = h0dec.values
    diff = e[:, None] - e[None, :]
    coeffs = _phase_coeffs(diff, t=float(t))
    mean = projected_sum(h0dec, a, coeffs)
    limit = block_diagonal_part(h0dec, a)
    dev = spectral_norm(mean - limit)
    bound = 0.0 if h0dec.m == 1 else 2 * math.sqrt(h0dec.m) * spectral_norm(a) / (h0dec.eta * t)
    if dev > bound + 1e-12 * max(1.0, spectral_norm(a)):
        raise BoundViolation(f"continuous ergodic deviation {dev} exceeds {bound}")
    return ErgodicMean(mean, limit, dev, bound)


def discrete_ergodic_mean(udec: Decomposition, a, n: int) -> ErgodicMean:
    """``(1/n) sum_{j<n} U^{†j} A U^j`` versus its block-diagonal limit.

    The deviation is at most ``2 sqrt(m) ||A|| / (eta n)``.
    """
    if udec.kind != "unitary":
        raise ValueError("discrete ergodic mean needs a unitary decomposition")
    a = as_matrix(a)
    phi = udec.values
    diff = phi[:, None] - phi[None, :]
    coeffs = _phase_coeffs(diff, n=int(n))
    np.fill_diagonal(coeffs, 1.0)
    mean = projected_sum(udec, a, coeffs)
    limit = block_diagonal_part(udec, a)
    dev = spectral_norm(mean - limit)
    bound = 0.0 if udec.m == 1 else 2 * math.sqrt(udec.m) * spectral_norm(a) / (udec.eta * n)
    if dev > bound + 1e-12 * max(1.0, spectral_norm(a)):
        raise BoundViolation(f"discrete ergodic deviation {dev} exceeds {bound}")
    return ErgodicMean(mean, limit, dev, bound)


# ---------------------------------------------------------------------------
# adiabatic transport


def _cluster_layout(w_row, tol):
    groups = _clusters(w_row, tol)
    return [len(g) for g in groups]


def path_projections(h0: TimeDepHamiltonian, ts, dec_tol: float = CLUSTER_TOL):
    """Cluster projections and eigenvalues of ``H_0(t)`` along a path.

    Returns ``(values, projections, layout)`` with shapes ``(n, m)``,
    ``(n, m, d, d)`` and the multiplicities.

    Raises
    ------
    LevelCrossing
        If the cluster layout changes along the path or two clusters come
        within ``10 * dec_tol``.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    hs = h0.eval_many(ts)
    w, v = np.linalg.eigh(0.5 * (hs + dagger(hs)))
    layout = _cluster_layout(w[0], dec_tol)
    bounds = np.concatenate([[0], np.cumsum(layout)])
    if len(layout) > 1:
        inner = np.stack([w[:, bounds[k]] - w[:, bounds[k] - 1] for k in range(1, len(layout))], axis=1)
        if np.any(inner < 10 * dec_tol):
            raise LevelCrossing("spectral clusters cross or touch along the path")
    for k, mlt in enumerate(layout):
        if mlt > 1:
            spread = w[:, bounds[k + 1] - 1] - w[:, bounds[k]]
            if np.any(spread >= dec_tol * mlt):
                raise LevelCrossing("a degenerate cluster splits along the path")
    vals = np.stack([w[:, bounds[k]:bounds[k + 1]].mean(axis=1) for k in range(len(layout))], axis=1)
    projs = np.stack([v[:, :, bounds[k]:bounds[k + 1]] @ dagger(v[:, :, bounds[k]:bounds[k + 1]])
                      for k in range(len(layout))], axis=1)
    return vals, projs, layout


def adiabatic_connection_many(h0: TimeDepHamiltonian, ts, horizon: float = 1.0, dec_tol: float = CLUSTER_TOL,
                              fd_step: float | None = None, analytic=None) -> np.ndarray:
    """``A(t) = sum_l (i/2) [dP_l/dt, P_l]`` at each time.

    Projection derivatives use central differences of step ``fd_step``
    (default ``1e-5 * horizon``), or a second-order forward difference
    where ``t - fd_step < 0``. ``analytic(ts)``, if given, must return
    ``(P, dP)`` stacks of shape ``(n, m, d, d)`` and replaces the differences.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if analytic is not None:
        p, dp = analytic(ts)
    else:
        hstep = 1e-5 * horizon if fd_step is None else float(fd_step)
        _, p, layout = path_projections(h0, ts, dec_tol)
        fwd = ts - hstep < 0
        tp = np.where(fwd, ts + hstep, ts + hstep)
        tm = np.where(fwd, ts + 2 * hstep, ts - hstep)
        _, pp, lp = path_projections(h0, tp, dec_tol)
        _, pm, lm = path_projections(h0, tm, dec_tol)
        if lp != layout or lm != layout:
            raise LevelCrossing("cluster layout differs between neighbouring times")
        overlap_p = np.einsum("nlij,nlji->nl", p, pp).real
        overlap_m = np.einsum("nlij,nlji->nl", p, pm).real
        need = np.asarray(layout)[None, :] - 0.5
        if np.any(overlap_p < need) or np.any(overlap_m < need):
            raise LevelCrossing("clusters reorder between neighbouring times; reduce fd_step")
        central = (pp - pm) / (2 * hstep)
        forward = (-3 * p + 4 * pp - pm) / (2 * hstep)
        dp = np.where(fwd[:, None, None, None], forward, central)
    comm = dp @ p - p @ dp
    a = 0.5j * comm.sum(axis=1)
    return 0.5 * (a + dagger(a))


def adiabatic_connection(h0: TimeDepHamiltonian, t: float, horizon: float = 1.0, dec_tol: float = CLUSTER_TOL,
                         fd_step: float | None = None, analytic=None) -> np.ndarray:
    """Connection ``A(t) = sum_l (i/2)[dP_l/dt, P_l]`` at one time.

    Raises
    ------
    LevelCrossing
        If clusters cannot be matched across the difference stencil.
    """
    return adiabatic_connection_many(h0, [t], horizon, dec_tol, fd_step, analytic)[0]


def connection_hamiltonian(h0: TimeDepHamiltonian, horizon: float, dec_tol: float = CLUSTER_TOL,
                           fd_step: float | None = None, analytic=None) -> Sampler:
    """The connection ``A`` as a time-dependent Hamiltonian."""
    return Sampler(lambda ts: adiabatic_connection_many(h0, ts, horizon, dec_tol, fd_step, analytic),
                   h0.dim, smoothness=max(h0.smoothness - 1, 0), vectorized=True, check=False)


def zeno_path(h0: TimeDepHamiltonian, g: TimeDepHamiltonian, dec_tol: float = CLUSTER_TOL) -> Sampler:
    """``G_Z(t) = sum_l P_l(t) G(t) P_l(t)`` as a time-dependent Hamiltonian."""

    def f(ts):
        _, p, _ = path_projections(h0, ts, dec_tol)
        gs = g.eval_many(ts)
        return np.einsum("nlij,njk,nlkm->nim", p, gs, p)

    return Sampler(f, h0.dim, smoothness=min(h0.smoothness, g.smoothness), vectorized=True, check=False)


def adiabatic_transporter(h0: TimeDepHamiltonian, window: TimeWindow, dec_tol: float = CLUSTER_TOL,
                          fd_step: float | None = None, tol: float = 1e-10, analytic=None):
    """``W(t) = T exp(-i int_0^t A)``, which carries ``P_l(0)`` to ``P_l(t)``."""
    from .propagator import evolve

    a = connection_hamiltonian(h0, float(window.t_end), dec_tol, fd_step, analytic)
    return evolve(a, window, method="cf_magnus4", tol=tol)


def dynamical_phase_generator(h0: TimeDepHamiltonian, w, t: float | None = None) -> np.ndarray:
    """``(1/t) int_0^t W^† H_0 W`` from a transporter sampled on a grid.

    ``w`` is an :class:`~actionbound.propagator.EvolutionResult`; the
    integral uses composite Simpson over its samples up to ``t`` (the last
    sample by default). The result equals ``sum_l Ebar_l(t) P_l(0)`` with
    ``Ebar_l`` the time-averaged eigenvalues.
    """
    from scipy.integrate import simpson

    times = np.asarray(w.times)
    t = float(times[-1]) if t is None else float(t)
    sel = times <= t * (1 + 1e-12)
    ts, us = times[sel], w.unitaries[sel]
    integrand = dagger(us) @ h0.eval_many(ts) @ us
    val = simpson(integrand, x=ts, axis=0)
    return 0.5 * (val + dagger(val)) / t


@dataclass
class GapProfile:
    """Gap data along a path: ``eta = min_t min_{k != l} |E_k - E_l|`` and
    ``eta_prime = max_t max_{k,l} |d(E_k - E_l)/dt|``."""

    eta: float
    eta_prime: float
    m: int
    grid_points: int


def gap_profile(h0: TimeDepHamiltonian, window: TimeWindow, dec_tol: float = CLUSTER_TOL,
                refine: int = 4) -> GapProfile:
    """Gap and gap-velocity on a ``refine``-times finer grid."""
    ts = window.refined(refine).grid
    vals, _, layout = path_projections(h0, ts, dec_tol)
    m = len(layout)
    if m == 1:
        return GapProfile(math.inf, 0.0, 1, len(ts))
    diffs = vals[:, :, None] - vals[:, None, :]
    iu = np.triu_indices(m, 1)
    gaps = np.abs(diffs[:, iu[0], iu[1]])
    rates = np.gradient(diffs[:, iu[0], iu[1]], ts, axis=0, edge_order=2)
    return GapProfile(float(gaps.min()), float(np.abs(rates).max()), m, len(ts))


def sup_over(f_many, window: TimeWindow, refine: int = 4) -> float:
    """Grid supremum of ``||F(t)||`` for a vectorized matrix function."""
    ts = window.refined(refine).grid
    return float(np.max(spectral_norms(f_many(ts))))
