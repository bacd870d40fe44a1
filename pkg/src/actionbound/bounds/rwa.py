"""Rotating-wave approximation bounds.

The driven qubit ``H = (w0/2) Z + g(t) cos(w t) X`` and its rotating-wave
partner are both integrated in the frame rotating with ``(w/2) Z``. That
frame change is exact and identical for both evolutions, so the distance
between them is unchanged while the integrands lose their large static part.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import MViolated, SmoothnessUnavailable
from ..hamiltonian import (
    Constant,
    Envelope,
    PiecewiseConstant,
    Sampler,
    TermSum,
    TimeDepHamiltonian,
    TimeWindow,
    average_hamiltonian,
    cumulative_action,
    lp_norm,
    norms_at,
)
from ..linalg import PAULI, dagger, require_hermitian, spectral_norm
from ..propagator import constant_evolution, evolve, sup_distance
from ..spectral import block_diagonal_part, spectral_decompose
from ._common import as_hamiltonian, sup_norm_of_stack
from .report import BoundReport

X, Y, Z = PAULI["X"], PAULI["Y"], PAULI["Z"]


def qubit_rotating_frame(delta: float, omega: float, envelope) -> TermSum:
    """``(delta/2) Z + (g(t)/2)[(1 + cos 2wt) X - sin(2wt) Y]``, the driven qubit seen
    from the frame rotating with ``(w/2) Z``."""
    g = envelope if isinstance(envelope, Envelope) else Envelope.constant(float(envelope))
    half = g * 0.5
    return TermSum([
        (Envelope.constant(0.5 * delta), Z),
        (half, X),
        (half * Envelope.cosine(1.0, 2 * omega), X),
        (half * Envelope.sine(-1.0, 2 * omega), Y),
    ])


def qubit_lab_hamiltonian(omega0: float, omega: float, envelope) -> TermSum:
    """``(w0/2) Z + g(t) cos(w t) X``."""
    g = envelope if isinstance(envelope, Envelope) else Envelope.constant(float(envelope))
    return TermSum([(Envelope.constant(0.5 * omega0), Z), (g * Envelope.cosine(1.0, omega), X)])


def qubit_rwa_lab_hamiltonian(omega0: float, omega: float, envelope) -> TermSum:
    """``(w0/2) Z + (g(t)/2)[cos(w t) X + sin(w t) Y]``."""
    g = envelope if isinstance(envelope, Envelope) else Envelope.constant(float(envelope))
    return TermSum([(Envelope.constant(0.5 * omega0), Z),
                    (g * Envelope.cosine(0.5, omega), X), (g * Envelope.sine(0.5, omega), Y)])


def rwa_qubit_value(omega0: float, omega: float, g: float, t_end: float) -> float:
    """``(|g|/2w)(1 + sqrt(delta^2 + 4 g^2) T)``."""
    delta = omega0 - omega
    return abs(g) / (2 * omega) * (1 + math.sqrt(delta**2 + 4 * g**2) * t_end)


def rwa_qubit_bound(omega0: float, omega: float, g: float, t_end: float, grid_points: int = 2001,
                    tol: float = 1e-9) -> BoundReport:
    """Constant-amplitude qubit RWA: ``||U - U_RWA||_{inf,T} <= (|g|/2w)(1 + sqrt(delta^2+4g^2) T)``.

    ``U_RWA(t) = exp(-i w t Z/2) exp(-i t (delta Z + g X)/2)``.
    """
    delta = omega0 - omega
    window = TimeWindow(t_end, grid_points)
    hhat = qubit_rotating_frame(delta, omega, g)
    hbar = 0.5 * delta * Z + 0.5 * g * X
    u = evolve(hhat, window, tol=tol, max_step=0.25 / omega)
    dist = sup_distance(u, constant_evolution(hbar, window.grid))
    ts = window.refined(4).grid
    shat = np.abs(g) / (2 * omega) * np.abs(np.sin(omega * ts))
    return BoundReport(
        "rwa_qubit", rwa_qubit_value(omega0, omega, g, t_end), dist.value,
        params={"omega0": omega0, "omega": omega, "g": g, "T": t_end, "delta": delta},
        grid_info={"grid_points": grid_points, "method": u.method, "steps": u.info.get("steps")},
        est_error=dist.est_error,
        extra={"rotated_action_sup": float(shat.max()), "sup_time": dist.time},
    )


def rwa_general_bound(h0, h1: TimeDepHamiltonian, kappa: float, t_end: float, M: float | None = None,
                      hbar=None, averaging_period: float | None = None, grid_points: int = 1001,
                      tol: float = 1e-9) -> BoundReport:
    """RWA for ``H(t) = kappa H_0 + H_1(kappa t)``: distance to ``exp(-i kappa t H_0) exp(-i t Hbar)``.

    Bound ``(1 + 2 M T) ||Shat_kappa||_{inf,T}`` with
    ``Shat_kappa(t) = (1/kappa) int_0^{kappa t} [exp(isH_0) H_1(s) exp(-isH_0) - Hbar] ds``.

    Parameters
    ----------
    h0 : matrix
        Constant fast generator.
    h1 : TimeDepHamiltonian
        Drive as a function of the fast time ``s = kappa t``.
    M : float, optional
        Declared uniform bound on ``||H_1||`` (and ``||Hbar||``); checked on a
        grid. Defaults to the sampled supremum.
    hbar : matrix, optional
        Long-time average of the rotated drive. Otherwise it is the exact
        one-period average when ``averaging_period`` is given, the Zeno part
        for a constant drive, or the average over ``[0, kappa T]``.

    Raises
    ------
    MViolated
        If the sampled ``||H_1||`` exceeds ``M``.
    """
    h0m = require_hermitian(h0)
    h1 = as_hamiltonian(h1)
    fast_end = kappa * t_end
    w0, v0 = np.linalg.eigh(h0m)

    def rotated(s):
        u = (v0[None] * np.exp(-1j * np.outer(s, w0))[:, None, :]) @ dagger(v0)[None]
        return dagger(u) @ h1.eval_many(s) @ u

    rot = Sampler(rotated, h1.dim, smoothness=h1.smoothness, vectorized=True, check=False)
    if hbar is not None:
        hbar_m, how = require_hermitian(hbar), "declared"
    elif averaging_period is not None:
        hbar_m, how = average_hamiltonian(rot, averaging_period), "period"
    elif isinstance(h1, Constant):
        hbar_m, how = block_diagonal_part(spectral_decompose(h0m), h1.matrix), "zeno"
    else:
        hbar_m, how = average_hamiltonian(rot, fast_end), "horizon"
    probe = np.linspace(0.0, fast_end, max(4097, int(64 * fast_end) + 1))
    sampled = float(np.max(norms_at(h1, probe)))
    if M is None:
        M = max(sampled, spectral_norm(hbar_m))
    elif sampled > M * (1 + 1e-12) + 1e-15:
        raise MViolated(f"sampled ||H_1|| = {sampled} exceeds declared M = {M}")
    slow_grid = TimeWindow(t_end, grid_points).refined(4).grid
    hb = Constant(hbar_m)
    s_path, s_err = cumulative_action(lambda s: rot.eval_many(s) - hbar_m, kappa * slow_grid)
    s_sup = sup_norm_of_stack(s_path) / kappa
    bound = (1 + 2 * M * t_end) * s_sup
    # distance in the frame of kappa H0: U_hat(t) vs exp(-i t Hbar)
    window = TimeWindow(t_end, grid_points)
    u = evolve(rot.time_scaled(kappa), window, tol=tol)
    dist = sup_distance(u, constant_evolution(hb.matrix, window.grid))
    return BoundReport(
        "rwa_general", bound, dist.value,
        params={"kappa": kappa, "T": t_end, "M": M, "hbar_source": how},
        grid_info={"grid_points": grid_points, "method": u.method, "steps": u.info.get("steps")},
        est_error=dist.est_error + (1 + 2 * M * t_end) * s_err / kappa,
        extra={"rotated_action_sup": s_sup, "hbar": hbar_m, "sampled_sup_h1": sampled},
    )


def _envelope_sup(f, t_end, points=8193):
    ts = np.linspace(0.0, t_end, points)
    v = np.abs(np.asarray(f(ts), dtype=float))
    k = int(np.argmax(v))
    local = np.linspace(ts[max(k - 1, 0)], ts[min(k + 1, points - 1)], 65)
    return float(max(v[k], np.max(np.abs(f(local)))))


def smooth_envelope_value(envelope: Envelope, omega0: float, omega: float, t_end: float, order: int = 2):
    """Bound for a ``C^n`` envelope; returns ``(value, quadrature_error, parts)``.

    ``[sum_{k=1}^n (2w)^-k ||g^(k-1)||_inf + (1/2)(2w)^-n ||g^(n)||_1] (1 + sqrt(delta^2 + 4||g||_inf^2) T)``
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    if order > envelope.smoothness:
        raise SmoothnessUnavailable(f"envelope is C^{envelope.smoothness}, order {order} requested")
    delta = omega0 - omega
    sups = [_envelope_sup(envelope.derivative(k), t_end) for k in range(order)]
    dn = envelope.derivative(order)
    l1_dn, l1_info = lp_norm(TermSum([(Envelope(dn, smoothness=0), Z)]), t_end, 1.0, full_output=True)
    series = sum(sups[k - 1] / (2 * omega) ** k for k in range(1, order + 1))
    rem = 0.5 * l1_dn / (2 * omega) ** order
    gmax = sups[0]
    growth = 1 + math.sqrt(delta**2 + 4 * gmax**2) * t_end
    parts = {"series": series, "remainder": rem, "growth": growth, "g_sup": gmax}
    return (series + rem) * growth, 0.5 * l1_info["error"] / (2 * omega) ** order * growth, parts


def piecewise_envelope_value(values, omega0: float, omega: float, t_end: float) -> float:
    """``(1/2w)(max|g_j| + (1/2) sum|g_{j+1} - g_j|)(1 + sqrt(delta^2 + 4 max g_j^2) T)``."""
    v = np.asarray(values, dtype=float)
    delta = omega0 - omega
    gmax = float(np.max(np.abs(v)))
    jumps = float(np.sum(np.abs(np.diff(v))))
    return (gmax + 0.5 * jumps) / (2 * omega) * (1 + math.sqrt(delta**2 + 4 * gmax**2) * t_end)


def rwa_envelope_bound(omega0: float, omega: float, envelope: Envelope, t_end: float, order: int | None = None,
                       grid_points: int = 2001, tol: float = 1e-9) -> BoundReport:
    """RWA with a slowly varying envelope ``g(t)``: ``H = (w0/2)Z + g(t) cos(wt) X``.

    The approximation evolves with ``(w/2) Z`` followed by ``Hbar(t) = (delta/2) Z + (g(t)/2) X``.
    A step envelope (from :meth:`Envelope.steps`) uses the piecewise-constant
    bound; any other envelope uses the smooth bound of order ``order``
    (default 2).

    Raises
    ------
    SmoothnessUnavailable
        If the envelope is not ``order`` times differentiable.
    """
    delta = omega0 - omega
    piecewise = hasattr(envelope, "step_values")
    q_err = 0.0
    if piecewise:
        values = envelope.step_values
        bound = piecewise_envelope_value(values, omega0, omega, t_end)
        hbar = PiecewiseConstant(envelope.step_times,
                                 [0.5 * delta * Z + 0.5 * gj * X for gj in values])
        name, parts = "rwa_envelope_piecewise", {"levels": list(map(float, values))}
    else:
        order = 2 if order is None else int(order)
        bound, q_err, parts = smooth_envelope_value(envelope, omega0, omega, t_end, order)
        hbar = TermSum([(Envelope.constant(0.5 * delta), Z), (envelope * 0.5, X)])
        name = "rwa_envelope_smooth"
    window = TimeWindow(t_end, grid_points)
    hhat = qubit_rotating_frame(delta, omega, envelope)
    u = evolve(hhat, window, tol=tol, max_step=0.25 / omega)
    v = evolve(hbar, window, tol=tol)
    dist = sup_distance(u, v)
    return BoundReport(
        name, bound, dist.value,
        params={"omega0": omega0, "omega": omega, "T": t_end, "order": order, "delta": delta},
        grid_info={"grid_points": grid_points, "methods": [u.method, v.method], "steps": u.info.get("steps")},
        est_error=dist.est_error + q_err,
        extra=parts | {"sup_time": dist.time},
    )


def rwa_two_timescale_bound(frame: TimeDepHamiltonian, drive, hbar: TimeDepHamiltonian, kappa: float,
                            t_end: float, M: float | None = None, grid_points: int = 1001,
                            tol: float = 1e-9) -> BoundReport:
    """RWA for ``H(t) = kappa H_0(kappa t) + H_1(t, kappa t)`` with a slow and a fast time.

    The approximation is ``W(kappa t) T exp(-i int_0^t Hbar)`` with
    ``W(s) = T exp(-i int_0^s H_0)``. In the frame of ``W`` the drive is
    ``Htilde(t) = W(kappa t)^dag H_1(t, kappa t) W(kappa t)`` and the bound is
    ``(1 + 2 M T) ||int_0^t (Htilde - Hbar)||_{inf,T}``.

    Parameters
    ----------
    frame : TimeDepHamiltonian
        ``H_0`` as a function of the fast time.
    drive : callable
        Vectorized ``(t, s) -> H_1(t, s)`` returning a stack of matrices.
    hbar : TimeDepHamiltonian
        Fast-time average of the rotated drive, as a function of ``t``.
    M : float, optional
        Declared bound on ``||H_1||`` and ``||Hbar||``; defaults to the sampled supremum.

    Raises
    ------
    MViolated
        If the sampled norms exceed ``M``.
    """
    from ..propagator import FramePropagator

    hbar = as_hamiltonian(hbar)
    w = FramePropagator(frame, tol=tol * 1e-2)

    def rotated(ts):
        ts = np.asarray(ts, dtype=float)
        u = w.at(kappa * ts)
        return dagger(u) @ drive(ts, kappa * ts) @ u

    rot = Sampler(rotated, frame.dim, smoothness=min(frame.smoothness, hbar.smoothness), vectorized=True,
                  check=False)
    window = TimeWindow(t_end, grid_points)
    probe = window.refined(4).grid
    sampled = max(sup_norm_of_stack(drive(probe, kappa * probe)), sup_norm_of_stack(hbar.eval_many(probe)))
    if M is None:
        M = sampled
    elif sampled > M * (1 + 1e-12) + 1e-15:
        raise MViolated(f"sampled norm {sampled} exceeds declared M = {M}")
    s_path, s_err = cumulative_action(lambda ts: rot.eval_many(ts) - hbar.eval_many(ts), probe,
                                      hbar.breakpoints(t_end))
    s_sup = sup_norm_of_stack(s_path)
    factor = 1 + 2 * M * t_end
    u = evolve(rot, window, tol=tol, max_step=0.25 / kappa)
    v = evolve(hbar, window, tol=tol)
    dist = sup_distance(u, v)
    return BoundReport(
        "rwa_two_timescale", factor * s_sup, dist.value,
        params={"kappa": kappa, "T": t_end, "M": M},
        grid_info={"grid_points": grid_points, "methods": [u.method, v.method], "steps": u.info.get("steps")},
        est_error=dist.est_error + factor * s_err,
        extra={"rotated_action_sup": s_sup, "sup_time": dist.time},
    )
