"""Action-based bounds for general, rotating-frame and periodic Hamiltonians."""

from __future__ import annotations

import math

import numpy as np

from ..errors import Inconclusive
from ..hamiltonian import (
    Constant,
    TimeDepHamiltonian,
    TimeWindow,
    action_path,
    average_hamiltonian,
    cumulative_action,
    l1_norm,
    lp_norm,
)
from ..linalg import dagger, spectral_norm, spectral_norms
from ..propagator import (
    FramePropagator,
    constant_evolution,
    evolve,
    evolve_at,
    floquet_generator,
    one_period_propagator,
    sup_distance,
)
from ._common import THETA, as_hamiltonian, as_window, sup_norm_of_stack
from .report import BoundReport


def _time_factor(h, t_end, p):
    """``||H||_{1,t}``, or ``t^(1-1/p) ||H||_{p,t}`` for the p-norm variant, with its error."""
    if p == 1:
        return l1_norm(h, t_end, full_output=True)
    val, info = lp_norm(h, t_end, p, full_output=True)
    scale = t_end ** (1 - 1 / p) if p != math.inf else t_end
    return scale * val, {"error": scale * info.get("error", 0.0)}


def universal_bound(h1, h2, window, p: float = 1, tol: float = 1e-9) -> BoundReport:
    """``||U_2 - U_1||_{inf,t} <= ||S_21||_{inf,t} (1 + ||H_1||_{1,t} + ||H_2||_{1,t})``.

    ``S_21(t) = int_0^t (H_2 - H_1)``. With ``p != 1`` each ``||H||_{1,t}``
    is replaced by ``t^(1-1/p) ||H||_{p,t}``. When both Hamiltonians are
    constant the sharper ``t ||H_2 - H_1||`` is also evaluated and the
    smaller of the two is reported.
    """
    h1, h2 = as_hamiltonian(h1), as_hamiltonian(h2)
    window = as_window(window)
    t_end = float(window.t_end)
    s_path, s_err = action_path(h2, h1, window.refined(4).grid)
    s_sup = sup_norm_of_stack(s_path)
    n1, i1 = _time_factor(h1, t_end, p)
    n2, i2 = _time_factor(h2, t_end, p)
    factor = 1.0 + n1 + n2
    bound = s_sup * factor
    extra = {"action_sup": s_sup, "norm_factor": factor, "general_bound": bound}
    if isinstance(h1, Constant) and isinstance(h2, Constant):
        sharp = t_end * spectral_norm(h2.matrix - h1.matrix)
        extra["constant_bound"] = sharp
        bound = min(bound, sharp)
    r1 = evolve(h1, window, tol=tol)
    r2 = evolve(h2, window, tol=tol)
    dist = sup_distance(r1, r2)
    est = dist.est_error + s_err * factor + s_sup * (i1["error"] + i2["error"])
    return BoundReport(
        "universal", bound, dist.value,
        params={"t": t_end, "p": p},
        grid_info={"grid_points": int(window.grid_points), "methods": [r1.method, r2.method],
                   "steps": [r1.info.get("steps"), r2.info.get("steps")]},
        est_error=est, extra=extra | {"sup_time": dist.time},
    )


def rotated_action_path(h1, h2, h0, grid, tol: float = 1e-10):
    """``Shat(t_k) = int_0^{t_k} U_0^† (H_2 - H_1) U_0`` on a grid, with an error estimate."""
    frame = FramePropagator(h0, tol=tol)
    diff = h2 - h1

    def f(ts):
        u = frame.at(ts)
        return dagger(u) @ diff.eval_many(ts) @ u

    bps = np.union1d(np.union1d(h1.breakpoints(grid[-1]), h2.breakpoints(grid[-1])), h0.breakpoints(grid[-1]))
    return cumulative_action(f, np.asarray(grid), bps)


def rotating_frame_bound(h1, h2, window, h0=None, tol: float = 1e-9) -> BoundReport:
    """``||U_2 - U_1||_{inf,t} <= ||Shat||_{inf,t} (1 + ||H_1 - H_0||_{1,t} + ||H_2 - H_0||_{1,t})``.

    ``Shat`` is the action of ``H_2 - H_1`` in the frame generated by
    ``H_0``. The default reference is the symmetric ``(H_1 + H_2)/2``, for
    which the factor is ``1 + ||H_2 - H_1||_{1,t}``.
    """
    h1, h2 = as_hamiltonian(h1), as_hamiltonian(h2)
    window = as_window(window)
    t_end = float(window.t_end)
    symmetric = h0 is None
    h0 = (0.5 * (h1 + h2)) if symmetric else as_hamiltonian(h0)
    if symmetric and isinstance(h1, Constant) and isinstance(h2, Constant):
        h0 = Constant(0.5 * (h1.matrix + h2.matrix))
    shat, s_err = rotated_action_path(h1, h2, h0, window.refined(4).grid)
    s_sup = sup_norm_of_stack(shat)
    n1, i1 = l1_norm(h1 - h0, t_end, full_output=True)
    n2, i2 = l1_norm(h2 - h0, t_end, full_output=True)
    factor = 1.0 + n1 + n2
    bound = s_sup * factor
    r1 = evolve(h1, window, tol=tol)
    r2 = evolve(h2, window, tol=tol)
    dist = sup_distance(r1, r2)
    s_plain, _ = action_path(h2, h1, window.refined(4).grid)
    extra = {
        "rotated_action_sup": s_sup,
        "norm_factor": factor,
        "universal_bound": sup_norm_of_stack(s_plain) * (1 + l1_norm(h1, t_end) + l1_norm(h2, t_end)),
        "symmetric_reference": symmetric,
        "sup_time": dist.time,
    }
    return BoundReport(
        "rotating_frame", bound, dist.value,
        params={"t": t_end},
        grid_info={"grid_points": int(window.grid_points), "methods": [r1.method, r2.method]},
        est_error=dist.est_error + s_err * factor + s_sup * (i1["error"] + i2["error"]),
        extra=extra,
    )


def eternal_bound_value(l1_period: float, kappa: float) -> float:
    """``(theta/kappa) L (1 + (theta/kappa) L)`` with ``L = ||H||_{1,tau}``."""
    x = THETA * l1_period / kappa
    return x * (1 + x)


def average_bound_value(l1_period: float, kappa: float, horizon: float, period: float) -> float:
    """``(2/kappa) L [1 + (2T/tau + 1/kappa) L]`` for the plain average generator."""
    return (2 / kappa) * l1_period * (1 + (2 * horizon / period + 1 / kappa) * l1_period)


def floquet_identity_residual(h: TimeDepHamiltonian, period: float, kappa: float, periods: int,
                              per_period: int = 8, tol: float = 1e-12) -> float:
    """Largest deviation from the Floquet factorization of ``H(kappa t)`` dynamics.

    With ``T = tau/kappa`` the driving period in real time, compares
    ``U(kT + s)`` with ``U(s) U(T)^k`` at ``per_period`` equispaced ``s`` in
    each of the first ``periods`` periods.
    """
    hk = h.time_scaled(kappa)
    step = period / kappa
    n = int(periods) * int(per_period)
    times = np.arange(n + 1) * (step / per_period)
    full = evolve_at(hk, times, tol=tol).unitaries
    first = evolve_at(hk, times[: per_period + 1], tol=tol).unitaries
    u1 = first[-1]
    powers = [np.eye(h.dim, dtype=complex)]
    for _ in range(int(periods)):
        powers.append(u1 @ powers[-1])
    k = np.arange(n + 1)
    whole, frac = k // per_period, k % per_period
    pred = first[frac] @ np.stack(powers)[whole]
    return float(np.max(spectral_norms(full - pred)))


def eternal_periodic_bound(h, period: float, kappa: float, periods: int = 200, per_period: int = 8,
                           tol: float = 1e-10) -> BoundReport:
    """Distance of ``H(kappa t)`` dynamics from ``exp(-i t Hbar_kappa)`` over many periods.

    ``Hbar_kappa`` is the principal-branch Floquet generator. The bound
    ``(theta/kappa) L (1 + (theta/kappa) L)`` does not grow with the horizon.
    The plain-average comparison and its horizon-dependent bound are
    reported in ``extra``.
    """
    h = as_hamiltonian(h)
    tau = float(period)
    l1, l1_info = l1_norm(h, tau, full_output=True)
    hk_gen = floquet_generator(h, tau, kappa)
    hbar = average_hamiltonian(h, tau)
    horizon = int(periods) * tau / kappa
    window = TimeWindow(horizon, int(periods) * int(per_period) + 1)
    u = evolve(h.time_scaled(kappa), window, tol=tol)
    eternal = sup_distance(u, constant_evolution(hk_gen, window.grid))
    plain = sup_distance(u, constant_evolution(hbar, window.grid))
    bound = eternal_bound_value(l1, kappa)
    avg_bound = average_bound_value(l1, kappa, horizon, tau)
    return BoundReport(
        "eternal_periodic", bound, eternal.value,
        params={"period": tau, "kappa": float(kappa), "periods": int(periods), "horizon": horizon},
        grid_info={"grid_points": int(window.grid_points), "method": u.method, "steps": u.info.get("steps")},
        est_error=eternal.est_error + 2 * THETA / kappa * l1_info["error"] * (1 + THETA * l1 / kappa),
        extra={
            "l1_period": l1,
            "average_distance": plain.value,
            "average_bound": avg_bound,
            "average_holds": bool(plain.value <= avg_bound + plain.est_error + 1e-9),
            "generator_shift": spectral_norm(hk_gen - hbar),
            "kappa_regime": bool(kappa >= 2 * l1),
        },
    )


def converse_action_bound(h, window, tol: float = 1e-10) -> BoundReport:
    """``||S||_{inf,t} <= (1 + ||H||_{1,t}) ||U - 1||_{inf,t}`` with ``S(t) = int_0^t H``.

    ``actual`` is the left side and ``bound_value`` the right side; both
    suprema use the same 4x refined grid.
    """
    h = as_hamiltonian(h)
    window = as_window(window)
    fine = window.refined(4)
    zero = Constant(np.zeros((h.dim, h.dim)))
    s_path, s_err = action_path(h, zero, fine.grid)
    u = evolve(h, fine, tol=tol)
    dev = spectral_norms(u.unitaries - np.eye(h.dim))
    l1, info = l1_norm(h, float(window.t_end), full_output=True)
    rhs = (1 + l1) * float(np.max(dev))
    return BoundReport(
        "converse_action", rhs, sup_norm_of_stack(s_path),
        params={"t": float(window.t_end)},
        grid_info={"grid_points": int(fine.grid_points), "method": u.method},
        est_error=s_err + (1 + l1) * u.est_error + info["error"] * float(np.max(dev)),
    )


def _spectral_mismatch(wh, wg, tol):
    """Largest detuning of an eigenvalue of one generator from the spectrum of the other."""
    det = [np.min(np.abs(wh - x)) for x in wg] + [np.min(np.abs(wg - x)) for x in wh]
    det = max(det)
    if det > tol:
        return det
    union = np.unique(np.round(np.concatenate([wh, wg]) / tol) * tol)
    return float(np.min(np.diff(union))) if len(union) > 1 else 0.0


def isospectral_divergence(h, g, t_max: float | None = None, grid_points: int = 20001,
                           cluster_tol: float = 1e-8) -> BoundReport:
    """Scan ``sup_t ||exp(-itH) - exp(-itG)||`` for generators that are not unitarily equivalent.

    Such generators reach at least ``sqrt(2)``; this is a lower bound, so the
    report has ``direction="lower"``. When ``t_max`` is omitted it is set to
    ``4 pi / mismatch`` with ``mismatch`` the largest eigenvalue detuning (or
    the smallest level spacing when only multiplicities differ).

    Raises
    ------
    Inconclusive
        If the spectra agree with multiplicity, i.e. the generators are
        unitarily equivalent.
    """
    hm = as_hamiltonian(h)
    gm = as_hamiltonian(g)
    if not (isinstance(hm, Constant) and isinstance(gm, Constant)):
        raise ValueError("isospectral_divergence needs constant generators")
    wh = np.linalg.eigvalsh(hm.matrix)
    wg = np.linalg.eigvalsh(gm.matrix)
    if len(wh) != len(wg):
        raise ValueError("generators act on spaces of different dimension")
    if np.max(np.abs(wh - wg)) < 10 * cluster_tol:
        raise Inconclusive("spectra coincide with multiplicities; the generators are unitarily equivalent")
    mismatch = _spectral_mismatch(wh, wg, 10 * cluster_tol)
    auto = 4 * np.pi / mismatch
    t_max = auto if t_max is None else float(t_max)
    times = np.linspace(0.0, t_max, int(grid_points))
    uh = constant_evolution(hm.matrix, times).unitaries
    ug = constant_evolution(gm.matrix, times).unitaries
    d = spectral_norms(uh - ug)
    k = int(np.argmax(d))
    return BoundReport(
        "isospectral_divergence", math.sqrt(2.0), float(d[k]),
        params={"t_max": t_max},
        grid_info={"grid_points": int(grid_points)},
        est_error=1e-12, direction="lower",
        extra={"sup_time": float(times[k]), "mismatch": mismatch, "recommended_t_max": auto},
    )
