"""Strong-coupling (Zeno) and adiabatic bounds."""

from __future__ import annotations

import math

import numpy as np

from ..hamiltonian import Constant, Sampler, TimeDepHamiltonian, TimeWindow, sup_norm
from ..linalg import commutator, spectral_norm, spectral_norms
from ..propagator import constant_evolution, evolve, sup_distance
from ..spectral import (
    CLUSTER_TOL,
    adiabatic_connection_many,
    connection_hamiltonian,
    gap_profile,
    spectral_decompose,
    zeno_hamiltonian,
    zeno_path,
)
from ._common import as_hamiltonian, sup_norm_of_stack
from .report import BoundReport


def _limit_commutator(us, projections) -> float:
    """``max_{t,l} ||[V(t), P_l]||``."""
    return float(max(np.max(spectral_norms(commutator(us, p[None]))) for p in projections))


def strong_coupling_bound(h0, h1, kappa: float, t_end: float, grid_points: int = 1001,
                          tol: float = 1e-9) -> BoundReport:
    """Zeno limit: ``||exp(-it(kH_0+H_1)) - exp(-it(kH_0+H_Z))|| <= (2 sqrt(m)/(k eta)) ||H_1|| (1 + 2T||H_1||)``.

    ``H_Z = sum_l P_l H_1 P_l``. A time-dependent ``h1`` gives
    ``H_Z(t)`` and ``||H_1||_{inf,T}`` in place of ``||H_1||``.
    ``extra["limit_commutator"]`` records how well the limit evolution
    commutes with every ``P_l``.
    """
    dec = spectral_decompose(h0)
    h0m = np.asarray(h0, dtype=complex)
    h1 = as_hamiltonian(h1)
    window = TimeWindow(t_end, grid_points)
    if isinstance(h1, Constant):
        hz = zeno_hamiltonian(h1.matrix, dec)
        n1 = spectral_norm(h1.matrix)
        u = constant_evolution(kappa * h0m + h1.matrix, window.grid)
        v = constant_evolution(kappa * h0m + hz, window.grid)
        hz_info = {"hz": hz}
    else:
        n1 = sup_norm(h1, window)
        hz_t = Sampler(lambda ts: np.einsum("lij,njk,lkm->nim", dec.projections, h1.eval_many(ts), dec.projections),
                       h1.dim, smoothness=h1.smoothness, vectorized=True, check=False)
        fast = Constant(kappa * h0m)
        u = evolve(fast + h1, window, tol=tol)
        v = evolve(fast + hz_t, window, tol=tol)
        hz_info = {}
    bound = 0.0 if dec.m == 1 else 2 * math.sqrt(dec.m) / (kappa * dec.eta) * n1 * (1 + 2 * t_end * n1)
    dist = sup_distance(u, v)
    return BoundReport(
        "strong_coupling", bound, dist.value,
        params={"kappa": kappa, "T": t_end, "m": dec.m, "eta": dec.eta, "h1_norm": n1},
        grid_info={"grid_points": grid_points, "methods": [u.method, v.method]},
        est_error=dist.est_error,
        extra=hz_info | {"limit_commutator": _limit_commutator(v.unitaries, dec.projections), "sup_time": dist.time},
    )


def _connection_stats(h0, window, dec_tol, analytic=None):
    ts = window.refined(4).grid
    a = adiabatic_connection_many(h0, ts, float(window.t_end), dec_tol, analytic=analytic)
    adot = np.gradient(a, ts, axis=0, edge_order=2)
    return sup_norm_of_stack(a), sup_norm_of_stack(adot), a


def adiabatic_value(m, eta, eta_p, a_sup, adot_sup, kappa, t_end) -> float:
    """``(sqrt(m)/(k eta))(1 + T||A||)[(2 + (eta'/eta) T)||A|| + T||Adot||]``."""
    return math.sqrt(m) / (kappa * eta) * (1 + t_end * a_sup) * ((2 + eta_p / eta * t_end) * a_sup
                                                                  + t_end * adot_sup)


def adiabatic_bound(h0: TimeDepHamiltonian, kappa: float, t_end: float, grid_points: int = 401,
                    dec_tol: float = CLUSTER_TOL, tol: float = 1e-9, analytic=None) -> BoundReport:
    """Adiabatic theorem: ``T exp(-i int kH_0)`` against ``T exp(-i int (kH_0 + A))``.

    ``A = sum_l (i/2)[dP_l/dt, P_l]`` is the adiabatic connection. Gap
    ``eta``, gap velocity ``eta'`` and the suprema of ``A`` and its
    derivative are sampled on a 4x refined grid.
    """
    window = TimeWindow(t_end, grid_points)
    gp = gap_profile(h0, window, dec_tol)
    a_sup, adot_sup, _ = _connection_stats(h0, window, dec_tol, analytic)
    bound = adiabatic_value(gp.m, gp.eta, gp.eta_prime, a_sup, adot_sup, kappa, t_end) if gp.m > 1 else 0.0
    fast = h0 * kappa
    conn = connection_hamiltonian(h0, t_end, dec_tol, analytic=analytic)
    u = evolve(fast, window, tol=tol)
    v = evolve(fast + conn, window, tol=tol)
    dist = sup_distance(u, v)
    return BoundReport(
        "adiabatic", bound, dist.value,
        params={"kappa": kappa, "T": t_end, "m": gp.m, "eta": gp.eta, "eta_prime": gp.eta_prime,
                "A_sup": a_sup, "Adot_sup": adot_sup},
        grid_info={"grid_points": grid_points, "profile_points": gp.grid_points,
                   "steps": [u.info.get("steps"), v.info.get("steps")]},
        est_error=dist.est_error,
        extra={"sup_time": dist.time},
    )


def generalized_adiabatic_value(m, eta, eta_p, a, adot, g, gdot, kappa, t_end) -> float:
    """``(sqrt(m)/(k eta))(1 + T||A|| + 2T||G||)[(2 + eta' T/eta)(||A||+||G||) + T(||Adot||+||Gdot||+2||A|| ||G||)]``."""
    return (math.sqrt(m) / (kappa * eta) * (1 + t_end * a + 2 * t_end * g)
            * ((2 + eta_p * t_end / eta) * (a + g) + t_end * (adot + gdot + 2 * a * g)))


def generalized_adiabatic_bound(h0: TimeDepHamiltonian, g: TimeDepHamiltonian, kappa: float, t_end: float,
                                grid_points: int = 401, dec_tol: float = CLUSTER_TOL,
                                tol: float = 1e-9) -> BoundReport:
    """``H_k(t) = kH_0(t) + G(t)`` against ``kH_0 + G_Z + A`` with ``G_Z = sum_l P_l G P_l``.

    ``G`` may itself depend on ``k`` (growing slower than ``sqrt(k)``); pass
    the Hamiltonian already built for this ``k``.
    """
    g = as_hamiltonian(g)
    window = TimeWindow(t_end, grid_points)
    gp = gap_profile(h0, window, dec_tol)
    a_sup, adot_sup, _ = _connection_stats(h0, window, dec_tol)
    ts = window.refined(4).grid
    g_sup = sup_norm_of_stack(g.eval_many(ts))
    gdot_sup = sup_norm_of_stack(g.derivative().eval_many(ts))
    bound = (generalized_adiabatic_value(gp.m, gp.eta, gp.eta_prime, a_sup, adot_sup, g_sup, gdot_sup,
                                         kappa, t_end) if gp.m > 1 else 0.0)
    fast = h0 * kappa
    conn = connection_hamiltonian(h0, t_end, dec_tol)
    gz = zeno_path(h0, g, dec_tol)
    u = evolve(fast + g, window, tol=tol)
    v = evolve(fast + gz + conn, window, tol=tol)
    dist = sup_distance(u, v)
    return BoundReport(
        "generalized_adiabatic", bound, dist.value,
        params={"kappa": kappa, "T": t_end, "m": gp.m, "eta": gp.eta, "eta_prime": gp.eta_prime,
                "A_sup": a_sup, "Adot_sup": adot_sup, "G_sup": g_sup, "Gdot_sup": gdot_sup},
        grid_info={"grid_points": grid_points, "profile_points": gp.grid_points},
        est_error=dist.est_error,
        extra={"sup_time": dist.time},
    )
