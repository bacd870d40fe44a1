"""Time-ordered exponentials ``U(t) = T exp(-i int_0^t H)``.

Integrators
-----------
``piecewise_exact``
    One exact exponential per constant piece (``Constant`` and
    ``PiecewiseConstant``).
``commuting_exact``
    ``exp(-i int_0^t H)`` for term sums whose operators commute and whose
    envelopes have antiderivatives.
``cf_magnus4``
    Fourth-order commutator-free Magnus: two exponentials per step built
    from samples at the two Gauss-Legendre nodes.
``midpoint_exp``
    Second-order product of exponentials sampled at step midpoints.

Stepping integrators never straddle a declared breakpoint, and halve their
step until two successive runs agree to the requested tolerance; that
difference is reported as ``est_error``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BranchAmbiguity, GridMismatch, ToleranceNotMet
from .hamiltonian import (
    Constant,
    PiecewiseConstant,
    TermSum,
    TimeDepHamiltonian,
    TimeWindow,
    average_hamiltonian,
    l1_norm,
    norms_at,
)
from .linalg import commutator, dagger, logm_unitary, spectral_norms

METHODS = ("auto", "piecewise_exact", "commuting_exact", "midpoint_exp", "cf_magnus4")
DEFAULT_TOL = 1e-9
MAX_STEPS = 2**25
_CHUNK = 2**16

_SQ3 = math.sqrt(3.0)
_C1, _C2 = 0.5 - _SQ3 / 6, 0.5 + _SQ3 / 6
_A1, _A2 = (3 - 2 * _SQ3) / 12, (3 + 2 * _SQ3) / 12


@dataclass
class EvolutionResult:
    """Propagator sampled at checkpoint times.

    Attributes
    ----------
    times : ndarray, shape (n,)
    unitaries : ndarray, shape (n, d, d)
    method : str
        Integrator that produced the samples.
    est_error : float
        Step-halving difference (zero for exact methods).
    info : dict
        Step size and step count of the accepted run.
    """

    times: np.ndarray
    unitaries: np.ndarray
    method: str
    est_error: float
    info: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.unitaries[-1]


@dataclass(frozen=True)
class Distance:
    """Grid supremum of ``||U_1(t) - U_2(t)||``."""

    value: float
    time: float
    est_error: float

    def __float__(self):
        return float(self.value)


# ---------------------------------------------------------------------------
# stepping core


def _knots(times, bps, max_len=None):
    knots = np.union1d(times, bps)
    if max_len is not None:
        lens = np.diff(knots)
        parts = np.maximum(1, np.ceil(lens / max_len - 1e-12).astype(np.int64))
        if np.any(parts > 1):
            extra = [np.linspace(a, b, p + 1)[1:-1] for a, b, p in zip(knots[:-1], knots[1:], parts) if p > 1]
            knots = np.union1d(knots, np.concatenate(extra))
    ck = np.searchsorted(knots, times)
    return knots, ck


def _run_steps(h: TimeDepHamiltonian, knots, ck, step, scheme, impl=None):
    """Integrate over the knot intervals with fixed maximal step; return checkpoint unitaries."""
    lens = np.diff(knots)
    nsteps = np.maximum(1, np.ceil(lens / step - 1e-9).astype(np.int64))
    per = 2 if scheme == "cf_magnus4" else 1
    d = h.dim
    out = np.empty((len(ck), d, d), dtype=complex)
    is_ck = np.zeros(len(knots), dtype=bool)
    is_ck[ck] = True
    # map knot index -> positions in ``out`` (duplicate checkpoint times share a knot)
    order = np.argsort(ck, kind="stable")
    u = np.eye(d, dtype=complex)
    filled = 0
    while filled < len(order) and ck[order[filled]] == 0:
        out[order[filled]] = u
        filled += 1
    i = 0
    n_int = len(lens)
    while i < n_int:
        # chunk of whole intervals with at most _CHUNK steps (at least one interval)
        cum = np.cumsum(nsteps[i:])
        j = i + max(1, int(np.searchsorted(cum, _CHUNK, side="right")))
        j = min(j, n_int)
        n = nsteps[i:j]
        total = int(n.sum())
        dt = np.repeat(lens[i:j] / n, n)
        first = np.repeat(np.cumsum(n) - n, n)
        t0 = np.repeat(knots[i:j], n) + (np.arange(total) - first) * dt
        if scheme == "midpoint_exp":
            g = dt[:, None, None] * h.eval_many(t0 + 0.5 * dt)
        else:
            h1 = h.eval_many(t0 + _C1 * dt)
            h2 = h.eval_many(t0 + _C2 * dt)
            g = np.empty((2 * total, d, d), dtype=complex)
            g[0::2] = dt[:, None, None] * (_A2 * h1 + _A1 * h2)
            g[1::2] = dt[:, None, None] * (_A1 * h1 + _A2 * h2)
        ends = per * np.cumsum(n)
        rec = np.nonzero(is_ck[i + 1:j + 1])[0]
        stops = np.concatenate([ends[rec], [ends[-1]]])
        prods = kernels.ordered_product(g, stops, u, impl=impl)
        for r, p in zip(rec, prods[:-1]):
            k = i + 1 + r
            while filled < len(order) and ck[order[filled]] == k:
                out[order[filled]] = p
                filled += 1
        u = prods[-1]
        i = j
    return out, int(nsteps.sum())


def _max_dist(a, b) -> float:
    if len(a) == 0:
        return 0.0
    return float(np.max(spectral_norms(a - b)))


def _initial_step(h, times, bps, max_step):
    t_end = float(times[-1])
    probe = np.linspace(0.0, t_end, 257)
    probe = probe[:-1] + 0.5 * (probe[1] - probe[0])
    hmax = float(np.max(norms_at(h, probe))) if len(probe) else 0.0
    step = 0.2 / hmax if hmax > 0 else t_end
    spacing = float(np.max(np.diff(times))) if len(times) > 1 else t_end
    step = min(step, spacing, t_end)
    if max_step is not None:
        step = min(step, float(max_step))
    return max(step, 1e-300)


def _adaptive(h, times, scheme, tol, max_steps, max_step=None, min_halvings=1, impl=None):
    bps = h.breakpoints(float(times[-1]))
    step = _initial_step(h, times, bps, max_step)
    knots, ck = _knots(times, bps, max_len=step * _CHUNK / 4)
    coarse, n_coarse = _run_steps(h, knots, ck, step, scheme, impl)
    history = []
    halvings = 0
    while True:
        step /= 2
        fine, n_fine = _run_steps(h, knots, ck, step, scheme, impl)
        halvings += 1
        err = _max_dist(fine, coarse)
        history.append(err)
        info = {"step": step, "steps": n_fine, "halvings": halvings}
        if err <= tol and halvings >= min_halvings:
            return fine, err, info
        stalled = len(history) >= 3 and history[-1] < 1e-4 and history[-1] > 0.7 * history[-3]
        if stalled or 2 * n_fine > max_steps:
            res = EvolutionResult(np.asarray(times), fine, scheme, err, info)
            why = "step halving stalled" if stalled else f"step budget {max_steps} exhausted"
            raise ToleranceNotMet(f"{why}: halving difference {err:.3e} > tol {tol:.1e}", res)
        coarse = fine


def _exact_constant(h: Constant, times):
    w, v = np.linalg.eigh(h.matrix)
    ph = np.exp(-1j * np.outer(times, w))
    return (v[None] * ph[:, None, :]) @ dagger(v)[None]


def _exact_commuting(h: TermSum, times):
    return kernels.expm_stack(h.integral(times))


def _exact_piecewise(h: PiecewiseConstant, times, impl=None):
    bps = h.breakpoints(float(times[-1]))
    knots, ck = _knots(times, bps)
    mids = 0.5 * (knots[:-1] + knots[1:])
    g = np.diff(knots)[:, None, None] * h.eval_many(mids)
    stops = ck  # one factor per knot interval
    return kernels.ordered_product(g, stops, impl=impl)


def resolve_method(h: TimeDepHamiltonian, method: str = "auto") -> str:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if method != "auto":
        return method
    if isinstance(h, (Constant, PiecewiseConstant)):
        return "piecewise_exact"
    if isinstance(h, TermSum) and h.has_antiderivative and h.is_commuting:
        return "commuting_exact"
    return "cf_magnus4"


def evolve_at(h: TimeDepHamiltonian, times, method: str = "auto", tol: float = DEFAULT_TOL,
              max_steps: int = MAX_STEPS, max_step: float | None = None, impl=None) -> EvolutionResult:
    """Propagator at arbitrary non-decreasing ``times`` (the first must be 0)."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0 or times[0] != 0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be non-decreasing and start at 0")
    method = resolve_method(h, method)
    if len(times) == 1 or times[-1] == 0:
        eye = np.broadcast_to(np.eye(h.dim, dtype=complex), (len(times), h.dim, h.dim)).copy()
        return EvolutionResult(times, eye, method, 0.0, {})
    if method == "piecewise_exact":
        if isinstance(h, Constant):
            us = _exact_constant(h, times)
        elif isinstance(h, PiecewiseConstant):
            us = _exact_piecewise(h, times, impl)
        else:
            raise ValueError("piecewise_exact needs a Constant or PiecewiseConstant Hamiltonian")
        return EvolutionResult(times, us, method, 0.0, {})
    if method == "commuting_exact":
        if not (isinstance(h, TermSum) and h.has_antiderivative and h.is_commuting):
            raise ValueError("commuting_exact needs commuting terms with antiderivatives")
        return EvolutionResult(times, _exact_commuting(h, times), method, 0.0, {})
    us, err, info = _adaptive(h, times, method, tol, max_steps, max_step, impl=impl)
    return EvolutionResult(times, us, method, err, info)


def evolve(h: TimeDepHamiltonian, window: TimeWindow, method: str = "auto", tol: float = DEFAULT_TOL,
           max_steps: int = MAX_STEPS, max_step: float | None = None, impl=None) -> EvolutionResult:
    """Propagator on the window grid.

    Parameters
    ----------
    h : TimeDepHamiltonian
    window : TimeWindow
    method : {"auto", "piecewise_exact", "commuting_exact", "midpoint_exp", "cf_magnus4"}
        ``auto`` picks an exact method when the form allows one and
        ``cf_magnus4`` otherwise.
    tol : float
        Accept once successive step halvings differ by at most ``tol``.
    max_steps : int
        Step budget before giving up.
    max_step : float, optional
        Cap on the first trial step (useful when the drive frequency is known).

    Raises
    ------
    ToleranceNotMet
        If halving stalls or the budget runs out; the last run is attached
        as ``exc.result``.
    """
    return evolve_at(h, window.grid, method, tol, max_steps, max_step, impl)


def dyson_oracle(h: TimeDepHamiltonian, window: TimeWindow, steps: int = 10**6, impl=None) -> EvolutionResult:
    """Independent midpoint product ``prod_j exp(-i dt H(s_j))`` with ``steps`` uniform steps.

    Converges at second order. The reported ``est_error`` is the difference
    to the same product with half as many steps.
    """
    times = window.grid
    step = float(window.t_end) / int(steps)
    bps = h.breakpoints(float(times[-1]))
    knots, ck = _knots(times, bps, max_len=step * _CHUNK / 4)
    fine, n = _run_steps(h, knots, ck, step, "midpoint_exp", impl)
    coarse, _ = _run_steps(h, knots, ck, 2 * step, "midpoint_exp", impl)
    return EvolutionResult(times, fine, "dyson_oracle", _max_dist(fine, coarse), {"step": step, "steps": n})


def sup_distance(u1: EvolutionResult, u2: EvolutionResult) -> Distance:
    """``max_k ||U_1(t_k) - U_2(t_k)||`` over the shared grid.

    Raises
    ------
    GridMismatch
        If the two results were sampled at different times.
    """
    if u1.times.shape != u2.times.shape or not np.allclose(u1.times, u2.times, rtol=1e-12, atol=1e-14):
        raise GridMismatch("evolutions are sampled on different grids")
    norms = spectral_norms(u1.unitaries - u2.unitaries)
    k = int(np.argmax(norms))
    return Distance(float(norms[k]), float(u1.times[k]), float(u1.est_error + u2.est_error))


def constant_evolution(h_matrix, times) -> EvolutionResult:
    """``exp(-i t H)`` for a constant matrix at the given times."""
    times = np.asarray(times, dtype=float)
    return EvolutionResult(times, _exact_constant(Constant(h_matrix), times), "piecewise_exact", 0.0, {})


class FramePropagator:
    """``U_0(t)`` for a reference Hamiltonian at arbitrary times, memoized per request."""

    def __init__(self, h0: TimeDepHamiltonian, tol: float = 1e-10):
        self.h0 = h0
        self.tol = tol
        self._cache: dict = {}
        if isinstance(h0, Constant):
            self._w, self._v = np.linalg.eigh(h0.matrix)

    def at(self, ts) -> np.ndarray:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if isinstance(self.h0, Constant):
            ph = np.exp(-1j * np.outer(ts, self._w))
            return (self._v[None] * ph[:, None, :]) @ dagger(self._v)[None]
        if isinstance(self.h0, TermSum) and self.h0.has_antiderivative and self.h0.is_commuting:
            return kernels.expm_stack(self.h0.integral(ts))
        key = (ts.tobytes(), len(ts))
        if key in self._cache:
            return self._cache[key]
        uniq, inv = np.unique(ts, return_inverse=True)
        grid = uniq if uniq[0] == 0 else np.concatenate([[0.0], uniq])
        res = evolve_at(self.h0, grid, tol=self.tol)
        us = res.unitaries if uniq[0] == 0 else res.unitaries[1:]
        out = us[inv]
        if len(self._cache) > 8:
            self._cache.clear()
        self._cache[key] = out
        return out


# ---------------------------------------------------------------------------
# effective generators of periodic drives


def one_period_propagator(h: TimeDepHamiltonian, period: float, kappa: float = 1.0,
                          tol: float = 1e-12) -> np.ndarray:
    """``U_kappa(tau/kappa)`` for ``H_kappa(t) = H(kappa t)``."""
    scaled = h * (1.0 / float(kappa)) if not isinstance(h, Constant) else Constant(h.matrix / kappa)
    return evolve_at(scaled, np.array([0.0, float(period)]), tol=tol).unitaries[-1]


def floquet_generator(h: TimeDepHamiltonian, period: float, kappa: float = 1.0, tol: float = 1e-12) -> np.ndarray:
    """Generator ``Hbar_kappa = (i kappa/tau) log U_kappa(tau/kappa)`` on the principal branch.

    Raises
    ------
    BranchAmbiguity
        If ``kappa <= ||H||_{1,tau}/pi`` (outside the convergent regime of
        the series) or an eigenphase of the period propagator sits at ``pi``.
    """
    l1 = l1_norm(h, period)
    if kappa <= l1 / np.pi:
        raise BranchAmbiguity(f"kappa={kappa} is not above ||H||_1/pi = {l1 / np.pi:.6g}")
    u = one_period_propagator(h, period, kappa, tol)
    return (kappa / period) * logm_unitary(u)


def _gauss_legendre(q):
    x, w = np.polynomial.legendre.leggauss(q)
    return 0.5 * (x + 1), 0.5 * w


def magnus2_generator(h: TimeDepHamiltonian, period: float, kappa: float = 1.0, panels: int = 256,
                      q: int = 8) -> np.ndarray:
    """Second-order truncation ``Hbar - (i/(2 kappa tau)) int_0^tau ds int_0^s du [H(s), H(u)]``."""
    tau = float(period)
    hbar = average_hamiltonian(h, tau)
    if isinstance(h, (Constant, PiecewiseConstant)):
        if isinstance(h, Constant):
            return hbar
        edges = np.concatenate([[0.0], h.breakpoints(tau), [tau]])
        vals = h.eval_many(0.5 * (edges[:-1] + edges[1:]))
        lens = np.diff(edges)
        cum = np.cumsum(lens[:, None, None] * vals, axis=0)
        prev = np.concatenate([np.zeros((1, h.dim, h.dim), complex), cum[:-1]])
        dbl = np.sum(lens[:, None, None] * commutator(vals, prev), axis=0)
    else:
        x, w = _gauss_legendre(q)
        edges = np.union1d(np.linspace(0.0, tau, panels + 1), h.breakpoints(tau))
        dbl = np.zeros((h.dim, h.dim), complex)
        c_start = np.zeros((h.dim, h.dim), complex)
        for a, b in zip(edges[:-1], edges[1:]):
            ln = b - a
            s = a + ln * x
            hs = h.eval_many(s)
            # C(s_i) = C(a) + int_a^{s_i} H via a Gauss rule on [a, s_i]
            inner = a + (s - a)[:, None] * x[None, :]
            hin = h.eval_many(inner.ravel()).reshape(q, q, h.dim, h.dim)
            cs = c_start + np.einsum("i,j,ijkl->ikl", s - a, w, hin)
            dbl += ln * np.einsum("i,ikl->kl", w, commutator(hs, cs))
            c_start = c_start + ln * np.einsum("i,ikl->kl", w, hs)
    return hbar - 1j / (2 * kappa * tau) * dbl
