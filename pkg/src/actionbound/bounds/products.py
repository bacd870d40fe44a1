"""Product-formula bounds: ergodic-mean Trotter, random Trotter, kicks, bang-bang and generalized Trotter."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..errors import BoundViolation, EmptySequence, KappaTooLarge, NoErgodicLimit
from ..kernels import chain_unitaries, ordered_product
from ..linalg import (
    as_matrix,
    commutator,
    dagger,
    expm_hermitian,
    hs_norm,
    require_hermitian,
    require_unitary,
    spectral_norm,
    spectral_norms,
)
from ..spectral import spectral_decompose, zeno_hamiltonian
from .report import BoundReport

#: Relative tolerance when comparing kick products for periodicity.
PERIOD_TOL = 1e-10


def _stack(seq, count: int, what: str) -> np.ndarray:
    """First ``count`` items of a sequence, or of a 1-based callable ``j -> item``."""
    if callable(seq):
        items = [as_matrix(seq(j)) for j in range(1, count + 1)]
    else:
        items = [as_matrix(x) for x in list(seq)[:count]]
    if not items:
        raise EmptySequence(f"no {what} supplied")
    if len(items) < count:
        raise EmptySequence(f"need {count} {what}, got {len(items)}")
    return np.stack(items)


def ergodic_deviation(hs: np.ndarray, limit: np.ndarray) -> float:
    """``M_n = max_j (j/n) ||mean(H_1..H_j) - Hbar||`` for the ``n`` matrices in ``hs``."""
    n = len(hs)
    partial = np.cumsum(hs, axis=0) - np.arange(1, n + 1)[:, None, None] * limit[None]
    return float(np.max(spectral_norms(partial))) / n


def ergodic_trotter_value(mn: float, m: float, n: int, t: float) -> float:
    """``(M_n + 2M/n) t (1 + 2tM)``."""
    return (mn + 2 * m / n) * t * (1 + 2 * t * m)


def periodic_trotter_value(m: float, n: int, p: int, t: float) -> float:
    """``(2/n)(1 + 1/p) t M (1 + 2tM)`` for ``n`` cycles of ``p`` factors."""
    return 2 / n * (1 + 1 / p) * t * m * (1 + 2 * t * m)


def trotter_product(hs: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i(t/n)H_n) ... exp(-i(t/n)H_1)`` for the ``n`` matrices in ``hs``."""
    n = len(hs)
    return ordered_product(hs * (t / n), [n])[0]


def trotter_bound(hams, n: int, t: float, limit=None, periodic: bool = True) -> BoundReport:
    """Distance of a Trotter product to the exponential of the ergodic mean.

    Parameters
    ----------
    hams : sequence of matrices or callable
        ``periodic=True``: one cycle ``(H_1, ..., H_p)``, repeated ``n`` times
        with step ``t/(np)``. ``periodic=False``: the sequence ``H_1, H_2,
        ...`` (or ``j -> H_j``), of which the first ``n`` are used with step
        ``t/n``.
    n : int
        Number of cycles (periodic) or of factors.
    limit : array_like, optional
        Declared ergodic mean. Defaults to the cycle mean when periodic.

    Returns
    -------
    BoundReport
        ``bound_value`` is the periodic rate when periodic and the ergodic-mean
        bound with exact ``M_n`` otherwise; ``extra`` holds both.

    Raises
    ------
    EmptySequence
        If no matrices are supplied.
    NoErgodicLimit
        If the sequence is not periodic and no limit is declared.
    """
    n = int(n)
    if n < 1:
        raise EmptySequence("n must be at least 1")
    if periodic:
        if callable(hams):
            raise TypeError("a periodic cycle must be given as a sequence")
        cycle = _stack(hams, len(hams), "Hamiltonians")
        p = len(cycle)
        for hj in cycle:
            require_hermitian(hj)
        hbar = cycle.mean(axis=0) if limit is None else as_matrix(limit)
        one = ordered_product(cycle * (t / (n * p)), [p])[0]
        w = np.linalg.matrix_power(one, n)
        seq = np.tile(cycle, (n, 1, 1))
    else:
        if limit is None:
            raise NoErgodicLimit("a non-periodic sequence needs a declared limit")
        seq = _stack(hams, n, "Hamiltonians")
        for hj in seq[: min(len(seq), 64)]:
            require_hermitian(hj)
        hbar = as_matrix(limit)
        p = None
        w = trotter_product(seq, t)
    m = float(np.max(spectral_norms(seq)))
    mn = ergodic_deviation(seq, hbar)
    steps = len(seq)
    ergodic = ergodic_trotter_value(mn, m, steps, t)
    actual = spectral_norm(w - expm_hermitian(hbar, t))
    extra = {"ergodic_bound": ergodic, "M_n": mn}
    if periodic:
        rate = periodic_trotter_value(m, n, p, t)
        extra["periodic_bound"] = rate
        bound = rate
    else:
        bound = ergodic
    return BoundReport(
        "trotter", bound, actual,
        params={"n": n, "t": t, "p": p, "M": m, "periodic": periodic},
        grid_info={"factors": steps},
        est_error=64 * steps * np.finfo(float).eps,
        extra=extra,
    )


# ---------------------------------------------------------------------------
# random Trotter


@dataclass
class DiscreteEnsemble:
    """Finite distribution over Hermitian matrices.

    Attributes
    ----------
    matrices : ndarray, shape (k, d, d)
    weights : ndarray, shape (k,)
        Probabilities, normalized on construction.
    """

    matrices: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        self.matrices = np.stack([require_hermitian(a) for a in self.matrices])
        k = len(self.matrices)
        if k == 0:
            raise EmptySequence("empty ensemble")
        w = np.full(k, 1.0 / k) if self.weights is None else np.asarray(self.weights, dtype=float)
        self.weights = w / w.sum()

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.matrices[rng.choice(len(self.matrices), size=size, p=self.weights)]

    @property
    def mean(self) -> np.ndarray:
        return np.tensordot(self.weights, self.matrices, axes=(0, 0))

    @property
    def sigma(self) -> float:
        """``sqrt(E ||H - Hbar||_2^2)`` with the Hilbert-Schmidt norm."""
        dev = self.matrices - self.mean[None]
        return math.sqrt(float(np.dot(self.weights, [hs_norm(x) ** 2 for x in dev])))

    @property
    def norm_bound(self) -> float:
        return float(np.max(spectral_norms(self.matrices)))


def _ensemble_moments(ensemble, seed: int, draws: int = 10_000):
    if isinstance(ensemble, DiscreteEnsemble):
        return ensemble.mean, ensemble.sigma, ensemble.norm_bound
    rng = np.random.default_rng([seed, 2**32 - 1])
    xs = ensemble.sample(rng, draws)
    mean = xs.mean(axis=0)
    sigma = math.sqrt(float(np.mean([hs_norm(x - mean) ** 2 for x in xs])))
    return mean, sigma, float(np.max(spectral_norms(xs)))


def random_trotter_value(sigma: float, m: float, n: int, t: float, epsilon: float) -> float:
    """``(1/eps)(sigma/(M sqrt(n)) + 2/n) t M (1 + 2tM)``."""
    if m == 0:
        return 0.0
    return (sigma / (m * math.sqrt(n)) + 2 / n) * t * m * (1 + 2 * t * m) / epsilon


def random_trotter_bound(ensemble, n: int, t: float, epsilon: float | None = None, trials: int = 200,
                         seed: int = 0) -> BoundReport:
    """Tail frequency of ``||W_n(t) - exp(-itHbar)|| > eps`` over seeded random products.

    Each trial draws its ``n`` factors from ``default_rng([seed, trial])``.
    ``ensemble`` is a :class:`DiscreteEnsemble` or any object with
    ``sample(rng, size)``; for the latter the mean, variance and norm bound
    are estimated from 10^4 draws.

    ``actual`` is the empirical frequency and ``bound_value`` the Markov
    tail bound; ``est_error`` is a 3-sigma binomial margin. ``epsilon``
    defaults to twice the median error.
    """
    n, trials = int(n), int(trials)
    if n < 1 or trials < 1:
        raise EmptySequence("n and trials must be positive")
    hbar, sigma, m = _ensemble_moments(ensemble, seed)
    target = expm_hermitian(hbar, t)
    errors = np.empty(trials)
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        errors[k] = spectral_norm(trotter_product(ensemble.sample(rng, n), t) - target)
    median = float(np.median(errors))
    eps = 2 * median if epsilon is None else float(epsilon)
    freq = float(np.mean(errors > eps))
    if eps > 0:
        rhs = random_trotter_value(sigma, m, n, t, eps)
    else:
        rhs = math.inf if sigma > 0 else 0.0
    q = min(rhs, 1.0)
    margin = 3 * math.sqrt(q * (1 - q) / trials)
    return BoundReport(
        "random_trotter", rhs, freq,
        params={"n": n, "t": t, "epsilon": eps, "trials": trials, "seed": seed, "sigma": sigma, "M": m},
        grid_info={"factors": n},
        est_error=margin,
        extra={"median_error": median, "mean_error": float(np.mean(errors)), "max_error": float(np.max(errors))},
    )


# ---------------------------------------------------------------------------
# unitary kicks and decoupling


def _kick_period(vs: np.ndarray) -> int | None:
    """Smallest ``p`` with ``V_{j+p} = V_j`` across the supplied products."""
    total = len(vs)
    for p in range(1, total // 2 + 1):
        if np.allclose(vs[p:], vs[:-p], rtol=0, atol=PERIOD_TOL):
            return p
    return None


def _factor_system(v: np.ndarray, system_dim: int) -> np.ndarray | None:
    """``v_S`` with ``V = v_S (x) 1``, or ``None`` if ``V`` has no such form."""
    d = v.shape[0]
    if d % system_dim:
        return None
    de = d // system_dim
    vs = v.reshape(system_dim, de, system_dim, de)[:, 0, :, 0]
    return vs if np.allclose(np.kron(vs, np.eye(de)), v, atol=1e-10) else None


def group_average_holds(cycle: Sequence, system_dim: int | None = None, tol: float = 1e-10) -> bool:
    """Whether ``(1/p) sum_j v_j^dag h v_j = tr(h)/d`` for every system operator ``h``.

    Checked on the matrix-unit basis. With ``system_dim`` the kicks must
    have the form ``v_j (x) 1``.
    """
    cycle = [as_matrix(v) for v in cycle]
    ds = system_dim or cycle[0].shape[0]
    vs = [_factor_system(v, ds) for v in cycle]
    if any(v is None for v in vs):
        return False
    eye = np.eye(ds)
    for a in range(ds):
        for b in range(ds):
            e = np.zeros((ds, ds), dtype=complex)
            e[a, b] = 1.0
            avg = sum(dagger(v) @ e @ v for v in vs) / len(vs)
            if not np.allclose(avg, (a == b) / ds * eye, atol=tol):
                return False
    return True


def kicks_bound(h, kicks, n: int, t: float, cycle: bool = False, limit=None,
                system_dim: int | None = None) -> BoundReport:
    """Evolution under ``H`` interrupted by unitary kicks against ``V_{n+1} exp(-itHbar)``.

    Parameters
    ----------
    kicks : sequence of unitaries or callable
        ``cycle=False``: the kicks ``U_1, ..., U_{n+1}`` (or ``j -> U_j``),
        giving ``W_n(t) = U_{n+1} e^{-i(t/n)H} U_n ... e^{-i(t/n)H} U_1``.
        ``cycle=True``: a decoupling cycle ``(V_1, ..., V_p)``; the product
        ``(V_p^dag e^{-i(t/np)H} V_p ... V_1^dag e^{-i(t/np)H} V_1)^n`` is
        compared with ``exp(-itHbar)``.
    limit : array_like, optional
        Declared ergodic mean of ``V_j^dag H V_j``. Without it the cycle mean
        is used; in the sequence case a period of ``V_j`` is searched for.
    system_dim : int, optional
        Dimension of the kicked factor when ``V_j = v_j (x) 1``; used for the
        group-average check.

    Raises
    ------
    NotUnitary
        If a kick is not unitary.
    NoErgodicLimit
        If no limit is declared and the kick products are not periodic.
    """
    hm = require_hermitian(h)
    n = int(n)
    if n < 1:
        raise EmptySequence("n must be at least 1")
    norm_h = spectral_norm(hm)
    extra = {}
    if cycle:
        vs = _stack(kicks, len(kicks), "kicks")
        for v in vs:
            require_unitary(v)
        p = len(vs)
        conj = dagger(vs) @ hm[None] @ vs
        hbar = conj.mean(axis=0) if limit is None else as_matrix(limit)
        e = expm_hermitian(hm, t / (n * p))
        one = np.eye(hm.shape[0], dtype=complex)
        for v in vs:
            one = dagger(v) @ e @ v @ one
        w = np.linalg.matrix_power(one, n)
        actual = spectral_norm(w - expm_hermitian(hbar, t))
        seq = np.tile(conj, (n, 1, 1))
        bound = periodic_trotter_value(norm_h, n, p, t)
        twirl = group_average_holds(vs, system_dim)
        if twirl and system_dim in (None, hm.shape[0]):
            expected = np.trace(hm) / hm.shape[0] * np.eye(hm.shape[0])
            if not np.allclose(hbar, expected, atol=1e-10):
                raise BoundViolation("group average property holds but the cycle mean is not tr(H)/d")
        extra["group_average"] = twirl
        extra["ergodic_bound"] = ergodic_trotter_value(ergodic_deviation(seq, hbar), norm_h, n * p, t)
        name = "decoupling"
    else:
        us = _stack(kicks, n + 1, "kicks")
        for u in us:
            require_unitary(u)
        vs = chain_unitaries(us, np.arange(1, n + 2))
        seq = dagger(vs[:n]) @ hm[None] @ vs[:n]
        if limit is None:
            p = _kick_period(vs)
            if p is None:
                raise NoErgodicLimit("kick products are not periodic and no limit was declared")
            hbar = seq[:p].mean(axis=0)
            extra["detected_period"] = p
        else:
            hbar = as_matrix(limit)
        e = expm_hermitian(hm, t / n)
        factors = np.empty((2 * n + 1,) + hm.shape, dtype=complex)
        factors[0::2] = us
        factors[1::2] = e
        w = chain_unitaries(factors, [2 * n + 1])[0]
        actual = spectral_norm(w - vs[n] @ expm_hermitian(hbar, t))
        mn = ergodic_deviation(seq, hbar)
        bound = ergodic_trotter_value(mn, norm_h, n, t)
        extra["M_n"] = mn
        p = extra.get("detected_period")
        name = "kicks"
    return BoundReport(
        name, bound, actual,
        params={"n": n, "t": t, "p": p, "H_norm": norm_h},
        grid_info={"factors": len(seq)},
        est_error=64 * len(seq) * np.finfo(float).eps,
        extra=extra | {"hbar": hbar},
    )


def bangbang_value(m: int, eta: float, norm_h: float, n: int, t: float) -> float:
    """``(2/n)(sqrt(m)/eta + 1) t ||H|| (1 + 2t||H||)``."""
    lead = 0.0 if m == 1 else math.sqrt(m) / eta
    return 2 / n * (lead + 1) * t * norm_h * (1 + 2 * t * norm_h)


def bangbang_bound(h, u, n: int, t: float) -> BoundReport:
    """``||(U e^{-i(t/n)H})^n - U^n e^{-itH_Z}||`` with ``H_Z`` from the spectral projections of ``U``.

    ``extra["limit_commutator"]`` is the largest ``||[U^l e^{-i(lt/n)H_Z}, P_k]||``
    over all checkpoints ``l = 0..n``; ``extra["sup_checkpoints"]`` the
    largest distance over the same checkpoints.
    """
    hm = require_hermitian(h)
    um = require_unitary(u)
    n = int(n)
    dec = spectral_decompose(um, kind="unitary")
    hz = zeno_hamiltonian(hm, dec)
    norm_h = spectral_norm(hm)
    stops = np.arange(0, n + 1)
    step = um @ expm_hermitian(hm, t / n)
    w = chain_unitaries(np.broadcast_to(step, (n,) + hm.shape), stops)
    lim_step = um @ expm_hermitian(hz, t / n)
    v = chain_unitaries(np.broadcast_to(lim_step, (n,) + hm.shape), stops)
    dist = spectral_norms(w - v)
    comm = max(float(np.max(spectral_norms(commutator(v, p[None])))) for p in dec.projections)
    bound = bangbang_value(dec.m, dec.eta, norm_h, n, t)
    return BoundReport(
        "bangbang", bound, float(dist[-1]),
        params={"n": n, "t": t, "m": dec.m, "eta": dec.eta, "H_norm": norm_h},
        grid_info={"factors": n},
        est_error=64 * n * np.finfo(float).eps,
        extra={"hz": hz, "hz_norm": spectral_norm(hz), "limit_commutator": comm,
               "sup_checkpoints": float(np.max(dist))},
    )


# ---------------------------------------------------------------------------
# generalized Trotter formula


def gtf_g(x):
    """``g(x) = 2|1 + ix - e^{ix}| / |(e^{ix} - 1) x|``, continued by ``g(0) = 1``."""
    x = np.asarray(x, dtype=float)
    xs = np.where(x == 0, 1.0, x)
    half = np.sin(0.5 * xs)
    # x - sin x without cancellation: Taylor series below 0.5
    x2 = xs * xs
    series = xs * x2 / 6 * (1 - x2 / 20 * (1 - x2 / 42 * (1 - x2 / 72 * (1 - x2 / 110))))
    odd = np.where(np.abs(xs) < 0.5, series, xs - np.sin(xs))
    val = np.hypot(2 * half**2, odd) / np.abs(half * xs)
    val = np.where(x == 0, 1.0, val)
    return float(val) if val.ndim == 0 else val


def gtf_g_cap(x):
    """``2/(2 pi - x) + 1 - 1/pi``, an upper bound for :func:`gtf_g` on ``(0, 2 pi)``."""
    return 2 / (2 * np.pi - np.asarray(x, dtype=float)) + 1 - 1 / np.pi


def gtf_value(m: int, g: float, norm_h1: float, n: int, t: float) -> float:
    """``(1/n)[sqrt(m) g + 2] t ||H_1|| (1 + 2t||H_1||)``."""
    return (math.sqrt(m) * g + 2) / n * t * norm_h1 * (1 + 2 * t * norm_h1)


def gtf_bound(h0, h1, n: int, kappa: float, t: float, theta: float | None = None) -> BoundReport:
    """``(e^{-i(t/n)kH_0} e^{-i(t/n)H_1})^n`` against ``e^{-it(kH_0 + H_1)}``.

    ``theta`` defaults to ``k eta t / n``, the smallest admissible value.
    ``extra["sup_checkpoints"]`` is the largest distance after ``l = 1..n``
    steps, each compared with ``e^{-i(lt/n)(kH_0 + H_1)}``.

    Raises
    ------
    KappaTooLarge
        If ``k > theta n / (eta t)`` or ``theta`` is outside ``(0, 2 pi)``.
    """
    h0m, h1m = require_hermitian(h0), require_hermitian(h1)
    n = int(n)
    dec = spectral_decompose(h0m)
    eta = dec.eta if dec.m > 1 else math.inf
    if theta is None:
        theta = kappa * eta * t / n if dec.m > 1 else 1.0
    if not 0 < theta < 2 * np.pi:
        raise KappaTooLarge(f"theta={theta} must lie in (0, 2 pi)")
    if dec.m > 1 and kappa > theta * n / (eta * t) * (1 + 1e-12):
        raise KappaTooLarge(f"kappa={kappa} exceeds theta n/(eta t)={theta * n / (eta * t)}")
    g = gtf_g(theta)
    if g > gtf_g_cap(theta) + 1e-12:
        raise BoundViolation(f"g({theta})={g} exceeds its cap")
    norm_h1 = spectral_norm(h1m)
    step = expm_hermitian(kappa * h0m, t / n) @ expm_hermitian(h1m, t / n)
    w = chain_unitaries(np.broadcast_to(step, (n,) + h0m.shape), np.arange(1, n + 1))
    wv, vv = np.linalg.eigh(kappa * h0m + h1m)
    ls = np.arange(1, n + 1) * (t / n)
    exact = (vv[None] * np.exp(-1j * np.outer(ls, wv))[:, None, :]) @ dagger(vv)[None]
    dist = spectral_norms(w - exact)
    return BoundReport(
        "gtf", gtf_value(dec.m, g, norm_h1, n, t), float(dist[-1]),
        params={"n": n, "kappa": kappa, "t": t, "theta": theta, "m": dec.m, "eta": dec.eta, "H1_norm": norm_h1},
        grid_info={"factors": n},
        est_error=64 * n * np.finfo(float).eps * max(1.0, kappa * t / n),
        extra={"g": g, "g_cap": float(gtf_g_cap(theta)), "sup_checkpoints": float(np.max(dist))},
    )
