"""Time-dependent Hamiltonians, their norms, actions and frame changes.

A Hamiltonian is one of four forms:

``Constant``
    A fixed Hermitian matrix.
``TermSum``
    ``sum_k f_k(t) A_k`` with real scalar envelopes ``f_k`` and Hermitian ``A_k``.
``PiecewiseConstant``
    Values on right-open intervals ``[t_j, t_{j+1})``, optionally periodic.
``Sampler``
    Any callable returning a Hermitian matrix, with a declared smoothness.

Time-domain norms follow the conventions ``||H||_{1,t} = int_0^t ||H(s)|| ds``
and ``||H||_{inf,t} = sup_{s<=t} ||H(s)||`` with the spectral norm.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import cumulative_simpson

from . import _expr
from .errors import DimMismatch, OutOfSchedule, SmoothnessUnavailable
from .linalg import as_matrix, commutator, dagger, pauli, require_hermitian, spectral_norm, spectral_norms

DEFAULT_PANELS = 2048
MAX_PANELS = 2**21


# ---------------------------------------------------------------------------
# envelopes


class Envelope:
    """Real scalar time profile used by :class:`TermSum`.

    Parameters
    ----------
    func : callable
        Vectorized ``f(t)``.
    derivatives : sequence of callable, optional
        ``f'``, ``f''``, ... as far as known.
    antiderivative : callable, optional
        Any ``F`` with ``F' = f``; enables exact action integrals.
    smoothness : float
        Number of continuous derivatives (``inf`` for analytic profiles).
    breakpoints : sequence of float
        Times where ``f`` or a low derivative jumps; integrators step to them.
    """

    def __init__(
        self,
        func: Callable,
        derivatives: Sequence[Callable] = (),
        antiderivative: Callable | None = None,
        smoothness: float = math.inf,
        breakpoints: Sequence[float] = (),
        label: str = "",
    ):
        self.func = func
        self.derivatives = tuple(derivatives)
        self.antiderivative = antiderivative
        self.smoothness = smoothness
        self.breakpoints = tuple(float(b) for b in breakpoints)
        self.label = label

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(np.asarray(self.func(t), dtype=float), t.shape)

    def __repr__(self):
        return f"Envelope({self.label or self.func!r})"

    def derivative(self, k: int) -> Callable:
        """The ``k``-th derivative, finite-differenced past the supplied ones.

        Raises
        ------
        SmoothnessUnavailable
            If ``k`` exceeds the declared smoothness.
        """
        if k == 0:
            return self
        if k > self.smoothness:
            raise SmoothnessUnavailable(f"envelope is only C^{self.smoothness}; derivative {k} requested")
        if k <= len(self.derivatives):
            d = self.derivatives[k - 1]
            return lambda t: np.broadcast_to(np.asarray(d(np.asarray(t, float)), float), np.shape(t))
        prev = self.derivative(k - 1)
        h = 1e-4

        def fd(t):
            t = np.asarray(t, dtype=float)
            return (prev(t + h) - prev(t - h)) / (2 * h)

        return fd

    # constructors ---------------------------------------------------------

    @classmethod
    def constant(cls, c: float) -> "Envelope":
        c = float(c)
        return cls(
            lambda t: np.full(np.shape(t), c),
            derivatives=[lambda t: np.zeros(np.shape(t))] * 4,
            antiderivative=lambda t: c * np.asarray(t, float),
            label=repr(c),
        )

    @classmethod
    def cosine(cls, amplitude: float, omega: float, phase: float = 0.0) -> "Envelope":
        """``amplitude * cos(omega t + phase)``."""
        a, w, p = float(amplitude), float(omega), float(phase)
        derivs = [
            lambda t, k=k: a * w**k * np.cos(w * np.asarray(t, float) + p + k * np.pi / 2)
            for k in range(1, 6)
        ]
        anti = None
        if w != 0:
            anti = lambda t: a / w * np.sin(w * np.asarray(t, float) + p)  # noqa: E731
        else:
            anti = lambda t: a * np.cos(p) * np.asarray(t, float)  # noqa: E731
        return cls(
            lambda t: a * np.cos(w * np.asarray(t, float) + p),
            derivatives=derivs,
            antiderivative=anti,
            label=f"{a}*cos({w}*t+{p})",
        )

    @classmethod
    def sine(cls, amplitude: float, omega: float, phase: float = 0.0) -> "Envelope":
        """``amplitude * sin(omega t + phase)``."""
        return cls.cosine(amplitude, omega, phase - np.pi / 2)

    @classmethod
    def steps(cls, times: Sequence[float], values: Sequence[float]) -> "Envelope":
        """Piecewise-constant profile, ``values[j]`` on ``[times[j], times[j+1])``."""
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if len(times) != len(values) + 1 or np.any(np.diff(times) <= 0):
            raise ValueError("need increasing times with one more entry than values")
        cum = np.concatenate([[0.0], np.cumsum(values * np.diff(times))])

        def f(t):
            t = np.asarray(t, dtype=float)
            j = np.clip(np.searchsorted(times, t, side="right") - 1, 0, len(values) - 1)
            return values[j]

        def anti(t):
            t = np.asarray(t, dtype=float)
            j = np.clip(np.searchsorted(times, t, side="right") - 1, 0, len(values) - 1)
            return cum[j] + values[j] * (t - times[j])

        env = cls(f, antiderivative=anti, smoothness=-1, breakpoints=times[1:-1], label="steps")
        env.step_times = times
        env.step_values = values
        return env

    # algebra --------------------------------------------------------------

    def __mul__(self, other: "Envelope | float") -> "Envelope":
        if not isinstance(other, Envelope):
            c = float(other)
            return Envelope(
                lambda t: c * self(t),
                derivatives=[lambda t, d=d: c * np.asarray(d(t), float) for d in self.derivatives],
                antiderivative=None if self.antiderivative is None else (lambda t: c * self.antiderivative(t)),
                smoothness=self.smoothness,
                breakpoints=self.breakpoints,
                label=f"{c}*{self.label}",
            )
        a, b = self, other
        n = min(len(a.derivatives), len(b.derivatives))
        fa = [a] + [a.derivative(k) for k in range(1, n + 1)]
        fb = [b] + [b.derivative(k) for k in range(1, n + 1)]

        def leibniz(k):
            return lambda t: sum(math.comb(k, j) * fa[j](t) * fb[k - j](t) for j in range(k + 1))

        return Envelope(
            lambda t: a(t) * b(t),
            derivatives=[leibniz(k) for k in range(1, n + 1)],
            smoothness=min(a.smoothness, b.smoothness),
            breakpoints=sorted(set(a.breakpoints) | set(b.breakpoints)),
            label=f"({a.label})*({b.label})",
        )

    __rmul__ = __mul__

    def time_scaled(self, kappa: float) -> "Envelope":
        """``t -> f(kappa t)``."""
        k = float(kappa)
        return Envelope(
            lambda t: self(k * np.asarray(t, float)),
            derivatives=[lambda t, d=d, j=j: k ** (j + 1) * np.asarray(d(k * np.asarray(t, float)), float)
                         for j, d in enumerate(self.derivatives)],
            antiderivative=None if self.antiderivative is None
            else (lambda t: self.antiderivative(k * np.asarray(t, float)) / k),
            smoothness=self.smoothness,
            breakpoints=[b / k for b in self.breakpoints],
            label=f"{self.label}@{k}t",
        )


def _as_envelope(f) -> Envelope:
    if isinstance(f, Envelope):
        return f
    if np.isscalar(f):
        return Envelope.constant(float(f))
    if callable(f):
        return Envelope(f, smoothness=0)
    raise TypeError(f"cannot use {f!r} as an envelope")


# ---------------------------------------------------------------------------
# Hamiltonian forms


class TimeDepHamiltonian:
    """Base class; subclasses implement :meth:`eval_many`."""

    dim: int
    smoothness: float = math.inf

    def eval(self, t: float) -> np.ndarray:
        """Hamiltonian at time ``t``."""
        return self.eval_many(np.array([float(t)]))[0]

    def __call__(self, t: float) -> np.ndarray:
        return self.eval(t)

    def eval_many(self, ts) -> np.ndarray:
        raise NotImplementedError

    def breakpoints(self, t_end: float) -> np.ndarray:
        """Discontinuity times in ``(0, t_end)``."""
        return np.zeros(0)

    def time_scaled(self, kappa: float) -> "TimeDepHamiltonian":
        """The Hamiltonian ``t -> H(kappa t)``."""
        k = float(kappa)
        return Sampler(lambda ts: self.eval_many(k * np.asarray(ts)), self.dim, smoothness=self.smoothness,
                       vectorized=True, breakpoints=lambda te: self.breakpoints(k * te) / k)

    def derivative(self) -> "TimeDepHamiltonian":
        """Time derivative, by central differences unless a subclass knows better."""
        if self.smoothness < 1:
            raise SmoothnessUnavailable("Hamiltonian is not differentiable")
        h = 1e-5

        def f(ts):
            ts = np.asarray(ts, dtype=float)
            return (self.eval_many(ts + h) - self.eval_many(ts - h)) / (2 * h)

        return Sampler(f, self.dim, smoothness=self.smoothness - 1, vectorized=True, check=False)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = _lift(other, self.dim)
        if other.dim != self.dim:
            raise DimMismatch("cannot add Hamiltonians of different dimension")
        return _add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-_lift(other, self.dim))

    def __rsub__(self, other):
        return _lift(other, self.dim) + (-self)

    def __mul__(self, c):
        if not np.isscalar(c) or np.iscomplexobj(c):
            return NotImplemented
        c = float(c)
        return Sampler(lambda ts: c * self.eval_many(ts), self.dim, smoothness=self.smoothness,
                       vectorized=True, breakpoints=self.breakpoints, check=False)

    __rmul__ = __mul__


class Constant(TimeDepHamiltonian):
    """Time-independent Hamiltonian."""

    def __init__(self, matrix):
        self.matrix = require_hermitian(matrix)
        self.dim = self.matrix.shape[0]

    def __repr__(self):
        return f"Constant(dim={self.dim})"

    def eval_many(self, ts):
        n = len(np.atleast_1d(ts))
        return np.broadcast_to(self.matrix, (n,) + self.matrix.shape).copy()

    def integral(self, t):
        return np.asarray(t, float)[..., None, None] * self.matrix

    def time_scaled(self, kappa):
        return Constant(self.matrix)

    def derivative(self):
        return Constant(np.zeros_like(self.matrix))

    def __mul__(self, c):
        if not np.isscalar(c) or np.iscomplexobj(c):
            return NotImplemented
        return Constant(float(c) * self.matrix)

    __rmul__ = __mul__


class TermSum(TimeDepHamiltonian):
    """``H(t) = sum_k f_k(t) A_k``.

    Parameters
    ----------
    terms : sequence of (envelope, operator)
        Envelopes may be :class:`Envelope`, plain callables or numbers.
    """

    def __init__(self, terms):
        terms = list(terms)
        if not terms:
            raise ValueError("TermSum needs at least one term")
        self.envelopes = [_as_envelope(f) for f, _ in terms]
        self.ops = [require_hermitian(a) for _, a in terms]
        dims = {a.shape[0] for a in self.ops}
        if len(dims) != 1:
            raise DimMismatch("term operators have different dimensions")
        self.dim = dims.pop()
        self.smoothness = min(e.smoothness for e in self.envelopes)
        self._stack = np.stack(self.ops)

    def __repr__(self):
        return f"TermSum({len(self.ops)} terms, dim={self.dim})"

    @property
    def terms(self):
        return list(zip(self.envelopes, self.ops))

    def eval_many(self, ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        coeffs = np.stack([e(ts) for e in self.envelopes], axis=1)
        return np.tensordot(coeffs, self._stack, axes=(1, 0))

    def breakpoints(self, t_end):
        b = sorted({x for e in self.envelopes for x in e.breakpoints if 0 < x < t_end})
        return np.asarray(b, dtype=float)

    @property
    def has_antiderivative(self) -> bool:
        return all(e.antiderivative is not None for e in self.envelopes)

    @property
    def is_commuting(self) -> bool:
        """Whether all term operators commute pairwise."""
        for i in range(len(self.ops)):
            for j in range(i + 1, len(self.ops)):
                c = commutator(self.ops[i], self.ops[j])
                if np.max(np.abs(c)) > 1e-12 * max(1.0, np.max(np.abs(self.ops[i])) * np.max(np.abs(self.ops[j]))):
                    return False
        return True

    def integral(self, t):
        """Exact ``int_0^t H(s) ds`` (requires antiderivatives)."""
        if not self.has_antiderivative:
            raise ValueError("not all envelopes have antiderivatives")
        t = np.atleast_1d(np.asarray(t, dtype=float))
        coeffs = np.stack([e.antiderivative(t) - e.antiderivative(0.0) for e in self.envelopes], axis=1)
        return np.tensordot(coeffs, self._stack, axes=(1, 0))

    def time_scaled(self, kappa):
        return TermSum([(e.time_scaled(kappa), a) for e, a in zip(self.envelopes, self.ops)])

    def derivative(self):
        return TermSum([(Envelope(e.derivative(1), smoothness=e.smoothness - 1,
                                  derivatives=e.derivatives[1:]), a)
                        for e, a in zip(self.envelopes, self.ops)])

    def __mul__(self, c):
        if not np.isscalar(c) or np.iscomplexobj(c):
            return NotImplemented
        return TermSum([(e * float(c), a) for e, a in zip(self.envelopes, self.ops)])

    __rmul__ = __mul__


class PiecewiseConstant(TimeDepHamiltonian):
    """Piecewise-constant Hamiltonian on right-open intervals.

    Parameters
    ----------
    times : sequence of float
        Breakpoints ``0 = t_0 < t_1 < ... < t_N``.
    values : sequence of matrix
        ``values[j]`` applies on ``[t_j, t_{j+1})``.
    periodic : bool
        Repeat the schedule with period ``t_N`` instead of ending there.
    """

    smoothness = -1

    def __init__(self, times, values, periodic: bool = False):
        self.times = np.asarray(times, dtype=float)
        self.values = np.stack([require_hermitian(v) for v in values])
        if self.times.ndim != 1 or len(self.times) != len(self.values) + 1:
            raise ValueError("need one more time than values")
        if self.times[0] != 0 or np.any(np.diff(self.times) <= 0):
            raise ValueError("times must start at 0 and increase strictly")
        self.dim = self.values.shape[1]
        self.periodic = bool(periodic)
        self.period = float(self.times[-1])
        self._cum = np.concatenate([np.zeros((1, self.dim, self.dim), complex),
                                    np.cumsum(self.values * np.diff(self.times)[:, None, None], axis=0)])

    def __repr__(self):
        return f"PiecewiseConstant({len(self.values)} pieces, periodic={self.periodic})"

    def _locate(self, ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if np.any(ts < 0):
            raise OutOfSchedule("negative time")
        if self.periodic:
            n_per = np.floor(ts / self.period)
            local = ts - n_per * self.period
        else:
            if np.any(ts >= self.period):
                raise OutOfSchedule(f"time beyond the last breakpoint {self.period}")
            n_per = np.zeros_like(ts)
            local = ts
        j = np.clip(np.searchsorted(self.times, local, side="right") - 1, 0, len(self.values) - 1)
        return n_per, local, j

    def eval_many(self, ts):
        _, _, j = self._locate(ts)
        return self.values[j].copy()

    def integral(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if not self.periodic and np.any(t > self.period):
            raise OutOfSchedule(f"time beyond the last breakpoint {self.period}")
        if self.periodic:
            n_per = np.floor(t / self.period)
            local = t - n_per * self.period
        else:
            n_per = np.zeros_like(t)
            local = t
        j = np.clip(np.searchsorted(self.times, local, side="right") - 1, 0, len(self.values) - 1)
        return (n_per[:, None, None] * self._cum[-1] + self._cum[j]
                + (local - self.times[j])[:, None, None] * self.values[j])

    def breakpoints(self, t_end):
        inner = self.times[1:]
        if not self.periodic:
            pts = inner
        else:
            reps = int(np.ceil(t_end / self.period)) + 1
            pts = (np.arange(reps)[:, None] * self.period + inner[None, :]).ravel()
            pts = np.concatenate([pts, np.arange(reps) * self.period])
        pts = np.unique(pts)
        return pts[(pts > 0) & (pts < t_end)]

    def piece_norms(self) -> np.ndarray:
        return spectral_norms(self.values, hermitian=True)

    def time_scaled(self, kappa):
        return PiecewiseConstant(self.times / float(kappa), self.values, self.periodic)

    def __mul__(self, c):
        if not np.isscalar(c) or np.iscomplexobj(c):
            return NotImplemented
        return PiecewiseConstant(self.times, float(c) * self.values, self.periodic)

    __rmul__ = __mul__


class Sampler(TimeDepHamiltonian):
    """Hamiltonian given by a callable.

    Parameters
    ----------
    func : callable
        ``func(t) -> (d, d)`` array, or ``func(ts) -> (n, d, d)`` when
        ``vectorized`` is true.
    dim : int
    smoothness : float
        Declared number of continuous derivatives.
    breakpoints : callable or sequence, optional
        Discontinuity times, or a function of ``t_end`` returning them.
    check : bool
        Verify Hermiticity on first evaluation.
    """

    def __init__(self, func, dim: int, smoothness: float = 0, vectorized: bool = False,
                 breakpoints=None, check: bool = True):
        self.func = func
        self.dim = int(dim)
        self.smoothness = smoothness
        self.vectorized = vectorized
        self._bp = breakpoints
        self._check = check

    def __repr__(self):
        return f"Sampler(dim={self.dim}, smoothness={self.smoothness})"

    def eval_many(self, ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if self.vectorized:
            out = np.asarray(self.func(ts), dtype=complex)
        else:
            out = np.stack([np.asarray(self.func(float(t)), dtype=complex) for t in ts]) if len(ts) else \
                np.zeros((0, self.dim, self.dim), complex)
        if out.shape != (len(ts), self.dim, self.dim):
            raise DimMismatch(f"sampler returned shape {out.shape}")
        if self._check and len(ts):
            require_hermitian(out[0])
            self._check = False
        return out

    def breakpoints(self, t_end):
        if self._bp is None:
            return np.zeros(0)
        pts = self._bp(t_end) if callable(self._bp) else self._bp
        pts = np.asarray(pts, dtype=float)
        return pts[(pts > 0) & (pts < t_end)]


def _lift(x, dim) -> TimeDepHamiltonian:
    if isinstance(x, TimeDepHamiltonian):
        return x
    if np.isscalar(x):
        return Constant(float(x) * np.eye(dim))
    return Constant(x)


def _add(a: TimeDepHamiltonian, b: TimeDepHamiltonian) -> TimeDepHamiltonian:
    if isinstance(a, Constant) and isinstance(b, Constant):
        return Constant(a.matrix + b.matrix)
    if isinstance(a, (Constant, TermSum)) and isinstance(b, (Constant, TermSum)):
        terms = []
        for h in (a, b):
            terms += h.terms if isinstance(h, TermSum) else [(Envelope.constant(1.0), h.matrix)]
        return TermSum(terms)
    if isinstance(a, PiecewiseConstant) and isinstance(b, Constant):
        return PiecewiseConstant(a.times, a.values + b.matrix, a.periodic)
    if isinstance(b, PiecewiseConstant) and isinstance(a, Constant):
        return _add(b, a)
    if (isinstance(a, PiecewiseConstant) and isinstance(b, PiecewiseConstant)
            and a.periodic == b.periodic and np.array_equal(a.times, b.times)):
        return PiecewiseConstant(a.times, a.values + b.values, a.periodic)
    return Sampler(lambda ts: a.eval_many(ts) + b.eval_many(ts), a.dim,
                   smoothness=min(a.smoothness, b.smoothness), vectorized=True,
                   breakpoints=lambda te: np.union1d(a.breakpoints(te), b.breakpoints(te)), check=False)


def integral_of(h: TimeDepHamiltonian):
    """Exact antiderivative ``t -> int_0^t H`` when the form provides one, else ``None``."""
    if isinstance(h, (Constant, PiecewiseConstant)):
        return h.integral
    if isinstance(h, TermSum) and h.has_antiderivative:
        return h.integral
    return None


# ---------------------------------------------------------------------------
# time windows


@dataclass(frozen=True)
class TimeWindow:
    """The interval ``[0, t_end]`` with a uniform checkpoint grid."""

    t_end: float
    grid_points: int = 1001

    def __post_init__(self):
        if not (self.t_end > 0 and np.isfinite(self.t_end)):
            raise ValueError("t_end must be positive and finite")
        if int(self.grid_points) < 2:
            raise ValueError("need at least two grid points")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, float(self.t_end), int(self.grid_points))

    def refined(self, factor: int) -> "TimeWindow":
        return TimeWindow(self.t_end, (int(self.grid_points) - 1) * int(factor) + 1)


# ---------------------------------------------------------------------------
# quadrature helpers


def _segments(t_end, breakpoints):
    pts = np.concatenate([[0.0], np.asarray(breakpoints, float), [float(t_end)]])
    return np.unique(pts)


def _simpson_nodes(edges, panels):
    """Nodes and weights of composite Simpson over segments, panels spread by length."""
    lengths = np.diff(edges)
    total = lengths.sum()
    nodes, weights = [], []
    for a, b, ln in zip(edges[:-1], edges[1:], lengths):
        n = max(2, int(np.ceil(panels * ln / total)))
        n += n % 2
        x = np.linspace(a, b, n + 1)
        w = np.ones(n + 1)
        w[1:-1:2] = 4
        w[2:-1:2] = 2
        nodes.append(x)
        weights.append(w * (b - a) / (3 * n))
    return np.concatenate(nodes), np.concatenate(weights)


def _quad(f, t_end, breakpoints=(), panels=DEFAULT_PANELS, adaptive=False, rtol=1e-10, atol=1e-13):
    """Composite Simpson of a (possibly array-valued) function; error from halving."""

    def rule(p):
        x, w = _simpson_nodes(_segments(t_end, breakpoints), p)
        return np.tensordot(w, f(x), axes=(0, 0))

    p = int(panels)
    coarse = rule(p // 2)
    fine = rule(p)
    err = float(np.max(np.abs(fine - coarse))) if np.size(fine) else 0.0
    while adaptive and err > rtol * float(np.max(np.abs(fine))) + atol and p < MAX_PANELS:
        p *= 2
        coarse, fine = fine, rule(p)
        err = float(np.max(np.abs(fine - coarse)))
    return fine, err, p


def norms_at(h: TimeDepHamiltonian, ts) -> np.ndarray:
    """``||H(t)||`` for each ``t``."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if isinstance(h, TermSum) and len(h.ops) == 1:
        return np.abs(h.envelopes[0](ts)) * spectral_norm(h.ops[0])
    return spectral_norms(h.eval_many(ts), hermitian=True)


def _piece_table(h: PiecewiseConstant, t_end):
    """(start, end, norm) for pieces intersecting ``[0, t_end)``."""
    norms = h.piece_norms()
    edges = np.concatenate([[0.0], h.breakpoints(t_end), [float(t_end)]])
    mids = 0.5 * (edges[:-1] + edges[1:])
    _, _, j = h._locate(mids)
    return edges[:-1], edges[1:], norms[j]


# ---------------------------------------------------------------------------
# norms


def lp_norm(h: TimeDepHamiltonian, t_end: float, p: float = 1.0, panels: int = DEFAULT_PANELS,
            full_output: bool = False):
    """``||H||_{p,t} = (int_0^t ||H(s)||^p ds)^(1/p)``; ``p = inf`` gives the sup norm."""
    if p == math.inf:
        return sup_norm(h, TimeWindow(t_end, 1025), full_output=full_output)
    if isinstance(h, Constant):
        val, err = spectral_norm(h.matrix) * t_end ** (1.0 / p), 0.0
    elif isinstance(h, PiecewiseConstant):
        a, b, nrm = _piece_table(h, t_end)
        val, err = float(np.sum((b - a) * nrm**p)) ** (1.0 / p), 0.0
    else:
        raw, err, used = _quad(lambda x: norms_at(h, x) ** p, t_end, h.breakpoints(t_end),
                               panels, adaptive=True, rtol=1e-9)
        raw = float(raw)
        val = raw ** (1.0 / p)
        err = err / (p * max(raw, 1e-300) ** (1 - 1.0 / p)) if p != 1 else err
    if full_output:
        return float(val), {"error": float(err)}
    return float(val)


def l1_norm(h: TimeDepHamiltonian, t_end: float, panels: int = DEFAULT_PANELS, full_output: bool = False):
    """``||H||_{1,t} = int_0^t ||H(s)|| ds``.

    Exact for ``Constant`` and ``PiecewiseConstant``; otherwise composite
    Simpson starting at ``panels`` panels and doubled until the halving
    difference is below a relative ``1e-9``. With ``full_output`` the
    halving difference is returned as ``info["error"]``.
    """
    return lp_norm(h, t_end, 1.0, panels, full_output)


def sup_norm(h: TimeDepHamiltonian, window: TimeWindow, full_output: bool = False):
    """``||H||_{inf,t}`` over the window.

    Piecewise-constant Hamiltonians use the maximum over their pieces. Other
    forms take the maximum on a 4x refined grid, then resample the two cells
    around the peak at 64 points.
    """
    t_end = float(window.t_end)
    if isinstance(h, Constant):
        val, info = spectral_norm(h.matrix), {"grid_points": 1}
    elif isinstance(h, PiecewiseConstant):
        _, _, nrm = _piece_table(h, t_end)
        val, info = float(np.max(nrm)), {"grid_points": len(nrm)}
    else:
        ts = window.refined(4).grid
        vals = norms_at(h, ts)
        k = int(np.argmax(vals))
        lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, len(ts) - 1)]
        local = np.linspace(lo, hi, 65)
        val = float(max(vals[k], np.max(norms_at(h, local))))
        info = {"grid_points": len(ts), "peak_time": float(ts[k])}
    if full_output:
        return float(val), info
    return float(val)


# ---------------------------------------------------------------------------
# actions


def integral_action(h2: TimeDepHamiltonian, h1: TimeDepHamiltonian, t: float, panels: int = DEFAULT_PANELS):
    """``S_21(t) = int_0^t (H_2 - H_1)``.

    Returns
    -------
    S : ndarray
    error : float
        Zero when both Hamiltonians have exact antiderivatives, otherwise
        the Simpson halving difference (spectral norm).
    """
    F2, F1 = integral_of(h2), integral_of(h1)
    if F2 is not None and F1 is not None:
        return (F2(t) - F1(t))[0], 0.0
    bps = np.union1d(h2.breakpoints(t), h1.breakpoints(t))
    val, _, used = _quad(lambda x: h2.eval_many(x) - h1.eval_many(x), t, bps, panels, adaptive=True, rtol=1e-12)
    coarse, _, _ = _quad(lambda x: h2.eval_many(x) - h1.eval_many(x), t, bps, used // 2)
    return val, spectral_norm(val - coarse)


def cumulative_action(f: Callable, grid: np.ndarray, breakpoints=(), min_points: int = 4097,
                      tol: float = 1e-11, max_points: int = 2**22):
    """``int_0^{t_k} f`` at every grid time for a matrix-valued ``f``.

    The integrand is sampled on a refinement of ``grid`` (plus breakpoints)
    and integrated with cumulative Simpson; the refinement doubles until the
    result at the grid times changes by less than ``tol`` relative to its
    size, or stops shrinking because the integrand itself is noisy. Returns
    the stack of integrals and the last change.
    """
    grid = np.asarray(grid, dtype=float)
    factor = max(1, int(np.ceil((min_points - 1) / max(len(grid) - 1, 1))))
    bps = np.asarray(breakpoints, dtype=float)
    bps = bps[(bps > grid[0]) & (bps < grid[-1])]

    def simpson(vals, pts, uniform):
        kw = {"dx": pts[1] - pts[0]} if uniform else {"x": pts}
        # cumulative_simpson casts complex input to real
        cum = cumulative_simpson(vals.real, axis=0, initial=0, **kw)
        if np.iscomplexobj(vals):
            cum = cum + 1j * cumulative_simpson(vals.imag, axis=0, initial=0, **kw)
        return cum

    steps = np.diff(grid)
    uniform_grid = bool(np.allclose(steps, steps[0], rtol=1e-12, atol=0)) if len(steps) else True

    def run(fac):
        # subdivide each grid cell so the grid times are nodes exactly
        fine = np.append((grid[:-1, None] + steps[:, None] * (np.arange(fac) / fac)[None]).ravel(), grid[-1])
        pts = np.union1d(fine, bps)
        cum = simpson(f(pts), pts, uniform=uniform_grid and len(pts) == len(fine))
        return cum[np.searchsorted(pts, grid)]

    cur = run(factor)
    prev_err = math.inf
    while True:
        nxt = run(2 * factor)
        err = float(np.max(spectral_norms(nxt - cur)))
        scale = max(1.0, float(np.max(spectral_norms(nxt))))
        factor *= 2
        cur = nxt
        if (err <= tol * scale or err > 0.5 * prev_err
                or (len(grid) - 1) * factor * 2 + 1 > max_points):
            return cur, err
        prev_err = err


def action_path(h2: TimeDepHamiltonian, h1: TimeDepHamiltonian, grid) -> tuple[np.ndarray, float]:
    """``S_21(t_k)`` at every grid time, with an error estimate."""
    grid = np.asarray(grid, dtype=float)
    F2, F1 = integral_of(h2), integral_of(h1)
    if F2 is not None and F1 is not None:
        return F2(grid) - F1(grid), 0.0
    t_end = grid[-1]
    bps = np.union1d(h2.breakpoints(t_end), h1.breakpoints(t_end))
    return cumulative_action(lambda x: h2.eval_many(x) - h1.eval_many(x), grid, bps)


def average_hamiltonian(h: TimeDepHamiltonian, period: float, panels: int = DEFAULT_PANELS) -> np.ndarray:
    """``(1/tau) int_0^tau H``."""
    F = integral_of(h)
    if F is not None:
        return F(float(period))[0] / period
    val, _, _ = _quad(h.eval_many, period, h.breakpoints(period), panels, adaptive=True, rtol=1e-13)
    return val / period


def rotated_hamiltonian(h: TimeDepHamiltonian, h0: TimeDepHamiltonian, tol: float = 1e-10) -> Sampler:
    """``U_0(t)^† (H(t) - H_0(t)) U_0(t)`` with ``U_0`` generated by ``h0``.

    ``U_0`` is exact for constant ``h0`` and for commuting term sums with
    antiderivatives; otherwise it is integrated and memoized per request.
    """
    from .propagator import FramePropagator

    frame = FramePropagator(h0, tol=tol)
    diff = h - h0

    def f(ts):
        u = frame.at(ts)
        return dagger(u) @ diff.eval_many(ts) @ u

    return Sampler(f, h.dim, smoothness=min(h.smoothness, h0.smoothness), vectorized=True,
                   breakpoints=lambda te: np.union1d(h.breakpoints(te), h0.breakpoints(te)), check=False)


# ---------------------------------------------------------------------------
# JSON schema


def parse_operator(text: str, dim: int | None = None) -> np.ndarray:
    """Constant operator from Pauli shorthand, e.g. ``"1.1*Z"`` or ``"0.5*ZZ - XI"``."""
    h = parse_hamiltonian(text, {})
    if not isinstance(h, Constant):
        raise ValueError(f"operator {text!r} depends on t")
    if dim is not None and h.dim != dim:
        raise DimMismatch(f"operator {text!r} has dimension {h.dim}, expected {dim}")
    return h.matrix


def parse_hamiltonian(text: str, params: dict | None = None) -> TimeDepHamiltonian:
    """Hamiltonian from Pauli shorthand such as ``"0.5*Z + g*cos(w*t)*X"``.

    Each top-level term is a scalar expression times a Pauli string. Terms
    independent of ``t`` are folded into constant terms; the result is a
    :class:`Constant` when nothing depends on ``t``.
    """
    params = params or {}
    const = None
    terms = []
    for term in _expr.split_terms(text):
        coeff, label = _expr.split_pauli_factor(term)
        op = pauli(label)
        if (terms and terms[0][1].shape != op.shape) or (const is not None and const.shape != op.shape):
            raise DimMismatch("terms have different dimensions")
        func, uses_t = _expr.compile_scalar(coeff, params)
        if uses_t:
            terms.append((Envelope(func, label=coeff), op))
        else:
            c = float(func(0.0))
            const = c * op if const is None else const + c * op
    dims = {op.shape[0] for _, op in terms} | ({const.shape[0]} if const is not None else set())
    if len(dims) != 1:
        raise DimMismatch("terms have different dimensions")
    if not terms:
        return Constant(const)
    if const is not None:
        terms.insert(0, (Envelope.constant(1.0), const))
    return TermSum(terms)


def _matrix_from_json(obj) -> np.ndarray:
    if isinstance(obj, str):
        return parse_operator(obj)
    arr = np.asarray(obj, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return as_matrix(arr[..., 0] + 1j * arr[..., 1])
    return as_matrix(arr)


def from_json(obj) -> TimeDepHamiltonian:
    """Build a Hamiltonian from its JSON description.

    Accepted shapes (``obj`` may be a dict or a JSON string)::

        {"expr": "0.5*Z + g*cos(w*t)*X", "params": {"g": 0.1, "w": 100}}
        {"matrix": [[[re, im], ...], ...]}            # or a Pauli string
        {"terms": [{"coeff": "cos(t)", "op": "X"}, ...], "params": {...}}
        {"piecewise": {"times": [...], "values": [...], "periodic": false}}
    """
    if isinstance(obj, str):
        obj = json.loads(obj)
    params = obj.get("params", {})
    if "expr" in obj:
        return parse_hamiltonian(obj["expr"], params)
    if "matrix" in obj:
        return Constant(_matrix_from_json(obj["matrix"]))
    if "terms" in obj:
        terms = []
        for t in obj["terms"]:
            func, _ = _expr.compile_scalar(str(t["coeff"]), params)
            terms.append((Envelope(func, label=str(t["coeff"])), _matrix_from_json(t["op"])))
        return TermSum(terms)
    if "piecewise" in obj:
        pw = obj["piecewise"]
        return PiecewiseConstant(pw["times"], [_matrix_from_json(v) for v in pw["values"]],
                                 periodic=bool(pw.get("periodic", False)))
    raise ValueError("unrecognized Hamiltonian description")


def matrix_to_json(m: np.ndarray) -> list:
    """Dense matrix as nested ``[re, im]`` pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]
