"""Named, parametrized constructions that bind Hamiltonian families to bound evaluators.

Each scenario builds its Hamiltonians from a parameter map and exposes one
or more *bindings*: zero-argument callables returning a
:class:`~actionbound.bounds.BoundReport`. The first binding is the primary
one used by the CLI.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np
from scipy.special import jv

from . import bounds as B
from ._expr import compile_scalar
from .errors import BadParam, UnknownScenario
from .hamiltonian import Constant, Envelope, PiecewiseConstant, TermSum, TimeWindow, parse_operator
from .linalg import PAULI, expm_hermitian, spectral_norm
from .spectral import spectral_decompose

X, Y, Z = PAULI["X"], PAULI["Y"], PAULI["Z"]
I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class Binding:
    """A bound evaluator with all arguments fixed."""

    label: str
    evaluate: Callable[[], B.BoundReport]

    def __call__(self) -> B.BoundReport:
        return self.evaluate()


@dataclass(frozen=True)
class SweepAxis:
    """A parameter to sweep, its scale and five default values."""

    param: str
    scale: str
    values: tuple


@dataclass(frozen=True)
class ScenarioInstance:
    """A scenario built for one parameter set."""

    name: str
    params: Mapping
    hamiltonians: Mapping
    window: TimeWindow | None
    bindings: tuple

    def run(self) -> B.BoundReport:
        """Evaluate the primary binding."""
        return self.bindings[0].evaluate()

    def run_all(self) -> dict:
        return {b.label: b.evaluate() for b in self.bindings}


@dataclass(frozen=True)
class Scenario:
    name: str
    summary: str
    source: str
    default_params: Mapping
    sweep_axes: tuple
    builder: Callable = field(repr=False)

    def axis(self, param: str) -> SweepAxis:
        for ax in self.sweep_axes:
            if ax.param == param:
                return ax
        raise BadParam(f"{param!r} is not a sweep axis of {self.name}; axes: "
                       f"{', '.join(a.param for a in self.sweep_axes)}")


_REGISTRY: dict[str, Scenario] = {}


def _register(name, summary, source, defaults, axes=()):
    def deco(fn):
        _REGISTRY[name] = Scenario(name, summary, source, MappingProxyType(dict(defaults)),
                                   tuple(SweepAxis(*a) for a in axes), fn)
        return fn

    return deco


def _log_values(lo, hi, count=5):
    return tuple(float(v) for v in np.logspace(math.log10(lo), math.log10(hi), count))


# ---------------------------------------------------------------------------
# parameter handling


def _coerce(name, value, default):
    """Cast ``value`` to the type of ``default``; numbers may be expressions such as ``20*pi``."""
    if default is None or isinstance(default, (int, float)) and not isinstance(default, bool):
        if isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(value, bool):
            num = float(value)
        else:
            try:
                num = float(compile_scalar(str(value), {})[0](0.0))
            except Exception as exc:
                raise BadParam(f"parameter {name}={value!r} is not a number") from exc
        if not math.isfinite(num):
            raise BadParam(f"parameter {name}={value!r} is not finite")
        if isinstance(default, int):
            if num != round(num):
                raise BadParam(f"parameter {name}={value!r} must be an integer")
            return int(round(num))
        return num
    if isinstance(default, str):
        return str(value)
    raise BadParam(f"unsupported parameter type for {name}")


def _resolve(scenario: Scenario, params: Mapping | None) -> dict:
    out = dict(scenario.default_params)
    for key, value in (params or {}).items():
        if key not in out:
            raise BadParam(f"unknown parameter {key!r} for {scenario.name}; "
                           f"known: {', '.join(sorted(out))}")
        out[key] = _coerce(key, value, scenario.default_params[key])
    return out


def _positive(p, *names):
    for n in names:
        if not p[n] > 0:
            raise BadParam(f"{n} must be positive, got {p[n]}")


def _operator(p, name, dim=None):
    try:
        return parse_operator(p[name], dim)
    except Exception as exc:
        raise BadParam(f"cannot parse operator {name}={p[name]!r}: {exc}") from exc


def build(name: str, params: Mapping | None = None) -> ScenarioInstance:
    """Construct a registered scenario.

    Raises
    ------
    UnknownScenario
        If ``name`` is not registered.
    BadParam
        If a parameter is unknown, has the wrong type or is out of range.
    """
    if name not in _REGISTRY:
        raise UnknownScenario(f"unknown scenario {name!r}; available: {', '.join(sorted(_REGISTRY))}")
    sc = _REGISTRY[name]
    p = _resolve(sc, params)
    hams, window, bindings = sc.builder(p)
    return ScenarioInstance(name, MappingProxyType(p), MappingProxyType(hams), window, tuple(bindings))


def get(name: str) -> Scenario:
    if name not in _REGISTRY:
        raise UnknownScenario(f"unknown scenario {name!r}; available: {', '.join(sorted(_REGISTRY))}")
    return _REGISTRY[name]


def list_scenarios() -> list[tuple[str, str]]:
    """``(name, one-line description)`` for every scenario, alphabetically."""
    return [(n, f"{_REGISTRY[n].summary} [{_REGISTRY[n].source}]") for n in sorted(_REGISTRY)]


# ---------------------------------------------------------------------------
# shared constructions


def rotating_z_path(t_end: float = 1.0) -> TermSum:
    """``H_0(t) = cos(pi t/T) Z + sin(pi t/T) X``: the eigenbasis turns by ``pi`` over ``[0, T]``."""
    w = math.pi / t_end
    return TermSum([(Envelope.cosine(1.0, w), Z), (Envelope.sine(1.0, w), X)])


def rotating_z_projections(t_end: float = 1.0):
    """Analytic ``(P, dP/dt)`` for :func:`rotating_z_path`, ordered as in ``eigh``."""
    w = math.pi / t_end

    def analytic(ts):
        ts = np.asarray(ts, dtype=float)
        n = np.cos(w * ts)[:, None, None] * Z + np.sin(w * ts)[:, None, None] * X
        dn = w * (-np.sin(w * ts)[:, None, None] * Z + np.cos(w * ts)[:, None, None] * X)
        p = np.stack([0.5 * (I2 - n), 0.5 * (I2 + n)], axis=1)
        dp = np.stack([-0.5 * dn, 0.5 * dn], axis=1)
        return p, dp

    return analytic


def counterexample_hamiltonian(j):
    """``X`` when ``floor(log10 j)`` is even, ``Y`` when it is odd."""
    return X if (len(str(int(j))) - 1) % 2 == 0 else Y


def counterexample_stack(n: int) -> np.ndarray:
    j = np.arange(1, n + 1)
    digits = np.searchsorted(10 ** np.arange(0, 20), j, side="right") - 1
    return np.where((digits % 2 == 0)[:, None, None], X[None], Y[None])


# ---------------------------------------------------------------------------
# registry


@_register("motivating_oscillatory", "commuting pair H and (1 + k cos(k^2 t)) H; action O(1/k)",
           "introductory commutative example", {"kappa": 10.0, "T": 1.0},
           [("kappa", "log", (4.0, 8.0, 16.0, 32.0, 64.0))])
def _motivating_oscillatory(p):
    _positive(p, "kappa", "T")
    k, t_end = p["kappa"], p["T"]
    h1 = Constant(Z)
    h2 = TermSum([(Envelope.constant(1.0), Z), (Envelope.cosine(k, k * k), Z)])
    window = TimeWindow(t_end, int(max(1000, 16 * k * k * t_end)) + 1)
    return {"h1": h1, "h2": h2}, window, [Binding("universal", lambda: B.universal_bound(h1, h2, window))]


@_register("motivating_kicked", "exp(-it(kZ + X)) against exp(-itkZ) in the rotating frame",
           "introductory strong-field example", {"kappa": 100.0, "T": 1.0},
           [("kappa", "log", _log_values(10, 1000))])
def _motivating_kicked(p):
    _positive(p, "kappa", "T")
    k, t_end = p["kappa"], p["T"]
    h1, h2, h0 = Constant(k * Z), Constant(k * Z + X), Constant(k * Z)
    window = TimeWindow(t_end, 1001)
    return {"h1": h1, "h2": h2, "h0": h0}, window, [
        Binding("rotating_frame", lambda: B.rotating_frame_bound(h1, h2, window, h0=h0)),
        Binding("universal", lambda: B.universal_bound(h1, h2, window)),
    ]


@_register("unbounded_l1_example", "k^(1/3) sin(k t) X: L1 norm diverges yet the distance to 1 vanishes",
           "drive with unbounded L1 norm", {"kappa": 1000.0, "T": 1.0},
           [("kappa", "log", _log_values(100, 10000))])
def _unbounded_l1(p):
    _positive(p, "kappa", "T")
    k, t_end = p["kappa"], p["T"]
    h = TermSum([(Envelope.sine(k ** (1 / 3), k), X)])
    zero = Constant(np.zeros((2, 2)))
    window = TimeWindow(t_end, int(max(1000, 4 * k * t_end)) + 1)
    return {"h": h, "limit": zero}, window, [Binding("universal", lambda: B.universal_bound(zero, h, window))]


@_register("periodic_eternal", "Floquet generator tracks a periodic drive uniformly in time",
           "eternal bound for periodic Hamiltonians",
           {"kappa": 50.0, "g": 1.0, "delta": 1.0, "periods": 200},
           [("kappa", "log", (25.0, 50.0, 100.0, 200.0, 400.0))])
def _periodic_eternal(p):
    _positive(p, "kappa", "periods")
    h = B.qubit_rotating_frame(p["delta"], 1.0, p["g"])
    period = math.pi
    window = TimeWindow(p["periods"] * period / p["kappa"], 8 * p["periods"] + 1)
    return {"h": h}, window, [
        Binding("eternal", lambda: B.eternal_periodic_bound(h, period, p["kappa"], p["periods"])),
    ]


@_register("rwa_qubit", "two-level atom under a linear drive against its rotating-wave model",
           "qubit rotating-wave approximation",
           {"omega": 100.0, "delta": 0.0, "g": 0.1, "T": 10.0, "omega0": None},
           [("omega", "log", _log_values(100, 10000))])
def _rwa_qubit(p):
    _positive(p, "omega", "T")
    omega0 = p["omega"] + p["delta"] if p["omega0"] is None else p["omega0"]
    h = B.qubit_lab_hamiltonian(omega0, p["omega"], p["g"])
    h_rwa = B.qubit_rwa_lab_hamiltonian(omega0, p["omega"], p["g"])
    window = TimeWindow(p["T"], 2001)
    return {"h": h, "h_rwa": h_rwa}, window, [
        Binding("rwa_qubit", lambda: B.rwa_qubit_bound(omega0, p["omega"], p["g"], p["T"])),
    ]


_RWA_GENERAL_COUPLING = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex)


@_register("rwa_general", "three-level ladder kH_0 + H_1(kt) against its rotating-wave generator",
           "general rotating-wave approximation", {"kappa": 50.0, "c": 0.3, "T": 1.0},
           [("kappa", "log", (25.0, 50.0, 100.0, 200.0, 400.0))])
def _rwa_general(p):
    _positive(p, "kappa", "T")
    h0 = np.diag([0.0, 1.0, 3.0]).astype(complex)
    h1 = TermSum([(Envelope.cosine(p["c"], 1.0), _RWA_GENERAL_COUPLING)])
    return {"h0": Constant(h0), "h1": h1}, TimeWindow(p["T"], 1001), [
        Binding("rwa_general", lambda: B.rwa_general_bound(h0, h1, p["kappa"], p["T"],
                                                           averaging_period=2 * math.pi)),
    ]


@_register("rwa_envelope_smooth", "qubit RWA with a smooth sin^2 pulse envelope",
           "rotating-wave approximation with modulated amplitude",
           {"omega": 200.0, "delta": 0.0, "g0": 0.1, "T": 10.0, "order": 2},
           [("omega", "log", (50.0, 100.0, 200.0, 400.0, 800.0))])
def _rwa_envelope_smooth(p):
    _positive(p, "omega", "T", "order")
    w = math.pi / p["T"]
    env = Envelope.sine(1.0, w) * Envelope.sine(p["g0"], w)
    omega0 = p["omega"] + p["delta"]
    return {"h": B.qubit_lab_hamiltonian(omega0, p["omega"], env)}, TimeWindow(p["T"], 2001), [
        Binding("rwa_envelope", lambda: B.rwa_envelope_bound(omega0, p["omega"], env, p["T"], order=p["order"])),
    ]


@_register("rwa_envelope_piecewise", "qubit RWA with a two-level step envelope",
           "rotating-wave approximation with piecewise-constant amplitude",
           {"omega": 200.0, "delta": 0.0, "g1": 0.1, "g2": 0.2, "T": 10.0},
           [("omega", "log", (50.0, 100.0, 200.0, 400.0, 800.0))])
def _rwa_envelope_piecewise(p):
    _positive(p, "omega", "T")
    env = Envelope.steps([0.0, p["T"] / 2, p["T"]], [p["g1"], p["g2"]])
    omega0 = p["omega"] + p["delta"]
    return {"h": B.qubit_lab_hamiltonian(omega0, p["omega"], env)}, TimeWindow(p["T"], 2001), [
        Binding("rwa_envelope", lambda: B.rwa_envelope_bound(omega0, p["omega"], env, p["T"])),
    ]


@_register("rwa_two_timescale", "qubit with a modulated fast frame and a slowly varying drive envelope",
           "rotating-wave approximation with two driving timescales",
           {"kappa": 100.0, "a": 1.0, "g0": 0.2, "nu": 1.0, "T": 5.0},
           [("kappa", "log", (25.0, 50.0, 100.0, 200.0, 400.0))])
def _rwa_two_timescale(p):
    _positive(p, "kappa", "T")
    a, g0, nu = p["a"], p["g0"], p["nu"]
    # fast frame H_0(s) = (1 + a cos s) Z / 2; drive H_1(t, s) = g(t) cos(s) X
    frame = TermSum([(Envelope.constant(0.5), Z), (Envelope.cosine(0.5 * a, 1.0), Z)])
    env = Envelope.cosine(g0, nu)

    def drive(ts, ss):
        return (env(ts) * np.cos(ss))[:, None, None] * X[None]

    # average of cos(s) W(s)^dag X W(s) over s is (J_0(a) + J_2(a))/2 X
    c = 0.5 * (jv(0, a) + jv(2, a))
    hbar = TermSum([(env * c, X)])
    return {"frame": frame, "hbar": hbar}, TimeWindow(p["T"], 1001), [
        Binding("rwa_two_timescale", lambda: B.rwa_two_timescale_bound(frame, drive, hbar, p["kappa"], p["T"])),
    ]


@_register("strong_coupling", "exp(-it(kH_0 + H_1)) against the Zeno generator kH_0 + H_Z",
           "strong-coupling limit", {"kappa": 100.0, "T": 1.0, "h0": "Z", "h1": "X"},
           [("kappa", "log", (25.0, 50.0, 100.0, 200.0, 400.0))])
def _strong_coupling(p):
    _positive(p, "kappa", "T")
    h0 = _operator(p, "h0")
    h1 = _operator(p, "h1", h0.shape[0])
    return {"h0": Constant(h0), "h1": Constant(h1)}, TimeWindow(p["T"], 1001), [
        Binding("strong_coupling", lambda: B.strong_coupling_bound(h0, h1, p["kappa"], p["T"])),
    ]


@_register("adiabatic_rotating_z", "eigenbasis rotated by pi: kH_0(t) against kH_0 + A",
           "adiabatic theorem", {"kappa": 200.0, "T": 1.0, "analytic": 0},
           [("kappa", "log", (50.0, 100.0, 200.0, 400.0, 800.0))])
def _adiabatic_rotating_z(p):
    _positive(p, "kappa", "T")
    h0 = rotating_z_path(p["T"])
    analytic = rotating_z_projections(p["T"]) if p["analytic"] else None
    return {"h0": h0}, TimeWindow(p["T"], 401), [
        Binding("adiabatic", lambda: B.adiabatic_bound(h0, p["kappa"], p["T"], analytic=analytic)),
    ]


@_register("generalized_adiabatic", "rotating eigenbasis with a perturbation growing like k^(1/4)",
           "generalized adiabatic theorem", {"kappa": 200.0, "T": 1.0, "c": 0.1},
           [("kappa", "log", (50.0, 100.0, 200.0, 400.0, 800.0))])
def _generalized_adiabatic(p):
    _positive(p, "kappa", "T")
    h0 = rotating_z_path(p["T"])
    g = TermSum([(Envelope.cosine(p["c"] * p["kappa"] ** 0.25, 1.0), Z)])
    return {"h0": h0, "g": g}, TimeWindow(p["T"], 401), [
        Binding("generalized_adiabatic", lambda: B.generalized_adiabatic_bound(h0, g, p["kappa"], p["T"])),
    ]


@_register("zeno_time_dependent", "strong coupling along a moving gap with a time-dependent perturbation",
           "strong-coupling limit with time-dependent Hamiltonians", {"kappa": 200.0, "T": 1.0},
           [("kappa", "log", (50.0, 100.0, 200.0, 400.0, 800.0))])
def _zeno_time_dependent(p):
    _positive(p, "kappa", "T")
    h0 = rotating_z_path(p["T"])
    h1 = TermSum([(Envelope.sine(0.2, 1.0), X), (Envelope.constant(0.3), Y)])
    return {"h0": h0, "h1": h1}, TimeWindow(p["T"], 401), [
        Binding("generalized_adiabatic", lambda: B.generalized_adiabatic_bound(h0, h1, p["kappa"], p["T"])),
    ]


@_register("trotter_periodic", "(e^{-itZ/2n} e^{-itX/2n})^n against e^{-it(X+Z)/2}",
           "periodic Trotter product formula", {"n": 64, "t": 1.0, "ops": "X,Z"},
           [("n", "log", (8, 16, 32, 64, 128))])
def _trotter_periodic(p):
    _positive(p, "n", "t")
    ops = [parse_operator(s) for s in p["ops"].split(",")]
    return {"cycle": ops}, None, [Binding("trotter", lambda: B.trotter_bound(ops, p["n"], p["t"]))]


def _counterexample_report(n, n_ref, t):
    hs = counterexample_stack(max(n, n_ref))
    hbar_n = hs[:n].mean(axis=0)
    rep = B.trotter_bound(hs[:n], n, t, limit=hbar_n, periodic=False)
    w_n = B.trotter_product(hs[:n], t)
    w_ref = B.trotter_product(hs[:n_ref], t)
    rep.extra["reference_n"] = n_ref
    rep.extra["product_gap"] = spectral_norm(w_n - w_ref)
    rep.extra["mean_gap"] = spectral_norm(hbar_n - hs[:n_ref].mean(axis=0))
    return rep


@_register("trotter_counterexample", "X/Y blocks of growing decades: no ergodic mean, no Trotter limit",
           "Trotter counterexample without ergodic mean", {"n": 999, "n_ref": 100000, "t": 1.0},
           [("n", "log", (9, 99, 999, 9999, 99999))])
def _trotter_counterexample(p):
    _positive(p, "n", "n_ref", "t")
    return {}, None, [Binding("trotter", lambda: _counterexample_report(p["n"], p["n_ref"], p["t"]))]


@_register("trotter_eternal", "two-step Trotter cycle tracked over many periods by its Floquet generator",
           "eternal Trotterization", {"kappa": 10.0, "periods": 500, "ops": "X,Z"},
           [("kappa", "log", (5.0, 10.0, 20.0, 40.0, 80.0))])
def _trotter_eternal(p):
    _positive(p, "kappa", "periods")
    ops = [parse_operator(s) for s in p["ops"].split(",")]
    k = len(ops)
    h = PiecewiseConstant(np.linspace(0.0, 1.0, k + 1), ops, periodic=True)
    return {"h": h}, None, [
        Binding("eternal", lambda: B.eternal_periodic_bound(h, 1.0, p["kappa"], p["periods"])),
    ]


@_register("random_trotter", "products of factors drawn i.i.d. from {(Z+X)/2, (Z-X)/2}",
           "random Trotter formula", {"n": 64, "t": 1.0, "trials": 200, "seed": 0, "epsilon": 0.0},
           [("n", "log", (16, 32, 64, 128, 256))])
def _random_trotter(p):
    _positive(p, "n", "t", "trials")
    ens = B.DiscreteEnsemble([0.5 * (Z + X), 0.5 * (Z - X)])
    eps = p["epsilon"] if p["epsilon"] > 0 else None
    return {"ensemble": ens}, None, [
        Binding("random_trotter", lambda: B.random_trotter_bound(ens, p["n"], p["t"], eps, p["trials"], p["seed"])),
    ]


@_register("unitary_kicks", "quadratic-phase Z kicks average the X part of H away",
           "frequent unitary kicks", {"n": 200, "t": 1.0, "alpha": 0.5 * (math.sqrt(5) - 1)},
           [("n", "log", (25, 50, 100, 200, 400))])
def _unitary_kicks(p):
    _positive(p, "n", "t")
    h = 0.5 * X + 0.3 * Z
    alpha = p["alpha"]

    # V_j = exp(-i alpha j^2 Z), so U_j = V_j V_{j-1}^dag = exp(-i alpha (2j - 1) Z)
    def kick(j):
        return expm_hermitian(Z, alpha * (2 * j - 1))

    return {"h": Constant(h)}, None, [
        Binding("kicks", lambda: B.kicks_bound(h, kick, p["n"], p["t"], limit=0.3 * Z)),
    ]


@_register("dynamical_decoupling", "decoupling cycles: Pauli twirl on a qubit, or X kicks on one of two qubits",
           "dynamical decoupling", {"n": 32, "t": 1.0, "variant": "pauli"},
           [("n", "log", (8, 16, 32, 64, 128))])
def _dynamical_decoupling(p):
    _positive(p, "n", "t")
    if p["variant"] == "pauli":
        h, cycle, sysdim = 0.3 * Z + 0.4 * X, [I2, X, Y, Z], None
        if not B.group_average_holds(cycle):
            raise BadParam("Pauli cycle failed the group-average check")
    elif p["variant"] == "two_qubit":
        h, cycle, sysdim = np.kron(Z, Z), [np.eye(4), np.kron(X, I2)], 2
        hbar = sum(v.conj().T @ h @ v for v in cycle) / len(cycle)
        if not np.allclose(hbar, 0):
            raise BadParam("cycle does not average the coupling away")
    else:
        raise BadParam(f"variant must be 'pauli' or 'two_qubit', got {p['variant']!r}")
    return {"h": Constant(h)}, None, [
        Binding("decoupling", lambda: B.kicks_bound(h, cycle, p["n"], p["t"], cycle=True, system_dim=sysdim)),
    ]


@_register("bangbang", "(U e^{-itX/n})^n with U = exp(-i pi Z/2) against U^n exp(-itH_Z)",
           "bang-bang control with a fixed kick", {"n": 50, "t": 1.0, "h": "X", "u_phase": 0.5 * math.pi},
           [("n", "log", (11, 21, 41, 81, 161))])
def _bangbang(p):
    _positive(p, "n", "t")
    h = _operator(p, "h", 2)
    u = expm_hermitian(Z, p["u_phase"])
    return {"h": Constant(h)}, None, [Binding("bangbang", lambda: B.bangbang_bound(h, u, p["n"], p["t"]))]


@_register("gtf", "(e^{-itkZ/n} e^{-itX/n})^n with k growing linearly in n",
           "generalized Trotter formula", {"n": 64, "t": 1.0, "theta": math.pi, "h0": "Z", "h1": "X"},
           [("n", "log", (16, 32, 64, 128, 256))])
def _gtf(p):
    _positive(p, "n", "t", "theta")
    h0 = _operator(p, "h0")
    h1 = _operator(p, "h1", h0.shape[0])
    eta = spectral_decompose(h0).eta
    kappa = p["theta"] * p["n"] / (eta * p["t"])
    return {"h0": Constant(h0), "h1": Constant(h1)}, None, [
        Binding("gtf", lambda: B.gtf_bound(h0, h1, p["n"], kappa, p["t"], p["theta"])),
    ]


@_register("isospectral_divergence", "non-equivalent constant generators drift at least sqrt(2) apart",
           "lower bound for non-isospectral generators", {"h": "Z", "g": "1.1*Z", "t_max": 20 * math.pi},
           [("t_max", "linear", tuple(float(k * math.pi) for k in (10, 20, 40, 80, 160)))])
def _isospectral(p):
    _positive(p, "t_max")
    h = _operator(p, "h")
    g = _operator(p, "g", h.shape[0])
    return {"h": Constant(h), "g": Constant(g)}, None, [
        Binding("isospectral", lambda: B.isospectral_divergence(h, g, p["t_max"])),
    ]
