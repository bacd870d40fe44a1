"""Bound evaluators: closed-form values, dominance and error paths."""

import json
import math

import numpy as np
import pytest
from scipy.linalg import expm

from actionbound import bounds as B
from actionbound import hamiltonian as H
from actionbound.errors import (BoundViolation, EmptySequence, Inconclusive, KappaTooLarge, MViolated,
                                NoErgodicLimit)
from actionbound.scenarios import rotating_z_path

from conftest import I2, X, Y, Z


# --- report -----------------------------------------------------------------


def test_report_holds_and_serialization():
    rep = B.BoundReport("x", 1.0, 0.5, params={"a": np.float64(2.0)}, extra={"m": np.eye(2, dtype=complex)})
    assert rep.holds()
    assert rep.ratio == 0.5
    d = json.loads(rep.to_json())
    assert d["holds"] is True and d["params"]["a"] == 2.0
    assert B.BoundReport.from_dict(d).bound_value == 1.0
    assert rep.csv_row() == "x,1,0.5,0.5,0"
    low = B.BoundReport("y", math.sqrt(2), 1.0, direction="lower")
    assert not low.holds()


# --- universal and rotating frame -------------------------------------------


def test_universal_constants_closed_form():
    rep = B.universal_bound(H.Constant(Z), H.Constant(1.1 * Z), H.TimeWindow(1.0, 1001))
    # sup_t ||exp(-itZ) - exp(-1.1itZ)|| = 2 sin(0.05) ; sharpened bound t ||dH|| = 0.1
    assert rep.actual == pytest.approx(2 * math.sin(0.05), rel=1e-9)
    assert rep.bound_value == pytest.approx(0.1, rel=1e-9)
    assert rep.holds()


def test_rotating_frame_kicked_value():
    k = 100.0
    rep = B.rotating_frame_bound(H.Constant(k * Z), H.Constant(k * Z + X), H.TimeWindow(1.0, 1001),
                                 h0=H.Constant(k * Z))
    # ||int_0^t exp(iksZ) X exp(-iksZ) ds|| = |sin(kt)|/k, sup on the grid just below 1/k
    assert rep.extra["rotated_action_sup"] == pytest.approx(1 / k, rel=1e-5)
    assert rep.bound_value == pytest.approx(2 * rep.extra["rotated_action_sup"], rel=1e-12)
    assert rep.holds()


def test_converse_action_bound_holds():
    h = H.TermSum([(H.Envelope.cosine(0.5, 2.0), X), (H.Envelope.constant(0.2), Z)])
    rep = B.converse_action_bound(h, H.TimeWindow(2.0, 201))
    assert rep.holds()
    assert rep.actual > 0


def test_isospectral_divergence_lower_bound():
    rep = B.isospectral_divergence(Z, 1.1 * Z, 20 * math.pi)
    assert rep.direction == "lower"
    assert rep.actual >= math.sqrt(2) - 1e-6
    with pytest.raises(Inconclusive):
        B.isospectral_divergence(Z, X, 10.0)


# --- periodic ----------------------------------------------------------------


def test_eternal_value_formula():
    assert B.THETA == pytest.approx(1 + 2 * math.log(2))
    assert B.eternal_bound_value(2.0, 50.0) == pytest.approx(B.THETA / 50 * 2 * (1 + B.THETA * 2 / 50))


def test_eternal_periodic_bound_and_floquet_identity():
    h = B.qubit_rotating_frame(1.0, 1.0, 1.0)
    rep = B.eternal_periodic_bound(h, math.pi, 50.0, periods=50)
    assert rep.holds()
    assert B.floquet_identity_residual(h, math.pi, 50.0, 50) < 1e-8


# --- rotating-wave ------------------------------------------------------------


def test_rwa_qubit_value_frozen():
    assert B.rwa_qubit_value(100.0, 100.0, 0.1, 10.0) == pytest.approx(0.0015, abs=1e-15)


def test_rwa_qubit_bound_dominates():
    rep = B.rwa_qubit_bound(100.0, 100.0, 0.1, 10.0)
    assert rep.bound_value == pytest.approx(0.0015)
    assert rep.holds()
    assert 0.2 < rep.ratio < 0.5


def test_rwa_envelope_piecewise_value():
    env = H.Envelope.steps([0.0, 5.0, 10.0], [0.1, 0.2])
    rep = B.rwa_envelope_bound(200.0, 200.0, env, 10.0)
    assert rep.bound_value == pytest.approx((1 / 400) * (0.2 + 0.05) * (1 + 0.4 * 10))
    assert rep.holds()


def test_rwa_envelope_smooth_dominates():
    w = math.pi / 10
    env = H.Envelope.sine(1.0, w) * H.Envelope.sine(0.1, w)
    rep = B.rwa_envelope_bound(200.0, 200.0, env, 10.0, order=2)
    assert rep.holds()


def test_rwa_general_m_violation():
    h1 = H.TermSum([(H.Envelope.cosine(0.3, 1.0), X)])
    with pytest.raises(MViolated):
        B.rwa_general_bound(Z, h1, 50.0, 1.0, M=0.1, averaging_period=2 * math.pi)


# --- strong coupling / adiabatic ---------------------------------------------


def test_strong_coupling_frozen_value():
    rep = B.strong_coupling_bound(Z, X, 100.0, 1.0)
    assert rep.bound_value == pytest.approx(3 * math.sqrt(2) / 100, abs=1e-12)
    assert rep.holds()
    assert rep.extra["limit_commutator"] < 1e-8


def test_adiabatic_frozen_value():
    rep = B.adiabatic_bound(rotating_z_path(1.0), 200.0, 1.0)
    ref = math.sqrt(2) / 400 * (1 + math.pi / 2) * math.pi
    assert rep.bound_value == pytest.approx(ref, rel=1e-6)
    assert rep.params["A_sup"] == pytest.approx(math.pi / 2, rel=1e-8)
    assert rep.holds()


def test_generalized_adiabatic_reduces_to_adiabatic_value():
    v = B.generalized_adiabatic_value(2, 2.0, 0.0, 1.0, 0.5, 0.0, 0.0, 100.0, 1.0)
    assert v == pytest.approx(B.adiabatic_value(2, 2.0, 0.0, 1.0, 0.5, 100.0, 1.0))


# --- product formulas --------------------------------------------------------


def test_periodic_trotter_frozen_value():
    rep = B.trotter_bound([X, Z], 64, 1.0)
    assert rep.bound_value == pytest.approx((2 / 64) * 1.5 * 1.0 * 3.0)
    assert rep.extra["ergodic_bound"] <= rep.bound_value
    ref = np.linalg.matrix_power(expm(-1j * Z / 128) @ expm(-1j * X / 128), 64)
    assert rep.actual == pytest.approx(np.linalg.norm(ref - expm(-0.5j * (X + Z)), 2), abs=1e-12)


def test_trotter_errors():
    with pytest.raises(EmptySequence):
        B.trotter_bound([], 4, 1.0)
    with pytest.raises(NoErgodicLimit):
        B.trotter_bound(lambda j: X, 4, 1.0, periodic=False)
    with pytest.raises(TypeError):
        B.trotter_bound(lambda j: X, 4, 1.0)


def test_ergodic_deviation_manual():
    hs = np.stack([X, Z, X, Z])
    limit = 0.5 * (X + Z)
    dev = max((j / 4) * np.linalg.norm(hs[:j].mean(0) - limit, 2) for j in range(1, 5))
    assert B.ergodic_deviation(hs, limit) == pytest.approx(dev)


def test_random_trotter_value_and_report():
    ens = B.DiscreteEnsemble([0.5 * (Z + X), 0.5 * (Z - X)])
    assert ens.sigma == pytest.approx(math.sqrt(0.5))
    assert np.allclose(ens.mean, 0.5 * Z)
    rep = B.random_trotter_bound(ens, 64, 1.0, trials=100, seed=3)
    assert rep.holds()
    again = B.random_trotter_bound(ens, 64, 1.0, trials=100, seed=3)
    assert again.actual == rep.actual and again.extra["median_error"] == rep.extra["median_error"]


def test_group_average():
    assert B.group_average_holds([I2, X, Y, Z])
    cyc = [np.eye(4), np.kron(X, I2)]
    assert not B.group_average_holds(cyc, system_dim=2)


def test_decoupling_pauli_cycle():
    rep = B.kicks_bound(0.3 * Z + 0.4 * X, [I2, X, Y, Z], 32, 1.0, cycle=True)
    assert rep.extra["group_average"]
    assert np.allclose(rep.extra["hbar"], 0)
    assert rep.bound_value == pytest.approx(B.periodic_trotter_value(0.5, 32, 4, 1.0))
    assert rep.holds()


def test_identity_kicks_reproduce_free_evolution():
    rep = B.kicks_bound(0.5 * X, lambda j: I2, 10, 1.0, limit=0.5 * X)
    assert rep.actual < 1e-12


def test_bangbang_frozen_value():
    u = expm(-0.5j * math.pi * Z)
    rep = B.bangbang_bound(X, u, 50, 1.0)
    assert rep.bound_value == pytest.approx((2 / 50) * (math.sqrt(2) / 2 + 1) * 3)
    assert rep.extra["hz_norm"] == 0.0
    assert rep.holds()


def test_gtf_g_closed_form_and_cap():
    assert B.gtf_g(math.pi) == pytest.approx(2 * math.sqrt(4 + math.pi**2) / (2 * math.pi), abs=1e-12)
    assert B.gtf_g(1e-9) == pytest.approx(1.0)
    assert B.gtf_g_cap(math.pi) == pytest.approx(2 / math.pi + 1 - 1 / math.pi)


def test_gtf_bound_and_kappa_guard():
    kappa = math.pi * 64 / 2.0
    rep = B.gtf_bound(Z, X, 64, kappa, 1.0, math.pi)
    assert rep.holds()
    with pytest.raises(KappaTooLarge):
        B.gtf_bound(Z, X, 64, 2 * kappa, 1.0, math.pi)


def test_decoupling_violation_detection():
    # cycle averages to tr/d but h is declared with a non-scalar mean: kicks_bound must not hide it
    rep = B.kicks_bound(np.kron(Z, Z), [np.eye(4), np.kron(X, I2)], 8, 1.0, cycle=True, system_dim=2)
    assert not rep.extra["group_average"]
    assert rep.actual < 1e-12
    assert issubclass(BoundViolation, AssertionError)
