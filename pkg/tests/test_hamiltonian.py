import math

import numpy as np
import pytest
from scipy.integrate import quad

from actionbound import hamiltonian as H
from actionbound.errors import DimMismatch

from conftest import X, Y, Z


def test_termsum_eval_and_derivative():
    h = H.TermSum([(H.Envelope.cosine(2.0, 3.0), X), (H.Envelope.sine(1.0, 1.0), Z)])
    t = 0.4
    assert np.allclose(h(t), 2 * math.cos(3 * t) * X + math.sin(t) * Z)
    assert np.allclose(h.derivative()(t), -6 * math.sin(3 * t) * X + math.cos(t) * Z)


def test_envelope_product_leibniz():
    e = H.Envelope.sine(1.0, 2.0) * H.Envelope.cosine(3.0, 1.0)
    t = 0.3
    assert e(np.array([t]))[0] == pytest.approx(3 * math.sin(2 * t) * math.cos(t))
    d = e.derivatives[0](np.array([t]))[0]
    assert d == pytest.approx(3 * (2 * math.cos(2 * t) * math.cos(t) - math.sin(2 * t) * math.sin(t)))


def test_piecewise_constant_lookup_and_periodicity():
    h = H.PiecewiseConstant([0.0, 0.5, 1.0], [X, Z], periodic=True)
    assert np.allclose(h(0.25), X)
    assert np.allclose(h(0.5), Z)
    assert np.allclose(h(1.25), X)
    with pytest.raises(ValueError):
        H.PiecewiseConstant([0.0, 1.0], [X, Z])


def test_l1_norm_constant_and_piecewise():
    assert H.l1_norm(H.Constant(2 * Z), 3.0) == pytest.approx(6.0)
    pw = H.PiecewiseConstant([0.0, 1.0, 3.0], [X, 3 * Z])
    assert H.l1_norm(pw, 3.0) == pytest.approx(7.0)


def test_l1_norm_against_scipy_quad():
    h = H.TermSum([(H.Envelope.cosine(1.0, 5.0), X), (H.Envelope.constant(0.3), Z)])
    ref, _ = quad(lambda s: math.sqrt(math.cos(5 * s) ** 2 + 0.09), 0, 2.0, limit=200)
    assert H.l1_norm(h, 2.0) == pytest.approx(ref, rel=1e-8)


def test_lp_norm_p2():
    h = H.TermSum([(H.Envelope.sine(1.0, 1.0), X)])
    ref = math.sqrt(quad(lambda s: math.sin(s) ** 2, 0, 3.0)[0])
    assert H.lp_norm(h, 3.0, p=2) == pytest.approx(ref, rel=1e-8)


def test_sup_norm_finds_peak():
    h = H.TermSum([(H.Envelope.sine(2.0, 1.0), X)])
    assert H.sup_norm(h, H.TimeWindow(3.0, 11)) == pytest.approx(2.0, abs=1e-6)


def test_integral_action_exact_and_numeric():
    h2 = H.TermSum([(H.Envelope.cosine(1.0, 4.0), X)])
    s, err = H.integral_action(h2, H.Constant(np.zeros((2, 2))), 1.0)
    assert np.allclose(s, math.sin(4.0) / 4 * X)
    assert err == 0.0
    sampler = H.Sampler(lambda t: math.cos(4 * t) * X, 2, smoothness=math.inf)
    s2, err2 = H.integral_action(sampler, H.Constant(np.zeros((2, 2))), 1.0)
    assert np.allclose(s2, s, atol=1e-10)
    assert err2 < 1e-8


def test_cumulative_action_complex_integrand():
    grid = np.linspace(0, 2, 21)
    f = lambda ts: np.exp(1j * 3 * ts)[:, None, None] * X[None]  # noqa: E731
    cum, err = H.cumulative_action(f, grid)
    ref = ((np.exp(3j * grid) - 1) / 3j)[:, None, None] * X
    assert np.allclose(cum, ref, atol=1e-9)
    assert err < 1e-8


def test_average_hamiltonian():
    h = H.TermSum([(H.Envelope.constant(0.5), Z), (H.Envelope.cosine(1.0, 1.0), X)])
    assert np.allclose(H.average_hamiltonian(h, 2 * math.pi), 0.5 * Z, atol=1e-12)


def test_parse_hamiltonian_constant_and_time_dependent():
    assert np.allclose(H.parse_operator("1.1*Z"), 1.1 * Z)
    assert np.allclose(H.parse_operator("0.5*ZZ - XI"), 0.5 * np.kron(Z, Z) - np.kron(X, np.eye(2)))
    h = H.parse_hamiltonian("0.5*Z + g*cos(w*t)*X", {"g": 0.1, "w": 100})
    assert np.allclose(h(0.01), 0.5 * Z + 0.1 * math.cos(1.0) * X)
    with pytest.raises(DimMismatch):
        H.parse_hamiltonian("Z + XX")


def test_from_json_roundtrip():
    m = 0.3 * X + 0.2 * Y
    h = H.from_json({"matrix": H.matrix_to_json(m)})
    assert np.allclose(h.matrix, m)
    h2 = H.from_json('{"terms": [{"coeff": "sin(t)", "op": "X"}]}')
    assert np.allclose(h2(0.5), math.sin(0.5) * X)
    pw = H.from_json({"piecewise": {"times": [0, 1, 2], "values": ["X", "Z"]}})
    assert np.allclose(pw(1.5), Z)


def test_time_scaled():
    h = H.TermSum([(H.Envelope.cosine(1.0, 1.0), X)])
    assert np.allclose(h.time_scaled(3.0)(0.2), math.cos(0.6) * X)
