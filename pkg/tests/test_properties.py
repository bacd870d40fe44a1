"""Property-based checks of the inequalities on random instances."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from actionbound import bounds as B
from actionbound import hamiltonian as H
from actionbound import spectral as S

from conftest import X, Y, Z, random_hermitian, random_unitary

seeds = st.integers(0, 2**31 - 1)
dims = st.integers(2, 8)


@given(st.floats(1e-6, 2 * math.pi - 1e-3))
def test_gtf_g_below_cap_and_at_least_one(x):
    g = B.gtf_g(x)
    assert 1.0 - 1e-12 <= g <= B.gtf_g_cap(x) + 1e-12


@given(st.floats(0.01, 6.0), st.floats(0.01, 6.0))
def test_gtf_g_monotone(a, b):
    lo, hi = sorted((a, b))
    assert B.gtf_g(lo) <= B.gtf_g(hi) + 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(0.1, 3.0))
def test_universal_dominance_random_constants(seed, t):
    rng = np.random.default_rng(seed)
    h1, h2 = random_hermitian(rng, 3), random_hermitian(rng, 3)
    rep = B.universal_bound(H.Constant(h1), H.Constant(h2), H.TimeWindow(t, 101))
    assert rep.holds()


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_universal_dominance_random_drives(seed):
    rng = np.random.default_rng(seed)
    a, w = rng.uniform(0.1, 2.0, 2), rng.uniform(0.5, 20.0, 2)
    h1 = H.TermSum([(H.Envelope.constant(1.0), Z)])
    h2 = H.TermSum([(H.Envelope.constant(1.0), Z), (H.Envelope.cosine(a[0], w[0]), X),
                    (H.Envelope.sine(a[1], w[1]), Y)])
    rep = B.universal_bound(h1, h2, H.TimeWindow(2.0, 201))
    assert rep.holds()


@settings(max_examples=20, deadline=None)
@given(seeds, st.floats(0.2, 2.0), st.floats(0.2, 2.0))
def test_rwa_qubit_value_monotone_in_T(seed, t1, t2):
    rng = np.random.default_rng(seed)
    w, g, d = rng.uniform(10, 1000), rng.uniform(0.01, 1), rng.uniform(-1, 1)
    lo, hi = sorted((t1, t2))
    assert B.rwa_qubit_value(w + d, w, g, lo) <= B.rwa_qubit_value(w + d, w, g, hi)


@settings(max_examples=100, deadline=None)
@given(seeds, dims)
def test_projected_sum_inequality(seed, d):
    rng = np.random.default_rng(seed)
    levels = rng.integers(1, d + 1)
    vals = np.sort(rng.choice(np.arange(10), size=d, replace=True)[:] + 0.0)
    vals[:levels] = vals[0]
    dec = S.spectral_decompose(np.diag(vals))
    c = rng.normal(size=(dec.m, dec.m)) + 1j * rng.normal(size=(dec.m, dec.m))
    value, bound = S.projected_sum_bound(dec, random_hermitian(rng, d), c)
    assert value <= bound * (1 + 1e-12) + 1e-14


@settings(max_examples=100, deadline=None)
@given(seeds, dims, st.floats(0.05, 50.0))
def test_continuous_ergodic_inequality(seed, d, t):
    rng = np.random.default_rng(seed)
    em = S.continuous_ergodic_mean(S.spectral_decompose(random_hermitian(rng, d)), random_hermitian(rng, d), t)
    assert em.deviation <= em.bound + 1e-12


@settings(max_examples=100, deadline=None)
@given(seeds, dims, st.integers(1, 500))
def test_discrete_ergodic_inequality(seed, d, n):
    rng = np.random.default_rng(seed)
    em = S.discrete_ergodic_mean(S.spectral_decompose(random_unitary(rng, d), kind="unitary"),
                                 random_hermitian(rng, d), n)
    assert em.deviation <= em.bound + 1e-12


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_converse_inequality_random_smooth_paths(seed):
    rng = np.random.default_rng(seed)
    terms = [(H.Envelope.cosine(rng.uniform(0.05, 1.0), rng.uniform(0.1, 5.0), rng.uniform(0, 6.3)), p)
             for p in (X, Y, Z)]
    rep = B.converse_action_bound(H.TermSum(terms), H.TimeWindow(rng.uniform(0.3, 3.0), 101))
    assert rep.holds()


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 64), st.integers(2, 4), seeds)
def test_periodic_trotter_dominance(n, p, seed):
    rng = np.random.default_rng(seed)
    cycle = [random_hermitian(rng, 2) for _ in range(p)]
    rep = B.trotter_bound(cycle, n, 1.0)
    assert rep.holds()
    assert rep.extra["ergodic_bound"] <= rep.bound_value + 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 200), seeds)
def test_bangbang_dominance(n, seed):
    rng = np.random.default_rng(seed)
    u = random_unitary(rng, 2)
    try:
        rep = B.bangbang_bound(random_hermitian(rng, 2), u, n, 1.0)
    except Exception as exc:  # near-degenerate random kicks are rejected upstream
        assert type(exc).__name__ == "DegenerateGap"
        return
    assert rep.holds()
