"""Acceptance criteria, each at its stated tolerance.

Every test logs one PASS/FAIL line (shown in the terminal summary).
"""

import math

import numpy as np
import pytest

from actionbound import bounds as B
from actionbound import hamiltonian as H
from actionbound import scenarios as S
from actionbound import spectral as SP
from actionbound.cli import fit_loglog
from actionbound.propagator import dyson_oracle, evolve, sup_distance

from conftest import X, Y, Z, random_hermitian, random_unitary, record

pytestmark = pytest.mark.acceptance


def sweep(name, axis, values, **params):
    return [S.build(name, dict(params, **{axis: v})).run() for v in values]


def slope_of(values, reps):
    return fit_loglog(values, [r.actual for r in reps])[0]


def test_c01_dominance_suite():
    violations, runs = [], 0
    for name, _ in S.list_scenarios():
        sc = S.get(name)
        points = [{}] + [{ax.param: v} for ax in sc.sweep_axes for v in ax.values]
        for p in points:
            rep = S.build(name, p).run()
            runs += 1
            if not rep.holds():
                violations.append(f"{name}{p}: {rep.actual:.3g} vs {rep.bound_value:.3g}")
    ok = record("C1 dominance suite", not violations, f"{runs} runs, {len(violations)} violations "
                + "; ".join(violations))
    assert ok


def test_c02_rwa_rate():
    omegas = list(np.logspace(2, 4, 5))
    reps = sweep("rwa_qubit", "omega", omegas, delta=0.0, g=0.1, T=10.0)
    s = slope_of(omegas, reps)
    ok = -1.15 <= s <= -0.85 and all(r.holds() for r in reps)
    assert record("C2 RWA rate", ok, f"slope {s:.4f}")


def test_c03_strong_coupling():
    kappas = [25.0, 50.0, 100.0, 200.0, 400.0]
    reps = sweep("strong_coupling", "kappa", kappas, h0="Z", h1="X", T=1.0)
    s = slope_of(kappas, reps)
    b100 = B.strong_coupling_bound(Z, X, 100.0, 1.0).bound_value
    err = abs(b100 - 3 * math.sqrt(2) / 100)
    ok = -1.15 <= s <= -0.85 and err <= 1e-12
    assert record("C3 strong coupling", ok, f"slope {s:.4f}, |bound(100) - 3sqrt2/100| = {err:.1e}")


def test_c04_adiabatic():
    kappas = [50.0, 100.0, 200.0, 400.0, 800.0]
    reps = sweep("adiabatic_rotating_z", "kappa", kappas)
    s = slope_of(kappas, reps)
    ts = np.linspace(0.05, 0.95, 19)
    a = SP.adiabatic_connection_many(S.rotating_z_path(1.0), ts, 1.0)
    dev = float(np.max(np.abs(a - 0.5 * math.pi * Y[None])))
    ok = abs(s + 1) <= 0.15 and dev <= 1e-5 and all(r.holds() for r in reps)
    assert record("C4 adiabatic", ok, f"slope {s:.4f}, max |A - (pi/2)Y| = {dev:.1e}")


def test_c05_trotter_periodic():
    ns = [8, 16, 32, 64, 128]
    reps = sweep("trotter_periodic", "n", ns)
    s = slope_of(ns, reps)
    tpf = [B.periodic_trotter_value(1.0, n, 2, 1.0) for n in ns]
    ok = abs(s + 1) <= 0.15 and all(r.actual <= v for r, v in zip(reps, tpf))
    assert record("C5 Trotter periodic", ok, f"slope {s:.4f}, max actual/TPF {max(r.actual / v for r, v in zip(reps, tpf)):.3f}")


def test_c06_eternal_bound():
    rep = S.build("periodic_eternal", {"kappa": 50.0, "periods": 200}).run()
    l1 = rep.extra["l1_period"]
    th = 1 + 2 * math.log(2)
    formula = th / 50 * l1 * (1 + th / 50 * l1)
    ok_a = rep.actual <= formula + rep.est_error + 1e-9 and abs(formula - rep.bound_value) < 1e-12
    ratio = rep.extra["average_distance"] / rep.actual
    ok_b = ratio >= 2.0
    record("C6a eternal bound", ok_a, f"{rep.actual:.4g} <= {formula:.4g}")
    record("C6b plain-average contrast", ok_b, f"average/eternal distance ratio {ratio:.2f}")
    assert ok_a and ok_b


def test_c07_floquet_identity():
    h = B.qubit_rotating_frame(1.0, 1.0, 1.0)
    res = B.floquet_identity_residual(h, math.pi, 50.0, 50)
    assert record("C7 Floquet identity", res <= 1e-8, f"residual over 50 periods {res:.1e}")


def test_c08_gtf():
    ns = [16, 32, 64, 128, 256]
    reps = sweep("gtf", "n", ns, theta=math.pi)
    s = slope_of(ns, reps)
    gerr = abs(B.gtf_g(math.pi) - 2 * math.sqrt(4 + math.pi**2) / (2 * math.pi))
    ok = all(r.holds() for r in reps) and abs(s + 1) <= 0.2 and gerr <= 1e-12
    assert record("C8 GTF", ok, f"slope {s:.4f}, |g(pi) - closed form| = {gerr:.1e}")


def test_c09_bangbang():
    dom_ns = [10, 20, 40, 80, 160, 320]
    dom = sweep("bangbang", "n", dom_ns)
    odd = [11, 21, 41, 81, 161, 321]
    reps = sweep("bangbang", "n", odd)
    s = slope_of(odd, reps)
    hz_zero = all(np.all(r.extra["hz"] == 0) for r in dom + reps)
    ok = hz_zero and all(r.holds() for r in dom + reps) and abs(s + 1) <= 0.15
    assert record("C9 bang-bang", ok, f"H_Z == 0: {hz_zero}, slope on odd n {s:.4f}")


def test_c10_random_trotter():
    ns = [16, 64, 256]
    reps = sweep("random_trotter", "n", ns, trials=200, seed=0)
    ok_tail = []
    for r in reps:
        q = min(r.bound_value, 1.0)
        margin = 3 * math.sqrt(q * (1 - q) / 200)
        ok_tail.append(r.actual <= r.bound_value + margin)
    s = slope_of(ns, [B.BoundReport("m", 1, r.extra["median_error"]) for r in reps])
    ok = all(ok_tail) and -0.7 <= s <= -0.3
    freqs = ", ".join(f"{r.actual:.3f}<= {r.bound_value:.2f}" for r in reps)
    assert record("C10 random Trotter", ok, f"median slope {s:.3f}; tail {freqs}")


def test_c11_oracle_equivalence():
    cases = {
        "rwa_qubit": (B.qubit_rotating_frame(0.0, 100.0, 0.1), H.TimeWindow(10.0, 201)),
        "adiabatic_rotating_z": (S.rotating_z_path(1.0) * 200.0, H.TimeWindow(1.0, 201)),
    }
    gaps = {}
    for name, (h, w) in cases.items():
        a = evolve(h, w, method="cf_magnus4", tol=1e-11)
        b = dyson_oracle(h, w, steps=10**6)
        gaps[name] = sup_distance(a, b).value
    ok = all(g <= 1e-8 for g in gaps.values())
    assert record("C11 oracle equivalence", ok, ", ".join(f"{k} {v:.1e}" for k, v in gaps.items()))


def test_c12_inequality_suites():
    rng = np.random.default_rng(2024)
    fails = {"projected_sum": 0, "continuous_mean": 0, "discrete_mean": 0, "converse": 0}
    for _ in range(100):
        d = int(rng.integers(2, 9))
        vals = np.sort(rng.integers(0, 6, size=d)).astype(float)
        dec = SP.spectral_decompose(np.diag(vals))
        c = rng.normal(size=(dec.m, dec.m)) + 1j * rng.normal(size=(dec.m, dec.m))
        v, bnd = SP.projected_sum_bound(dec, random_hermitian(rng, d), c)
        fails["projected_sum"] += v > bnd * (1 + 1e-12)
        em = SP.continuous_ergodic_mean(SP.spectral_decompose(random_hermitian(rng, d)), random_hermitian(rng, d),
                                        float(rng.uniform(0.1, 20)))
        fails["continuous_mean"] += em.deviation > em.bound + 1e-12
        em = SP.discrete_ergodic_mean(SP.spectral_decompose(random_unitary(rng, d), kind="unitary"),
                                      random_hermitian(rng, d), int(rng.integers(1, 200)))
        fails["discrete_mean"] += em.deviation > em.bound + 1e-12
    for _ in range(50):
        terms = [(H.Envelope.cosine(rng.uniform(0.05, 1.0), rng.uniform(0.1, 5.0), rng.uniform(0, 6.3)), p)
                 for p in (X, Y, Z)]
        fails["converse"] += not B.converse_action_bound(H.TermSum(terms), H.TimeWindow(rng.uniform(0.3, 3.0), 101)).holds()
    iso = B.isospectral_divergence(Z, 1.1 * Z, 20 * math.pi)
    ok = not any(fails.values()) and iso.actual >= math.sqrt(2) - 1e-6
    assert record("C12 inequality suites", ok, f"failures {fails}, isospectral sup {iso.actual:.6f}")


@pytest.mark.xfail(strict=True, reason="both products share the mean 10X/11 + Y/11; see decisions ledger")
def test_c13_counterexample_exhibit():
    rep = S.build("trotter_counterexample", {"n": 999, "n_ref": 100000}).run()
    gap = rep.extra["product_gap"]
    assert record("C13 counterexample exhibit", gap > 0.1, f"||W_999 - W_100000|| = {gap:.4g} (needs > 0.1)")


def test_c13_counterexample_adjacent_decades():
    rep = S.build("trotter_counterexample", {"n": 99, "n_ref": 999}).run()
    gap = rep.extra["product_gap"]
    assert record("C13' counterexample, n=99 vs 999", gap > 0.1, f"||W_99 - W_999|| = {gap:.4g}")


def test_c14_zeno_structure():
    sc = S.build("strong_coupling").run().extra["limit_commutator"]
    bb = S.build("bangbang").run().extra["limit_commutator"]
    ok = sc <= 1e-8 and bb <= 1e-8
    assert record("C14 Zeno structure", ok, f"strong coupling {sc:.1e}, bang-bang {bb:.1e}")
