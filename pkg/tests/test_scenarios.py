import math

import numpy as np
import pytest

from actionbound import scenarios as S
from actionbound.errors import BadParam, UnknownScenario

from conftest import X, Y


def test_registry_listing_is_sorted_and_described():
    rows = S.list_scenarios()
    names = [n for n, _ in rows]
    assert names == sorted(names)
    assert len(names) == 22
    assert all(desc.strip() for _, desc in rows)


def test_unknown_scenario_lists_names():
    with pytest.raises(UnknownScenario, match="rwa_qubit"):
        S.build("nope")


@pytest.mark.parametrize("params,msg", [({"bogus": 1}, "unknown parameter"), ({"n": "abc"}, "not a number"),
                                        ({"n": 2.5}, "integer"), ({"n": -1}, "positive")])
def test_bad_params(params, msg):
    with pytest.raises(BadParam, match=msg):
        S.build("trotter_periodic", params)


def test_expression_params():
    inst = S.build("isospectral_divergence", {"t_max": "20*pi"})
    assert inst.params["t_max"] == pytest.approx(20 * math.pi)


def test_rwa_qubit_omega0_alias():
    inst = S.build("rwa_qubit", {"omega0": 101.0})
    rep = inst.run()
    assert rep.params["omega0"] == 101.0
    assert rep.params["delta"] == pytest.approx(1.0)


def test_counterexample_sequence():
    assert np.allclose(S.counterexample_hamiltonian(9), X)
    assert np.allclose(S.counterexample_hamiltonian(10), Y)
    assert np.allclose(S.counterexample_hamiltonian(100), X)
    hs = S.counterexample_stack(10**4 - 1)
    assert np.allclose(hs[9], Y) and np.allclose(hs[99], X)
    # mean over 10^{2k} - 1 factors: X/11 + 10Y/11
    assert np.allclose(hs.mean(axis=0), X / 11 + 10 * Y / 11)


def test_every_scenario_has_sweep_axes_with_five_values():
    for name, _ in S.list_scenarios():
        sc = S.get(name)
        for ax in sc.sweep_axes:
            assert len(ax.values) == 5
            assert ax.param in sc.default_params


def test_run_all_includes_secondary_binding():
    out = S.build("motivating_kicked").run_all()
    assert set(out) == {"rotating_frame", "universal"}
    assert out["rotating_frame"].bound_value < out["universal"].bound_value


def test_dynamical_decoupling_variants():
    assert S.build("dynamical_decoupling", {"variant": "two_qubit"}).run().actual < 1e-12
    with pytest.raises(BadParam):
        S.build("dynamical_decoupling", {"variant": "nope"})
