import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.linalg import expm

from actionbound import kernels

from conftest import random_hermitian

BACKENDS = ["python"]
try:
    kernels.backend_module("compiled")
    BACKENDS.append("compiled")
except ImportError:
    pass


def _stack(rng, n, d, scale=0.1):
    return np.stack([random_hermitian(rng, d, scale) for _ in range(n)])


def test_backend_is_reported():
    assert kernels.BACKEND in ("python", "compiled")


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("d", [2, 3, 5])
def test_ordered_product_against_expm(rng, backend, d):
    g = _stack(rng, 37, d)
    stops = [0, 1, 10, 10, 37]
    out = kernels.ordered_product(g, stops, impl=kernels.backend_module(backend))
    ref = [np.eye(d)]
    for gk in g:
        ref.append(expm(-1j * gk) @ ref[-1])
    for s, u in zip(stops, out):
        assert np.allclose(u, ref[s], atol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_expm_su2(rng, backend):
    g = _stack(rng, 20, 2, 3.0)
    got = kernels.expm_stack(g, impl=kernels.backend_module(backend))
    assert np.allclose(got, np.stack([expm(-1j * x) for x in g]), atol=1e-12)


def test_backends_agree(rng):
    if len(BACKENDS) < 2:
        pytest.skip("compiled extension not built")
    for d in (2, 4):
        g = _stack(rng, 5000, d)
        stops = np.linspace(0, 5000, 11).astype(int)
        a = kernels.ordered_product(g, stops, impl=kernels.backend_module("python"))
        b = kernels.ordered_product(g, stops, impl=kernels.backend_module("compiled"))
        assert np.max(np.abs(a - b)) < 1e-11


def test_chain_unitaries_with_initial(rng):
    e = np.stack([expm(-1j * random_hermitian(rng, 3)) for _ in range(4)])
    u0 = expm(-1j * random_hermitian(rng, 3))
    out = kernels.chain_unitaries(e, [4], u0)
    assert np.allclose(out[0], e[3] @ e[2] @ e[1] @ e[0] @ u0)


def test_pure_python_fallback_selected_by_env():
    env = dict(os.environ, ACTIONBOUND_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import actionbound; print(actionbound.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
