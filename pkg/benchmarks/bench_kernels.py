"""Time the compiled ordered-product kernels against the NumPy fallback.

Usage: ``python benchmarks/bench_kernels.py [--steps N] [--repeat R]``
"""

import argparse
import timeit

import numpy as np

from actionbound import kernels


def random_generators(n, d, rng):
    a = rng.normal(size=(n, d, d)) + 1j * rng.normal(size=(n, d, d))
    return 1e-2 * (a + np.conj(np.swapaxes(a, 1, 2)))


def bench(n, d, repeat, rng):
    g = random_generators(n, d, rng)
    stops = np.linspace(0, n, 101).astype(np.intp)
    out = {}
    for name in ("python", "compiled"):
        impl = kernels.backend_module(name)
        fn = lambda: kernels.ordered_product(g, stops, impl=impl)  # noqa: E731
        out[name] = min(timeit.repeat(fn, number=1, repeat=repeat))
    ref = kernels.ordered_product(g, stops, impl=kernels.backend_module("python"))
    got = kernels.ordered_product(g, stops, impl=kernels.backend_module("compiled"))
    return out, float(np.max(np.abs(ref - got)))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    try:
        kernels.backend_module("compiled")
    except ImportError:
        print("compiled extension not built; nothing to compare")
        return
    print(f"{'dim':>4} {'steps':>8} {'python [s]':>11} {'compiled [s]':>13} {'speedup':>8} {'max diff':>9}")
    for d in (2, 4, 8):
        n = args.steps if d == 2 else args.steps // 10
        t, diff = bench(n, d, args.repeat, rng)
        print(f"{d:>4} {n:>8} {t['python']:>11.4f} {t['compiled']:>13.4f} "
              f"{t['python'] / t['compiled']:>8.1f} {diff:>9.1e}")


if __name__ == "__main__":
    main()
