"""Benchmark the compiled kernel against the NumPy fallback.

Times the batched-nuclear-norm primitive across the matrix shapes the
decomposition search actually produces, then an end-to-end upper-bound
search with each backend.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from crossnorm.kernels import _batched_py

try:
    from crossnorm.kernels import _batched
except ImportError:
    _batched = None


def time_call(fn, *args, repeat=200):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_nuclear_norms():
    rng = np.random.default_rng(0)
    print(f"{'shape':>14s} {'python':>12s} {'compiled':>12s} {'speedup':>8s}")
    for n, d in ((4, 2), (9, 3), (16, 4), (32, 4), (64, 8)):
        stack = rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))
        t_py = time_call(_batched_py.nuclear_norms, stack)
        if _batched is None:
            print(f"{f'({n},{d},{d})':>14s} {t_py*1e6:>10.1f}us {'-':>12s} {'-':>8s}")
            continue
        t_c = time_call(_batched.nuclear_norms, stack)
        assert np.abs(_batched.nuclear_norms(stack)
                      - _batched_py.nuclear_norms(stack)).max() < 1e-12
        print(f"{f'({n},{d},{d})':>14s} {t_py*1e6:>10.1f}us "
              f"{t_c*1e6:>10.1f}us {t_py/t_c:>7.1f}x")


def bench_search():
    from crossnorm import kernels
    from crossnorm.decompose import operator_schmidt
    from crossnorm.gamma import OptimizerConfig
    from crossnorm.optimize import search_decomposition
    from crossnorm.states import random_density

    impls = [("python", _batched_py)] + ([("compiled", _batched)] if _batched else [])
    cfg = OptimizerConfig(seed=0, restarts=8, max_iter=200)
    for label, dims in (("two-qubit", (2, 2)), ("two-qutrit", (3, 3))):
        rho = random_density(dims, seed=1)
        dec = operator_schmidt(rho)
        print(f"\nupper-bound search on a full-rank {label} state:")
        for name, impl in impls:
            kernels.nuclear_norms = impl.nuclear_norms
            kernels.pair_cost = impl.pair_cost
            t0 = time.perf_counter()
            result = search_decomposition(dec.values, dec.left_ops,
                                          dec.right_ops, cfg)
            dt = time.perf_counter() - t0
            print(f"  {name:>8s}: {dt*1e3:8.1f} ms "
                  f"({result.iterations} iterations, cost {result.cost:.6f})")


if __name__ == "__main__":
    backend = "compiled" if _batched is not None else "python only"
    print(f"available backends: {backend}\n")
    bench_nuclear_norms()
    bench_search()
