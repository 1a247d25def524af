"""Time the numba and numpy kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat N]

The first numba call compiles (or loads the on-disk cache); it is run
once as warm-up and excluded from the timings.
"""

import argparse
import time

import numpy as np

from pointint import core
from pointint.kernels import get_backend


def cases(rng):
    phi, a, b, c, d = core.sample_lambda(rng, 200_000)
    A = np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2).astype(complex)
    A *= np.exp(1j * phi)[:, None, None]
    s = np.full(len(A), 1j)
    theta, z, w = core.sample_unitary(rng, 1_000_000)
    n = 200_000
    h = np.full(n, 1e-4)
    v0, vm, v1 = rng.normal(size=(3, n))
    pos = np.sort(rng.uniform(-10, 10, 50_000))
    g = rng.normal(size=len(pos))
    return {
        "scatter_lambda (2e5)": lambda be: be.scatter_lambda(A, s),
        "odd_residual (1e6)": lambda be: be.odd_residual(theta, z.astype(complex), w.astype(complex), 1.0),
        "rk4_steps (2e5)": lambda be: be.rk4_steps(h, v0, vm, v1, 1.0),
        "delta_chain (5e4)": lambda be: be.delta_chain(pos, g, 1.0),
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = [get_backend("numpy"), get_backend("numba")]
    print(f"{'kernel':<24}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, fn in cases(np.random.default_rng(0)).items():
        fn(backends[1])  # warm-up / compile
        t_np, t_nb = (best_of(lambda: fn(be), args.repeat) for be in backends)
        print(f"{name:<24}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
