"""Time the compiled and pure-Python moment integrators on the same workload.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.
"""

import argparse
import timeit

import numpy as np

from plasmonsr import EmitterParams, moment_matrix
from plasmonsr import _kernels_py

try:
    from plasmonsr import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def workload(n_points=20, seed=0):
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(n_points):
        p = EmitterParams.dimensionless(10 ** rng.uniform(-1, 3), rng.uniform(0.05, 1.0),
                                        rng.uniform(0, 5))
        g1, g2 = rng.uniform(0.05, 0.9, 2) / p.tau_b
        M, c = moment_matrix(p, g1, g2)
        horizon = 20.0 / np.min(np.abs(np.linalg.eigvals(M).real))
        cases.append((M, c, np.zeros(4), np.linspace(0.0, horizon, 51)))
    return cases


def run(kernel, cases):
    steps = 0
    for M, c, y0, ts in cases:
        _, _, n_acc, n_rej = kernel.integrate_affine(M, c, y0, ts, 1e-9, 1e-12)
        steps += n_acc + n_rej
    return steps


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--points", type=int, default=20)
    args = ap.parse_args()
    cases = workload(args.points)
    kernels = [("python", _kernels_py)]
    if _kernels_c is not None:
        kernels.append(("cython", _kernels_c))
    else:
        print("compiled kernel not available; timing the fallback only")
    times = {}
    for name, k in kernels:
        steps = run(k, cases)
        best = min(timeit.repeat(lambda: run(k, cases), number=1, repeat=args.repeat))
        times[name] = best
        print(f"{name:7s} {best * 1e3:9.2f} ms  {steps} steps  {best / steps * 1e6:7.2f} us/step")
    if len(times) == 2:
        a = _kernels_py.integrate_affine(*cases[0], 1e-9, 1e-12)[0]
        b = _kernels_c.integrate_affine(*cases[0], 1e-9, 1e-12)[0]
        print(f"speedup {times['python'] / times['cython']:.1f}x, "
              f"outputs identical: {np.array_equal(a, b)}")


if __name__ == "__main__":
    main()
