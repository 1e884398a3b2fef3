"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]

Times the three pointwise kernels on a convexity-scan sized grid
(256 x 512 plus caps) and a full beta_max bisection, and checks that the
two backends agree.
"""

import argparse
import time

import numpy as np

from gomboc import kernels
from gomboc.curvature import _sample_points, beta_max
from gomboc.surface import gomboc1


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = kernels.available_backends()
    shape = gomboc1(0.03)
    t, p = _sample_points(256, 512, 32)
    ph, dph, d2ph = shape.phase.evaluate(t)
    print(f"{t.size} points; backends: {', '.join(backends)}")

    results = {}
    for name in ("quartic_jet", "radius_jet", "principal_curvatures"):
        row = []
        for b in backends:
            fn = getattr(kernels, name)
            results[name, b] = fn(shape.beta, t, p, ph, dph, d2ph, backend=b)
            row.append(f"{b} {1e3 * best_of(lambda: fn(shape.beta, t, p, ph, dph, d2ph, backend=b), args.repeat):8.2f} ms")
        print(f"{name:22s} " + "   ".join(row))
        if len(backends) == 2:
            diff = np.max(np.abs(results[name, "numpy"] - results[name, "cython"]))
            print(f"{'':22s} max |numpy - cython| = {diff:.2e}")

    for b, mod in backends.items():
        saved = kernels._impl
        kernels._impl = mod
        try:
            t0 = time.perf_counter()
            res = beta_max(shape.phase, tol=1e-4, verify=False)
            print(f"beta_max ({b:6s})        {time.perf_counter() - t0:6.2f} s   beta_max={res.beta_max:.6f}")
        finally:
            kernels._impl = saved


if __name__ == "__main__":
    main()
