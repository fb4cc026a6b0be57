"""Compare the compiled stencil kernel with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--cells 400 1600 6400] [--size 2 4] [--repeat 50]
"""
import argparse
import timeit

import numpy as np

from hypnet.simulator import kernels


def bench(fn, n, m, dtype, repeat, rng):
    def r(*shape):
        a = rng.standard_normal(shape)
        return a + 1j * rng.standard_normal(shape) if dtype is complex else a
    A, B, C, u = r(n, m, m), r(n, m, m), r(n, m, m), r(n + 2, m)
    out = np.empty((n, m), dtype=dtype)
    return min(timeit.repeat(lambda: fn(A, B, C, u, out), number=repeat, repeat=5)) / repeat


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, nargs="+", default=[400, 1600, 6400])
    ap.add_argument("--size", type=int, nargs="+", default=[1, 2, 4])
    ap.add_argument("--repeat", type=int, default=50)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    if kernels.BACKEND != "cython":
        print("compiled kernel unavailable; timing numpy only")
    print(f"{'dtype':>8} {'m':>2} {'cells':>6} {'numpy us':>10} {'cython us':>10} {'speedup':>8}")
    for dtype in (float, complex):
        for m in args.size:
            for n in args.cells:
                tn = bench(kernels.apply_stencil_numpy, n, m, dtype, args.repeat, rng)
                if kernels.BACKEND == "cython":
                    tc = bench(kernels.apply_stencil, n, m, dtype, args.repeat, rng)
                    print(f"{dtype.__name__:>8} {m:>2} {n:>6} {1e6 * tn:>10.1f} {1e6 * tc:>10.1f} {tn / tc:>8.1f}")
                else:
                    print(f"{dtype.__name__:>8} {m:>2} {n:>6} {1e6 * tn:>10.1f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
